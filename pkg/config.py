# Configuration file for the hexweb toolkit
import os
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# Server configuration
HOST = os.getenv("HOST", "0.0.0.0")
PORT = int(os.getenv("PORT", 8000))
DEBUG = os.getenv("DEBUG", "False").lower() == "true"

# Database configuration
DATABASE_URL = os.getenv("DATABASE_URL", "sqlite:///./hexweb.db")
DATABASE_ECHO = os.getenv("DATABASE_ECHO", "False").lower() == "true"

# Logging configuration
HEXWEB_LOG = os.getenv("HEXWEB_LOG", "INFO").upper()
LOG_FILE = os.getenv("LOG_FILE", "hexweb.log")

# Exploration configuration
REMOVAL_CAP = int(os.getenv("REMOVAL_CAP", 2))  # twist-offset classes kept on each side of the untwisted reattachment
MEMORY_CAP = int(os.getenv("MEMORY_CAP", 1_000_000))  # vertices held by a single exploration
COMPLEXITY_LIMIT = int(os.getenv("COMPLEXITY_LIMIT", 6))  # largest cut piece (in arcs) enumerated exactly
EMULATION_RADIUS = int(os.getenv("EMULATION_RADIUS", 4))
THREADS = int(os.getenv("THREADS", 1))
OUTPUT_DIR = os.getenv("OUTPUT_DIR", "out")

# Numerical configuration
RESIDUAL_TOL = float(os.getenv("RESIDUAL_TOL", 1e-12))
COMPARE_TOL = float(os.getenv("COMPARE_TOL", 1e-9))
SNAP_TOL = float(os.getenv("SNAP_TOL", 1e-9))
DRIFT_TOL = float(os.getenv("DRIFT_TOL", 1e-8))

# API configuration
API_TITLE = os.getenv("API_TITLE", "hexweb API")
API_DESCRIPTION = os.getenv("API_DESCRIPTION", "Hexagon decomposition graphs of surfaces: construction, moves and exploration")
API_VERSION = os.getenv("API_VERSION", "1.0.0")
