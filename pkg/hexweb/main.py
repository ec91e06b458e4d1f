from fastapi import FastAPI, HTTPException, Depends
from pydantic import BaseModel, Field
from typing import Any, Dict, Optional
from datetime import datetime
import logging

from .models import get_db, init_database, close_database
from .database_service import DatabaseService
from .errors import BudgetError, HexwebError, MoveError
from .explorer import MODES, TOPO, WEIGHTED, bfs_ball, distance, stats
from .hyp_geom import build_base, curve_sum_error, state_residual
from .pants_bridge import base_pants, phi
from .schemas import (
    FNModel,
    HexMapModel,
    SignatureModel,
    fn_from_model,
    geostate_to_model,
    hexmap_from_model,
    hexmap_to_model,
)
from .surface_core import canonical_form, key_digest
from .verification import SUITES, SuiteParams, SuiteReport, run_suite
from .weighted_graph import base_weighted_state

# Import configuration
from config import API_TITLE, API_DESCRIPTION, API_VERSION, HEXWEB_LOG, MEMORY_CAP, REMOVAL_CAP
# Configure logging
logging.basicConfig(level=getattr(logging, HEXWEB_LOG), format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

# Initialize FastAPI app
app = FastAPI(
    title=API_TITLE,
    description=API_DESCRIPTION,
    version=API_VERSION
)

db_service = DatabaseService()


# Pydantic models
class BuildRequest(BaseModel):
    signature: Optional[SignatureModel] = None
    fn: Optional[FNModel] = None


class BuildResponse(BaseModel):
    schema_name: str
    key: str
    state: Dict[str, Any]
    residual: Optional[float] = None
    curve_sum_error: Optional[float] = None


class VerifyRequest(BaseModel):
    seed: int = 0
    scale: float = Field(default=0.05, gt=0)
    removal_cap: int = Field(default=REMOVAL_CAP, ge=0)
    radius: Optional[int] = Field(default=None, ge=0)
    store: bool = True


class ExploreRequest(BaseModel):
    signature: Optional[SignatureModel] = None
    fn: Optional[FNModel] = None
    mode: str = TOPO
    radius: int = Field(default=1, ge=0, le=6)
    removal_cap: int = Field(default=REMOVAL_CAP, ge=0)
    memory_cap: int = Field(default=10_000, gt=0, le=MEMORY_CAP)


class ExploreResponse(BaseModel):
    mode: str
    root: str
    radius: int
    vertex_count: int
    edge_count: int
    edges_by_kind: Dict[str, int]
    degree_histogram: Dict[int, int]
    diameter: Optional[int] = None
    connected: bool
    complete: bool


class DistanceRequest(BaseModel):
    first: HexMapModel
    second: HexMapModel
    max_radius: int = Field(default=6, ge=0, le=10)
    removal_cap: int = Field(default=REMOVAL_CAP, ge=0)
    memory_cap: int = Field(default=100_000, gt=0, le=MEMORY_CAP)


class DistanceResponse(BaseModel):
    first: str
    second: str
    distance: int


class ResultsStats(BaseModel):
    total_runs: int
    failed_runs: int
    samples: Dict[str, Dict[str, Optional[float]]]
    latest_run: Optional[str] = None


def http_error(e: HexwebError) -> HTTPException:
    """Status code of a domain error"""
    if isinstance(e, BudgetError):
        status = 422
    elif isinstance(e, MoveError):
        status = 409
    else:
        status = 400
    return HTTPException(status_code=status, detail=e.to_dict())


# Startup and shutdown events
@app.on_event("startup")
async def startup_event():
    """Initialize the results store on startup"""
    try:
        init_database()
        logger.info("Database initialized successfully")
    except Exception as e:
        logger.error(f"Failed to initialize database: {e}")


@app.on_event("shutdown")
async def shutdown_event():
    try:
        close_database()
        logger.info("Services cleaned up successfully")
    except Exception as e:
        logger.error(f"Error during cleanup: {e}")


# API Routes
@app.get("/")
async def root():
    """Root endpoint"""
    return {
        "message": "hexweb API is running",
        "version": API_VERSION,
        "suites": list(SUITES),
        "docs": "/docs",
        "redoc": "/redoc"
    }


@app.post("/build", response_model=BuildResponse)
def build(request: BuildRequest):
    """Base state: a hexmap for a signature, a geostate with its self-consistency for FN coordinates"""
    if request.fn is None and request.signature is None:
        raise HTTPException(status_code=400, detail="Give a signature or FN coordinates")
    try:
        if request.fn is not None:
            config = fn_from_model(request.fn)
            state = build_base(config)
            model = geostate_to_model(state)
            return BuildResponse(
                schema_name=model.schema_name,
                key=key_digest(canonical_form(state.hex_map)),
                state=model.model_dump(by_alias=True),
                residual=state_residual(state),
                curve_sum_error=curve_sum_error(state),
            )
        hex_map = phi(base_pants(request.signature.to_sig()))
        model = hexmap_to_model(hex_map)
        return BuildResponse(
            schema_name=model.schema_name,
            key=key_digest(canonical_form(hex_map)),
            state=model.model_dump(by_alias=True),
        )
    except HexwebError as e:
        logger.warning(f"Build rejected: {e.message}")
        raise http_error(e)
    except Exception as e:
        logger.error(f"Error building base state: {str(e)}")
        raise HTTPException(status_code=500, detail=f"Error building base state: {str(e)}")


@app.post("/verify/{suite}", response_model=SuiteReport)
def verify(suite: str, request: VerifyRequest, db=Depends(get_db)):
    """Run one verification suite, storing the run and its samples"""
    if suite not in SUITES:
        raise HTTPException(status_code=404, detail=f"Unknown suite {suite}")
    params = SuiteParams(seed=request.seed, scale=request.scale, removal_cap=request.removal_cap, radius=request.radius)
    try:
        run = None
        if request.store:
            run = db_service.record_run(db, f"verify {suite}", "-", request.seed, request.model_dump())
        report = run_suite(suite, params)
        if run is not None:
            for kind, rows in report.samples.items():
                db_service.record_samples(db, run.id, kind, rows)
            db_service.finish_run(db, run.id, "passed" if report.passed else "failed", report.model_dump(exclude={"samples"}))
        return report
    except HexwebError as e:
        raise http_error(e)
    except Exception as e:
        logger.error(f"Error running suite {suite}: {str(e)}")
        raise HTTPException(status_code=500, detail=f"Error running suite {suite}: {str(e)}")


@app.post("/explore", response_model=ExploreResponse)
def explore(request: ExploreRequest):
    """Ball statistics around the base state"""
    if request.mode not in MODES:
        raise HTTPException(status_code=400, detail=f"Invalid mode. Use: {', '.join(MODES)}")
    if request.mode == WEIGHTED and request.fn is None:
        raise HTTPException(status_code=400, detail="Weighted exploration needs FN coordinates")
    if request.fn is None and request.signature is None:
        raise HTTPException(status_code=400, detail="Give a signature or FN coordinates")
    try:
        if request.mode == WEIGHTED:
            root = base_weighted_state(fn_from_model(request.fn))
        else:
            sig = request.signature.to_sig() if request.signature else request.fn.signature.to_sig()
            root = phi(base_pants(sig))
        ball = bfs_ball(root, request.radius, request.mode, request.removal_cap, request.memory_cap)
        summary = stats(ball)
        return ExploreResponse(
            mode=request.mode,
            root=key_digest(ball.root_key),
            radius=request.radius,
            vertex_count=summary.vertex_count,
            edge_count=summary.edge_count,
            edges_by_kind=summary.edges_by_kind,
            degree_histogram=summary.degree_histogram,
            diameter=summary.diameter,
            connected=summary.connected,
            complete=ball.complete,
        )
    except HexwebError as e:
        logger.warning(f"Exploration stopped: {e.message}")
        raise http_error(e)
    except Exception as e:
        logger.error(f"Error exploring: {str(e)}")
        raise HTTPException(status_code=500, detail=f"Error exploring: {str(e)}")


@app.post("/distance", response_model=DistanceResponse)
def get_distance(request: DistanceRequest):
    """Distance in the quotient graph between two maps"""
    try:
        first = hexmap_from_model(request.first)
        second = hexmap_from_model(request.second)
        value = distance(first, second, TOPO, request.max_radius, request.removal_cap, request.memory_cap)
        return DistanceResponse(
            first=key_digest(canonical_form(first)),
            second=key_digest(canonical_form(second)),
            distance=value,
        )
    except HexwebError as e:
        raise http_error(e)
    except Exception as e:
        logger.error(f"Error computing distance: {str(e)}")
        raise HTTPException(status_code=500, detail=f"Error computing distance: {str(e)}")


@app.get("/runs")
async def get_runs(limit: int = 10, command: Optional[str] = None, db=Depends(get_db)):
    """Stored experiment runs, newest first"""
    try:
        runs = db_service.list_runs(db, limit, command)
        return {"runs": runs, "count": len(runs)}
    except Exception as e:
        logger.error(f"Error retrieving runs: {str(e)}")
        raise HTTPException(status_code=500, detail=f"Error retrieving runs: {str(e)}")


@app.get("/runs/{run_id}")
async def get_run(run_id: int, db=Depends(get_db)):
    try:
        run = db_service.get_run(db, run_id)
    except Exception as e:
        logger.error(f"Error retrieving run: {str(e)}")
        raise HTTPException(status_code=500, detail=f"Error retrieving run: {str(e)}")
    if not run:
        raise HTTPException(status_code=404, detail=f"Run {run_id} not found")
    return run


@app.get("/statistics", response_model=ResultsStats)
async def get_statistics(db=Depends(get_db)):
    """Results store statistics"""
    try:
        return ResultsStats(**db_service.get_statistics(db))
    except Exception as e:
        logger.error(f"Error getting statistics: {str(e)}")
        raise HTTPException(status_code=500, detail=f"Error getting statistics: {str(e)}")


# Health check endpoint
@app.get("/health")
async def health_check():
    """Health check endpoint"""
    return {
        "status": "healthy",
        "timestamp": datetime.now().isoformat()
    }


# Main function for running the app
def main():
    """Main function to run the FastAPI application"""
    import uvicorn
    from config import HOST, PORT, DEBUG

    uvicorn.run("hexweb.main:app", host=HOST, port=PORT, reload=DEBUG)


if __name__ == "__main__":
    main()
