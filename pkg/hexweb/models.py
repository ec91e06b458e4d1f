from sqlalchemy import create_engine, Column, Integer, String, DateTime, Text, Float, ForeignKey
from sqlalchemy.orm import declarative_base, relationship, sessionmaker
from datetime import datetime
import logging

from config import DATABASE_URL, DATABASE_ECHO

logger = logging.getLogger(__name__)

SAMPLE_KINDS = ("c1", "c2", "ik", "weight_spread", "valency")


def make_engine(url: str = DATABASE_URL, echo: bool = DATABASE_ECHO):
    """Engine for the results store"""
    return create_engine(url, echo=echo, pool_pre_ping=True, pool_recycle=300)


# Create engine
engine = make_engine()

# Create SessionLocal class
SessionLocal = sessionmaker(autocommit=False, autoflush=False, bind=engine)

# Create Base class
Base = declarative_base()


class ExperimentRun(Base):
    """One invocation of a command whose results were stored"""
    __tablename__ = "experiment_runs"

    id = Column(Integer, primary_key=True, index=True)
    command = Column(String(50), nullable=False, index=True)
    signature = Column(String(20), nullable=False, index=True)
    seed = Column(Integer, nullable=True)
    parameters = Column(Text, nullable=False, default="{}")
    status = Column(String(20), nullable=False, default="running")
    summary = Column(Text, nullable=True)
    created_at = Column(DateTime, default=datetime.utcnow, index=True)

    samples = relationship("MeasurementSample", back_populates="run", cascade="all, delete-orphan")

    def __repr__(self):
        return f"<ExperimentRun(id={self.id}, command={self.command}, status={self.status})>"


class MeasurementSample(Base):
    """A measured value of one sample: C1, C2, I_k, weight spread or valency"""
    __tablename__ = "measurement_samples"

    id = Column(Integer, primary_key=True, index=True)
    run_id = Column(Integer, ForeignKey("experiment_runs.id"), nullable=False, index=True)
    kind = Column(String(20), nullable=False, index=True)
    sample_id = Column(Integer, nullable=False)
    key_a = Column(String(64), nullable=True)
    key_b = Column(String(64), nullable=True)
    value = Column(Float, nullable=True)
    created_at = Column(DateTime, default=datetime.utcnow)

    run = relationship("ExperimentRun", back_populates="samples")

    def __repr__(self):
        return f"<MeasurementSample(run={self.run_id}, kind={self.kind}, value={self.value})>"


# Database dependency
def get_db():
    """Dependency to get database session"""
    db = SessionLocal()
    try:
        yield db
    finally:
        db.close()


# Database initialization
def init_database(bind=None):
    """Create the results store tables"""
    try:
        Base.metadata.create_all(bind=bind or engine)
        logger.info("Database tables created successfully")
    except Exception as e:
        logger.error(f"Error creating database tables: {e}")
        raise


# Database cleanup
def close_database():
    """Close database connections"""
    try:
        engine.dispose()
        logger.info("Database connections closed")
    except Exception as e:
        logger.error(f"Error closing database: {e}")
