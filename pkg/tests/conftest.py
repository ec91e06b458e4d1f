import random

import pytest
from sqlalchemy import create_engine
from sqlalchemy.orm import sessionmaker
from sqlalchemy.pool import StaticPool

from hexweb.hyp_geom import default_config, random_config
from hexweb.models import init_database
from hexweb.moves_topo import enumerate_removals
from hexweb.pants_bridge import base_pants, phi
from hexweb.surface_core import SurfaceSig
from hexweb.weighted_graph import base_weighted_state, weighted_removals

GENUS_TWO = SurfaceSig(2, 0)
ONE_HOLED_TORUS = SurfaceSig(1, 1)
FOUR_HOLED_SPHERE = SurfaceSig(0, 4)


@pytest.fixture(scope="session")
def genus_two_map():
    return phi(base_pants(GENUS_TWO))


@pytest.fixture(scope="session")
def torus_map():
    return phi(base_pants(ONE_HOLED_TORUS))


@pytest.fixture(scope="session")
def sphere_map():
    return phi(base_pants(FOUR_HOLED_SPHERE))


@pytest.fixture(scope="session")
def sphere_reduced_map(sphere_map):
    """Four-holed sphere with only its boundary curves"""
    candidates = enumerate_removals(sphere_map, 4, 2).candidates
    assert candidates
    return candidates[0][0]


@pytest.fixture(scope="session")
def default_fn():
    return default_config(GENUS_TWO)


@pytest.fixture(scope="session")
def torus_fn():
    return default_config(ONE_HOLED_TORUS, length=1.5)


@pytest.fixture(scope="session")
def reduced_weighted_state():
    """Genus-two weighted state with its separating curve removed"""
    for seed in range(20):
        base = base_weighted_state(random_config(GENUS_TWO, random.Random(seed)))
        removals = weighted_removals(base, 1)
        if removals:
            return removals[0][1]
    pytest.fail("No removable separating curve in 20 random configurations")


@pytest.fixture
def db_session():
    """Session on a fresh in-memory results store"""
    engine = create_engine("sqlite://", connect_args={"check_same_thread": False}, poolclass=StaticPool)
    init_database(bind=engine)
    session = sessionmaker(autocommit=False, autoflush=False, bind=engine)()
    try:
        yield session
    finally:
        session.close()
        engine.dispose()
