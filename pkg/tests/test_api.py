import pytest
from fastapi.testclient import TestClient

from hexweb.main import app
from hexweb.models import get_db
from hexweb.moves_topo import flip
from hexweb.schemas import hexmap_to_model

TORUS_FN = {
    "schema": "fn.v1",
    "signature": {"genus": 1, "boundary": 1},
    "lengths": {"0": 1.5, "1": 1.5},
}


@pytest.fixture
def client(db_session):
    app.dependency_overrides[get_db] = lambda: db_session
    try:
        yield TestClient(app)
    finally:
        app.dependency_overrides.clear()


def test_root_and_health(client):
    response = client.get("/")
    assert response.status_code == 200
    assert "flip-involution" in response.json()["suites"]
    assert client.get("/health").json()["status"] == "healthy"


def test_build_signature(client):
    response = client.post("/build", json={"signature": {"genus": 2, "boundary": 0}})
    assert response.status_code == 200
    body = response.json()
    assert body["schema_name"] == "hexmap.v1"
    assert body["state"]["schema"] == "hexmap.v1"
    assert body["residual"] is None


def test_build_fn(client):
    response = client.post("/build", json={"fn": TORUS_FN})
    assert response.status_code == 200
    body = response.json()
    assert body["schema_name"] == "geostate.v1"
    assert body["residual"] < 1e-9


def test_build_needs_input(client):
    assert client.post("/build", json={}).status_code == 400


def test_build_rejects_bad_fn(client):
    bad = dict(TORUS_FN, lengths={"0": 1.5, "1": -1.0})
    response = client.post("/build", json={"fn": bad})
    assert response.status_code == 400
    assert response.json()["detail"]["error"]


def test_explore(client):
    response = client.post("/explore", json={"signature": {"genus": 1, "boundary": 1}, "radius": 1})
    assert response.status_code == 200
    body = response.json()
    assert body["mode"] == "topo"
    assert body["vertex_count"] >= 1
    assert body["complete"] in (True, False)


def test_explore_weighted_needs_fn(client):
    response = client.post("/explore", json={"signature": {"genus": 1, "boundary": 1}, "mode": "weighted"})
    assert response.status_code == 400


def test_explore_weighted(client):
    response = client.post("/explore", json={"fn": TORUS_FN, "mode": "weighted", "radius": 1})
    assert response.status_code == 200
    assert "weight_shift" in response.json()["edges_by_kind"]


def test_explore_budget(client):
    response = client.post("/explore", json={"signature": {"genus": 2, "boundary": 0}, "radius": 2, "memory_cap": 2})
    assert response.status_code == 422
    assert response.json()["detail"]["error"] == "memory_budget_exceeded"


def test_distance(client, genus_two_map):
    first = hexmap_to_model(genus_two_map).model_dump(by_alias=True)
    second = hexmap_to_model(flip(genus_two_map, 0)).model_dump(by_alias=True)
    response = client.post("/distance", json={"first": first, "second": second, "max_radius": 2})
    assert response.status_code == 200
    assert response.json()["distance"] in (0, 1)
    same = client.post("/distance", json={"first": first, "second": first})
    assert same.json()["distance"] == 0


def test_verify_stores_run(client):
    response = client.post("/verify/flip-involution", json={"seed": 1, "scale": 0.01})
    assert response.status_code == 200
    assert response.json()["passed"]

    runs = client.get("/runs").json()
    assert runs["count"] == 1
    run = runs["runs"][0]
    assert run["command"] == "verify flip-involution"
    assert run["status"] == "passed"
    assert client.get(f"/runs/{run['id']}").json()["id"] == run["id"]
    assert client.get("/statistics").json()["total_runs"] == 1


def test_verify_unknown_suite(client):
    assert client.post("/verify/no-such-suite", json={}).status_code == 404


def test_missing_run(client):
    assert client.get("/runs/999").status_code == 404
