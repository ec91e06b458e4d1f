from pathlib import Path

import pytest

from hexweb.database_service import DatabaseService


@pytest.fixture
def service():
    return DatabaseService()


def test_run_lifecycle(db_session, service):
    run = service.record_run(db_session, "walk", "S(2,0)", 7, {"mode": "topo"})
    assert run.status == "running"
    stored = service.record_samples(
        db_session,
        run.id,
        "c1",
        [
            {"sample_id": 0, "key_a": "aa", "key_b": "bb", "value": 3},
            {"sample_id": 1, "key_a": "aa", "key_b": "cc", "value": 5},
        ],
    )
    assert stored == 2
    service.finish_run(db_session, run.id, "passed", {"steps": 10})

    loaded = service.get_run(db_session, run.id)
    assert loaded["status"] == "passed"
    assert loaded["parameters"] == {"mode": "topo"}
    assert loaded["summary"] == {"steps": 10}
    assert loaded["sample_count"] == 2


def test_trace_rows_without_bound(db_session, service):
    run = service.record_run(db_session, "verify", "-", None, {})
    rows = [{"sample_id": 0, "step": 0, "kind": "flip", "arcs_total": 4, "curve_crossings": None}]
    assert service.record_samples(db_session, run.id, "ik", rows) == 1
    assert service.get_statistics(db_session)["samples"]["ik"] == {"count": 1, "max": None}


def test_unknown_sample_kind(db_session, service):
    run = service.record_run(db_session, "verify", "-", 0, {})
    with pytest.raises(ValueError):
        service.record_samples(db_session, run.id, "teapot", [])


def test_finish_missing_run(db_session, service):
    with pytest.raises(Exception):
        service.finish_run(db_session, 404, "passed", {})


def test_missing_run_is_none(db_session, service):
    assert service.get_run(db_session, 1) is None


def test_list_and_statistics(db_session, service):
    first = service.record_run(db_session, "explore", "S(1,1)", 0, {})
    second = service.record_run(db_session, "walk", "S(1,1)", 1, {})
    service.finish_run(db_session, first.id, "failed", {})
    service.record_samples(db_session, second.id, "valency", [{"sample_id": 0, "value": 6}])

    assert len(service.list_runs(db_session)) == 2
    assert [r["command"] for r in service.list_runs(db_session, command="walk")] == ["walk"]
    assert len(service.list_runs(db_session, limit=1)) == 1

    summary = service.get_statistics(db_session)
    assert summary["total_runs"] == 2
    assert summary["failed_runs"] == 1
    assert summary["samples"]["valency"] == {"count": 1, "max": 6.0}
    assert summary["latest_run"] is not None


@pytest.mark.parametrize("name", ["alembic.ini", "alembic/env.py"])
def test_migration_files_carry_no_template_notes(name):
    text = (Path(__file__).resolve().parents[1] / name).read_text()
    for note in ("A generic, single database configuration", "add your model's MetaData", "Uncomment", "my_important_option"):
        assert note not in text
