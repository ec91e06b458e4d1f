import json

import pytest

from hexweb.cli import main


def run_cli(tmp_path, *args):
    return main(["--log-file", "", *args, "--out", str(tmp_path)])


def test_build_signature(tmp_path, capsys):
    assert run_cli(tmp_path, "build", "--genus", "2") == 0
    data = json.loads((tmp_path / "base_hexmap.json").read_text())
    assert data["schema"] == "hexmap.v1"
    assert "hexagons" in capsys.readouterr().out


def test_build_needs_a_surface(tmp_path, capsys):
    assert run_cli(tmp_path, "build") == 2
    assert "error:" in capsys.readouterr().err


def test_weighted_mode_needs_fn(tmp_path):
    assert run_cli(tmp_path, "build", "--genus", "2", "--mode", "weighted") == 2


def test_build_from_fn_file(tmp_path):
    fn_file = tmp_path / "torus.json"
    fn_file.write_text(
        json.dumps(
            {
                "schema": "fn.v1",
                "signature": {"genus": 1, "boundary": 1},
                "lengths": {"0": 1.5, "1": 1.5},
                "twists": {"1": 0.25},
            }
        )
    )
    assert run_cli(tmp_path, "build", "--fn", str(fn_file)) == 0
    report = json.loads((tmp_path / "fn_report.json").read_text())
    assert report["passed"]
    assert (tmp_path / "base_geostate.json").exists()


def test_missing_fn_file(tmp_path):
    assert run_cli(tmp_path, "build", "--fn", str(tmp_path / "absent.json")) == 2


def test_verify_unknown_suite(tmp_path):
    assert run_cli(tmp_path, "verify", "no-such-suite") == 2


def test_verify_suite(tmp_path, capsys):
    assert run_cli(tmp_path, "verify", "flip-involution", "--scale", "0.01", "--seed", "1") == 0
    assert "flip-involution: PASS" in capsys.readouterr().out
    assert json.loads((tmp_path / "flip-involution.json").read_text())["passed"]


def test_explore_writes_exports(tmp_path):
    assert run_cli(tmp_path, "explore", "--genus", "1", "--boundary", "1", "--radius", "1") == 0
    for name in ("ball.dot", "ball.jsonl", "stats.tsv"):
        assert (tmp_path / name).exists()
    assert (tmp_path / "ball.dot").read_text().startswith("graph topo {")


def test_explore_budget(tmp_path):
    assert run_cli(tmp_path, "explore", "--genus", "2", "--radius", "2", "--memory-cap", "2") == 3


def test_distance_to_itself(tmp_path, capsys):
    assert run_cli(tmp_path, "build", "--genus", "2") == 0
    capsys.readouterr()
    state = str(tmp_path / "base_hexmap.json")
    assert run_cli(tmp_path, "distance", "--from", state, "--to", state) == 0
    assert capsys.readouterr().out.strip() == "0"


def test_walk_then_replay(tmp_path, capsys):
    assert run_cli(tmp_path, "walk", "--genus", "2", "--steps", "6", "--seed", "4") == 0
    walked = capsys.readouterr().out.split()[3].rstrip(",")
    code = run_cli(
        tmp_path,
        "replay",
        "--root",
        str(tmp_path / "walk_root.json"),
        "--moves",
        str(tmp_path / "walk_moves.jsonl"),
    )
    assert code == 0
    assert capsys.readouterr().out.strip() == walked
    assert (tmp_path / "replay_final.json").exists()


def test_negative_steps(tmp_path):
    assert run_cli(tmp_path, "walk", "--genus", "2", "--steps", "-1") == 2


def test_unknown_command(tmp_path):
    with pytest.raises(SystemExit):
        run_cli(tmp_path, "teleport")
