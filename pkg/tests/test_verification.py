import pytest

from hexweb.errors import InvalidConfig
from hexweb.verification import SUITES, SuiteParams, SuiteReport, run_suite


def test_suite_names():
    assert set(SUITES) == {
        "structural-soak",
        "flip-involution",
        "curve-enumeration",
        "curve-addition",
        "psi-phi",
        "pants-emulation",
        "lemma-weight-spread",
        "fn-consistency",
        "valency",
        "connectivity",
        "twist-action",
        "intersection-tracking",
    }


def test_report_bookkeeping():
    report = SuiteReport(suite="demo")
    assert report.check(True, "fine")
    assert not report.check(False, "broken")
    report.fail("also broken")
    assert not report.passed
    assert report.checked == 3
    assert report.failures == ["broken", "also broken"]
    assert report.summary() == "demo: FAIL (3 checks, 2 failures)"


def test_params_scale():
    params = SuiteParams(scale=0.01)
    assert params.size(1_000) == 10
    assert params.size(10) == 1
    assert params.ball_radius(3) == 3
    assert SuiteParams(radius=1).ball_radius(3) == 1


def test_unknown_suite():
    with pytest.raises(InvalidConfig):
        run_suite("no-such-suite")


def test_flip_involution_suite():
    report = run_suite("flip-involution", SuiteParams(seed=1, scale=0.01))
    assert report.passed, report.failures
    assert 0 < report.checked <= 10


def test_curve_enumeration_suite():
    report = run_suite("curve-enumeration", SuiteParams(radius=1))
    assert report.passed, report.failures
    assert report.checked > 0


def test_structural_soak_suite():
    report = run_suite("structural-soak", SuiteParams(seed=2, scale=0.002))
    assert report.passed, report.failures
    assert report.measurements["steps"] == 20


def test_fn_consistency_suite():
    report = run_suite("fn-consistency", SuiteParams(seed=0, scale=0.05))
    assert report.passed, report.failures
    assert report.measurements["unrolling_gap"] < 1e-8


def test_intersection_tracking_suite():
    report = run_suite("intersection-tracking", SuiteParams(seed=3, scale=0.04))
    assert report.passed, report.failures
    assert all("arcs_total" in row for row in report.samples["ik"])
