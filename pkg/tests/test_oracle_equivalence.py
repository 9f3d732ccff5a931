import math

import pytest

from raman_multiplex.errors import VerificationFailure
from raman_multiplex.photon_statistics import autocorrelation
from raman_multiplex.verification import (
    CheckResult,
    OracleSettings,
    VerificationReport,
    check_coherent_multiplexing,
    check_degenerate_limits,
    check_fock_tripartite,
    check_mixture_transport,
    check_oracle_suite,
    check_propagator_routes,
    check_squeezing_transfer,
    oracle_cases,
    run_verification_suite,
    standard_params,
    time_grid,
)


@pytest.fixture(scope="module")
def settings():
    return OracleSettings()


def assert_passed(check: CheckResult):
    failing = {key: value for key, value in check.residuals.items() if value > check.tolerances[key]}
    assert check.passed, f"{check.name}: {failing}"


def test_time_grid_covers_one_half_beat():
    for p in standard_params():
        grid = time_grid(p)
        assert len(grid) == 16
        assert grid[0] == 0
        assert p.at_time(grid[-1]).gt == pytest.approx(math.pi)


def test_oracle_cases_cover_every_family(settings):
    labels = [case.label for case in oracle_cases(settings, seed=0)]
    assert {"fock_1", "fock_4", "squeezed_0.3", "thermal", "thermal_samples"} <= set(labels)
    assert sum(label.startswith("coherent") for label in labels) == 2


def test_thermal_case_autocorrelation_is_two(settings):
    case = next(case for case in oracle_cases(settings, seed=0) if case.label == "thermal")
    g2 = autocorrelation(case.moments.probe_number_moments, 2).value
    assert abs(g2 - case.expected_g2) < 1e-12
    mixture = case.ket()
    assert mixture.basis.n_max == settings.squeezed_n_max


def test_propagator_routes():
    assert_passed(check_propagator_routes(seed=11, draws=50))


def test_oracle_moment_suite(settings):
    checks = check_oracle_suite(settings, seed=0)
    assert [c.criterion for c in checks] == [2, 3, 4, 5]
    for check in checks:
        assert_passed(check)


def test_coherent_multiplexing(settings):
    assert_passed(check_coherent_multiplexing(settings))


def test_fock_tripartite(settings):
    check = check_fock_tripartite(settings)
    assert_passed(check)
    assert check.residuals["not_entangled"] == 0


def test_squeezing_transfer(settings):
    assert_passed(check_squeezing_transfer(settings))


def test_mixture_transport(settings):
    check = check_mixture_transport(settings, seed=5)
    assert_passed(check)
    assert check.residuals["weight_gap"] == 0


def test_degenerate_limits():
    assert_passed(check_degenerate_limits())


def test_report_raises_on_failure(settings):
    good = CheckResult(1, "good", {"gap": 1e-15}, {"gap": 1e-12})
    bad = CheckResult(2, "bad", {"gap": 1e-3, "other": 0.0}, {"gap": 1e-8, "other": 1.0})
    report = VerificationReport([good, bad], seed=0, settings=settings)
    assert not report.passed
    assert [c.name for c in report.failures] == ["bad"]
    assert report.residuals()["bad"]["gap"] == 1e-3
    with pytest.raises(VerificationFailure, match="bad"):
        report.raise_on_failure()
    VerificationReport([good], seed=0, settings=settings).raise_on_failure()


@pytest.mark.slow
def test_full_suite_passes():
    report = run_verification_suite(OracleSettings(draws=20), seed=0)
    assert report.passed, [c.name for c in report.failures]
    data = report.to_dict()
    assert data["passed"] is True
    assert [check["criterion"] for check in data["checks"]] == sorted(check["criterion"] for check in data["checks"])
