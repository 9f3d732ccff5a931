import json

import pandas as pd
import pytest
from click.testing import CliRunner

from app import cli, main
from raman_multiplex import experiment_runner
from raman_multiplex.verification import CheckResult, OracleSettings, VerificationReport

REDUCED = {"reduced": {"g1": 0.6, "gm1": 0.8, "delta": 0.5, "time": 0.3}}


@pytest.fixture
def runner():
    return CliRunner()


def write_config(tmp_path, document, name="experiment.json"):
    path = tmp_path / name
    path.write_text(json.dumps(document))
    return str(path)


def read_report(directory):
    return json.loads((directory / "report.json").read_text())


def test_statistics_of_coherent_probe(runner, tmp_path):
    config_path = write_config(tmp_path, {"parameters": REDUCED, "state": {"kind": "coherent", "alpha": [0.5, 0]}})
    out = tmp_path / "out"
    result = runner.invoke(cli, ["statistics", "--config", config_path, "--out", str(out)])
    assert result.exit_code == 0, result.output
    report = read_report(out)
    for value in report["payload"]["autocorrelations"]["g2"].values():
        assert value == pytest.approx(1.0, abs=1e-9)
    assert report["curves"] == {"squeezing": "statistics_squeezing.csv"}
    assert (out / "statistics_squeezing.csv").exists()


def test_fock_sweep_rows_sum_to_photon_number(runner, tmp_path):
    config_path = write_config(tmp_path, {
        "parameters": REDUCED,
        "state": {"kind": "fock", "n": 2},
        "sweep": [{"parameter": "time", "start": 0.0, "stop": 0.4, "count": 9}],
    })
    out = tmp_path / "out"
    result = runner.invoke(cli, ["sweep", "--config", config_path, "--out", str(out), "--jobs", "1"])
    assert result.exit_code == 0, result.output
    table = pd.read_csv(out / "sweep_sweep.csv")
    assert len(table) == 9
    totals = table["n_stokes"] + table["n_probe"] + table["n_anti_stokes"]
    assert totals.sub(2.0).abs().max() < 1e-12
    for observable in ("n_stokes", "n_probe", "n_anti_stokes", "g2"):
        assert list(pd.read_csv(out / f"sweep_{observable}.csv").columns) == ["t", observable]


def test_missing_state_is_configuration_error(runner, tmp_path):
    config_path = write_config(tmp_path, {"parameters": REDUCED})
    result = runner.invoke(cli, ["statistics", "--config", config_path, "--out", str(tmp_path)])
    assert result.exit_code == 1
    assert "state" in result.output


def test_truncation_in_strict_mode_is_resource_error(runner, tmp_path):
    config_path = write_config(tmp_path, {
        "parameters": REDUCED,
        "state": {"kind": "coherent", "alpha": [3.0, 0]},
        "oracle": {"n_max": 4},
    })
    result = runner.invoke(cli, ["coherent", "--config", config_path, "--out", str(tmp_path), "--strict"])
    assert result.exit_code == 2


def test_verification_failure_exit_code(runner, tmp_path, monkeypatch):
    failing = VerificationReport([CheckResult(2, "oracle_moments", {"moment_gap": 1.0}, {"moment_gap": 1e-8})],
                                 seed=0, settings=OracleSettings())
    monkeypatch.setattr(experiment_runner, "run_verification_suite", lambda settings, seed: failing)
    out = tmp_path / "out"
    result = runner.invoke(cli, ["verify", "--out", str(out)])
    assert result.exit_code == 3
    assert read_report(out)["failure"].startswith("oracle_moments")


def test_same_seed_gives_same_report(runner, tmp_path):
    config_path = write_config(tmp_path, {
        "parameters": REDUCED,
        "state": {"kind": "thermal", "mean": 0.2, "samples": 12},
        "seed": 9,
    })
    payloads = []
    for name in ("first", "second"):
        out = tmp_path / name
        assert runner.invoke(cli, ["mixture", "--config", config_path, "--out", str(out)]).exit_code == 0
        payloads.append(read_report(out)["payload"])
    assert payloads[0] == payloads[1]


def test_main_maps_usage_errors_to_configuration_exit():
    assert main(["no-such-scenario"]) == 1


@pytest.mark.slow
def test_verify_passes(runner, tmp_path):
    config_path = write_config(tmp_path, {"oracle": {"draws": 20}})
    out = tmp_path / "out"
    result = runner.invoke(cli, ["verify", "--config", config_path, "--out", str(out)])
    assert result.exit_code == 0, result.output
    report = read_report(out)
    assert report["payload"]["passed"] is True
    assert report["failure"] is None
