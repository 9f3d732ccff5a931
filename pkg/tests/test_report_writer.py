import json
import math

import numpy as np
import pandas as pd
import pytest

from raman_multiplex.errors import EmptyCurveWarning, ReportWriteError
from raman_multiplex.experiment_runner import Report
from raman_multiplex.report_writer import emit_plot_data, to_jsonable, write_report


def make_report(**curves):
    return Report(scenario="sweep", config={"scenario": "sweep"}, payload={"value": 0.1}, seed=0, curves=curves)


def test_jsonable_conversions():
    data = to_jsonable({
        "z": 1 + 2j,
        "nan": math.nan,
        "array": np.array([1.5, np.inf]),
        "scalar": np.float64(0.25),
        (1, -1): 0.5,
    })
    assert data == {"z": [1.0, 2.0], "nan": None, "array": [1.5, None], "scalar": 0.25, "(1, -1)": 0.5}


def test_curves_written_with_full_precision(tmp_path):
    value = 0.1 + 0.2
    report = make_report(sweep=pd.DataFrame({"t": [0.0, 1.0], "n_probe": [value, 1 / 3]}))
    written = emit_plot_data(report, tmp_path)
    assert written == {"sweep": "sweep_sweep.csv"}
    restored = pd.read_csv(tmp_path / "sweep_sweep.csv", float_precision="round_trip")
    assert restored["n_probe"][0] == value
    assert restored["n_probe"][1] == 1 / 3


def test_empty_curve_skipped_with_warning(tmp_path):
    report = make_report(empty=pd.DataFrame({"t": []}))
    with pytest.warns(EmptyCurveWarning):
        written = emit_plot_data(report, tmp_path)
    assert written == {}
    assert not (tmp_path / "sweep_empty.csv").exists()
    assert "empty" in report.warnings[0]


def test_report_references_curves(tmp_path):
    report = make_report(sweep=pd.DataFrame({"t": [0.0], "g2": [math.nan]}))
    path = write_report(report, tmp_path / "out")
    data = json.loads(path.read_text())
    assert data["curves"] == {"sweep": "sweep_sweep.csv"}
    assert data["payload"] == {"value": 0.1}
    assert (tmp_path / "out" / "sweep_sweep.csv").exists()


def test_csv_can_be_disabled(tmp_path):
    report = make_report(sweep=pd.DataFrame({"t": [0.0]}))
    write_report(report, tmp_path, report_name="only.json", csv=False)
    assert sorted(p.name for p in tmp_path.iterdir()) == ["only.json"]


def test_unwritable_directory(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("not a directory")
    with pytest.raises(ReportWriteError) as excinfo:
        write_report(make_report(), blocker / "out")
    assert excinfo.value.exit_code == 2
