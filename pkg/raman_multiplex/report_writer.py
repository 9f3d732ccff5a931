"""
JSON reports and plot-ready CSV curves.
"""
import json
import logging
import math
import warnings
from pathlib import Path
from typing import Any, Dict

import numpy as np

import config
from raman_multiplex.errors import EmptyCurveWarning, ReportWriteError

logger = logging.getLogger(__name__)


def to_jsonable(value: Any) -> Any:
    """Plain JSON types: numpy scalars and arrays unwrapped, complex as [re, im], NaN/inf as null."""
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, np.generic):
        return to_jsonable(value.item())
    if isinstance(value, complex):
        return [to_jsonable(value.real), to_jsonable(value.imag)]
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def emit_plot_data(report, out_dir) -> Dict[str, str]:
    """Write one CSV per curve; empty curves are skipped with a warning in the report."""
    out_dir = Path(out_dir)
    written = {}
    for name, frame in report.curves.items():
        if frame is None or frame.empty:
            message = f"curve '{name}' is empty; no file written"
            logger.warning(message)
            warnings.warn(message, EmptyCurveWarning, stacklevel=2)
            report.warnings.append(message)
            continue
        filename = f"{report.scenario}_{name}.csv"
        path = out_dir / filename
        try:
            out_dir.mkdir(parents=True, exist_ok=True)
            frame.to_csv(path, index=False, float_format=config.CSV_FLOAT_FORMAT)
        except OSError as e:
            logger.error(f"Failed to write curve {path}: {e}")
            raise ReportWriteError(str(path), str(e)) from e
        written[name] = filename
        logger.info(f"Wrote {len(frame)} rows to {path}")
    report.curve_files = written
    return written


def write_report(report, out_dir, report_name: str = "report.json", csv: bool = True) -> Path:
    """Write curves (optionally) and then the JSON report that references them."""
    out_dir = Path(out_dir)
    if csv:
        emit_plot_data(report, out_dir)
    path = out_dir / report_name
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        text = json.dumps(to_jsonable(report.to_dict()), indent=2, allow_nan=False)
        path.write_text(text + "\n")
    except OSError as e:
        logger.error(f"Failed to write report {path}: {e}")
        raise ReportWriteError(str(path), str(e)) from e
    logger.info(f"Report written to {path}")
    return path
