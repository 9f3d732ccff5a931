"""
Experiment documents and scenario dispatch for the batch front-end.
"""
import itertools
import json
import logging
import math
import warnings
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable, Dict, List, Literal, Optional

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

import config
from raman_multiplex import __version__
from raman_multiplex.errors import ConfigValidationError, UnsupportedMomentError, config_error_from_validation
from raman_multiplex.fock_oracle import FockBasis, evolve, measure_moments
from raman_multiplex.photon_statistics import (
    MomentSet,
    compute_statistics,
    default_phi_grid,
    squeezing_transfer,
)
from raman_multiplex.physical_config import (
    CouplingParams,
    ParametersBlock,
    check_validity_bound,
    parse_parameters,
)
from raman_multiplex.propagator import (
    MODE_LABELS,
    PROBE,
    build_propagator,
    coupled_mode_evolution,
    decompose_modes,
    transfer_factors,
)
from raman_multiplex.states import (
    CoherentSpec,
    FockSpec,
    InputState,
    StateSpec,
    coherent_ket,
    coherent_mixture_kets,
    complex_to_pair,
    evolve_coherent,
    fock_output,
    mixture_moments,
    separability_witness,
    transform_mixture,
    vacuum_sideband_p_reduction,
)
from raman_multiplex.verification import OracleSettings, run_verification_suite

logger = logging.getLogger(__name__)

SCENARIOS = ("propagator-dump", "statistics", "squeezing", "fock", "coherent", "mixture", "verify", "sweep")
Scenario = Literal["propagator-dump", "statistics", "squeezing", "fock", "coherent", "mixture", "verify", "sweep"]


# =============================================================================
# EXPERIMENT DOCUMENT
# =============================================================================

class SweepAxis(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    parameter: Literal["g1", "gm1", "delta", "time"]
    start: float
    stop: float
    count: int = Field(..., ge=1)

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)


class OutputSettings(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    directory: Optional[str] = None
    report_name: str = "report.json"
    csv: bool = True


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    scenario: Scenario
    parameters: Optional[ParametersBlock] = None
    state: Optional[StateSpec] = None
    sweep: List[SweepAxis] = Field(default_factory=list)
    output: OutputSettings = OutputSettings()
    oracle: OracleSettings = OracleSettings()
    seed: int = 0
    n_top: int = Field(config.N_TOP, ge=2)
    phi_points: int = Field(config.PHI_GRID_POINTS, ge=8)

    @model_validator(mode="after")
    def _scenario_requirements(self):
        if self.scenario == "verify":
            return self
        if self.parameters is None:
            raise ValueError(f"scenario '{self.scenario}' needs a 'parameters' block")
        if self.scenario != "propagator-dump" and self.state is None:
            raise ValueError(f"scenario '{self.scenario}' needs a 'state' block")
        if self.scenario == "fock" and not isinstance(self.state, FockSpec):
            raise ValueError("scenario 'fock' needs a state of kind 'fock'")
        if self.scenario == "coherent" and not isinstance(self.state, CoherentSpec):
            raise ValueError("scenario 'coherent' needs a state of kind 'coherent'")
        if self.scenario == "sweep":
            if not self.sweep:
                raise ValueError("scenario 'sweep' needs at least one sweep axis")
            names = [axis.parameter for axis in self.sweep]
            if len(set(names)) != len(names):
                raise ValueError(f"sweep axes repeat a parameter: {names}")
        return self

    def with_strict(self, strict: bool) -> "ExperimentConfig":
        if not strict:
            return self
        return self.model_copy(update={"oracle": self.oracle.model_copy(update={"strict": True})})


def load_experiment_config(path: Optional[str], scenario: Optional[str] = None) -> ExperimentConfig:
    """Read and validate a JSON experiment document; the CLI scenario wins over a missing one."""
    document: Dict[str, Any] = {}
    if path:
        try:
            document = json.loads(Path(path).read_text())
        except OSError as e:
            raise ConfigValidationError(f"cannot read {path}: {e}", field="config") from e
        except json.JSONDecodeError as e:
            raise ConfigValidationError(f"{path} is not valid JSON: {e}", field="config") from e
        if not isinstance(document, dict):
            raise ConfigValidationError("top level must be an object", field="config")

    if scenario is not None:
        configured = document.get("scenario")
        if configured is not None and configured != scenario:
            raise ConfigValidationError(
                f"config names scenario '{configured}' but '{scenario}' was requested", field="scenario"
            )
        document = {**document, "scenario": scenario}

    try:
        return ExperimentConfig.model_validate(document)
    except ValidationError as e:
        raise config_error_from_validation(e) from e


# =============================================================================
# REPORT
# =============================================================================

@dataclass
class Report:
    scenario: str
    config: Dict[str, Any]
    payload: Dict[str, Any]
    seed: int
    residuals: Optional[Dict[str, Any]] = None
    warnings: List[str] = field(default_factory=list)
    curves: Dict[str, pd.DataFrame] = field(default_factory=dict)
    curve_files: Dict[str, str] = field(default_factory=dict)
    failure: Optional[str] = None
    version: str = __version__
    schema_version: str = config.REPORT_SCHEMA_VERSION
    generated_at: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema_version": self.schema_version,
            "version": self.version,
            "generated_at": self.generated_at,
            "scenario": self.scenario,
            "seed": self.seed,
            "config": self.config,
            "payload": self.payload,
            "residuals": self.residuals,
            "warnings": self.warnings,
            "curves": self.curve_files,
            "failure": self.failure,
        }


@dataclass
class ScenarioResult:
    payload: Dict[str, Any]
    curves: Dict[str, pd.DataFrame] = field(default_factory=dict)
    residuals: Optional[Dict[str, Any]] = None
    failure: Optional[str] = None


# =============================================================================
# SCENARIOS
# =============================================================================

def _output_moments(state: InputState, moments: MomentSet, p: CouplingParams) -> Optional[MomentSet]:
    """Transported mixture moments when sidebands are populated and closed forms do not apply."""
    if moments.vacuum_sidebands or moments.gaussian:
        return None
    masses = state.point_masses()
    if masses is None:
        raise UnsupportedMomentError(f"cannot propagate number moments of a '{state.kind}' input with populated sidebands")
    return mixture_moments(transform_mixture(masses, build_propagator(p)), moments.n_top)


def run_propagator_dump(experiment: ExperimentConfig, state: Optional[InputState], p: CouplingParams, jobs: int) -> ScenarioResult:
    propagator = build_propagator(p)
    modes = decompose_modes(p)
    payload = {
        "params": p.to_dict(),
        "propagator": propagator.to_json_pairs(),
        "unitarity_defect": propagator.unitarity_defect(),
        "phase_reference": propagator.phase_reference,
        "transfer_factors": dict(zip(MODE_LABELS, transfer_factors(p).tolist())),
        "mode_frequencies": dict(zip(("uncoupled", "plus", "minus"), modes.frequencies)),
        "coupled_mode_evolution": [complex_to_pair(z) for z in coupled_mode_evolution(p)],
    }
    return ScenarioResult(payload)


def run_statistics(experiment: ExperimentConfig, state: InputState, p: CouplingParams, jobs: int) -> ScenarioResult:
    moments = state.moments(experiment.n_top)
    report = compute_statistics(moments, p, default_phi_grid(experiment.phi_points), _output_moments(state, moments, p))
    curves = {"squeezing": report.squeezing.to_frame()} if report.squeezing is not None else {}
    return ScenarioResult(report.to_dict(), curves)


def run_squeezing(experiment: ExperimentConfig, state: InputState, p: CouplingParams, jobs: int) -> ScenarioResult:
    report = squeezing_transfer(state.moments(experiment.n_top), p, default_phi_grid(experiment.phi_points))
    return ScenarioResult(report.to_dict(), {"squeezing": report.to_frame()})


def run_fock(experiment: ExperimentConfig, state: InputState, p: CouplingParams, jobs: int) -> ScenarioResult:
    n = state.spec.n
    output = fock_output(n, build_propagator(p))
    payload = output.to_dict()
    payload["separability"] = separability_witness(output).to_dict()
    distribution = pd.DataFrame({"k": np.arange(n + 1)})
    for mode, label in enumerate(MODE_LABELS):
        distribution[f"P_{label}"] = output.mode_distribution(mode)

    residuals = None
    settings = experiment.oracle
    if n < settings.n_max:
        basis = FockBasis(settings.n_max)
        evolved = evolve(state.ket(basis, settings.tail_tol, settings.strict), p, strict=settings.strict)
        gap = float(np.max(np.abs(output.to_ket(basis, settings.tail_tol).amplitudes - evolved.amplitudes)))
        residuals = {"oracle_amplitude_gap": gap}
    return ScenarioResult(payload, {"fock_distribution": distribution}, residuals)


def run_coherent(experiment: ExperimentConfig, state: InputState, p: CouplingParams, jobs: int) -> ScenarioResult:
    triple = state.spec.triple()
    output = evolve_coherent(triple, build_propagator(p))
    payload = {
        "input": triple.to_pairs(),
        "output": output.to_pairs(),
        "mean_photon_numbers": dict(zip(MODE_LABELS, output.mean_photon_numbers.tolist())),
        "total_photon_number": float(np.sum(output.mean_photon_numbers)),
    }
    settings = experiment.oracle
    basis = FockBasis(settings.n_max)
    evolved = evolve(coherent_ket(triple, basis, settings.tail_tol, settings.strict), p, strict=settings.strict)
    infidelity = 1 - evolved.fidelity(coherent_ket(output, basis, settings.tail_tol))
    return ScenarioResult(payload, residuals={"oracle_infidelity": infidelity})


def run_mixture(experiment: ExperimentConfig, state: InputState, p: CouplingParams, jobs: int) -> ScenarioResult:
    masses = state.point_masses()
    if masses is None:
        raise ConfigValidationError(
            f"a '{state.kind}' state has no point-mass representation; use coherent, mixture or sampled thermal",
            field="state.kind",
        )
    propagator = build_propagator(p)
    output = transform_mixture(masses, propagator)
    moments = mixture_moments(output, experiment.n_top)
    payload = {
        "input": masses.to_dict(),
        "output": output.to_dict(),
        "separability": separability_witness(output).to_dict(),
        "mean_photon_numbers": dict(zip(MODE_LABELS, moments.mean_photon_numbers.tolist())),
        "sampler_seed": experiment.seed if state.kind == "thermal" else None,
    }
    residuals = {}
    if masses.has_vacuum_sidebands:
        support = vacuum_sideband_p_reduction(
            [(w, c.amplitudes[PROBE]) for w, c in zip(masses.weights, masses.components)], propagator
        )
        residuals["delta_constraint"] = support.sideband_constraint_residual
        residuals["probe_recovery"] = support.probe_recovery_residual

    settings = experiment.oracle
    basis = FockBasis(settings.n_max)
    evolved = evolve(coherent_mixture_kets(masses, basis, settings.tail_tol, settings.strict), p, strict=settings.strict)
    oracle = measure_moments(evolved, experiment.n_top)
    residuals["oracle_moment_gap"] = float(max(
        np.max(np.abs(moments.hermitian - oracle.hermitian)),
        np.max(np.abs(moments.pair - oracle.pair)),
        np.max(np.abs(moments.number_moments - oracle.number_moments)),
    ))
    return ScenarioResult(payload, residuals=residuals)


def run_verify(experiment: ExperimentConfig, state: Optional[InputState], p: Optional[CouplingParams], jobs: int) -> ScenarioResult:
    report = run_verification_suite(experiment.oracle, experiment.seed)
    failure = None
    if not report.passed:
        failure = "; ".join(f"{c.name}: {c.residual:.3e}" for c in report.failures)
    return ScenarioResult(report.to_dict(), residuals=report.residuals(), failure=failure)


def _sweep_point(moments: MomentSet, p: CouplingParams, phi: np.ndarray) -> Dict[str, float]:
    """Everything a sweep records at one parameter point."""
    output = compute_statistics(moments, p, phi)
    numbers = output.output_moments.mean_photon_numbers
    row = {f"n_{label}": float(value) for label, value in zip(MODE_LABELS, numbers)}
    row["n_total"] = float(np.sum(numbers))
    row["g2"] = output.shared_autocorrelations.get(2, math.nan)
    if output.squeezing is not None:
        for label, value in zip(MODE_LABELS, output.squeezing.minima):
            row[f"S_min_{label}"] = float(value)
    return row


def run_sweep(experiment: ExperimentConfig, state: InputState, p: CouplingParams, jobs: int) -> ScenarioResult:
    moments = state.moments(experiment.n_top)
    if not (moments.vacuum_sidebands or moments.gaussian):
        raise UnsupportedMomentError("sweeps need a Gaussian input or vacuum sidebands")
    axes = experiment.sweep
    grid = list(itertools.product(*(axis.values() for axis in axes)))
    points = []
    for values in grid:
        point = p
        for axis, value in zip(axes, values):
            point = point.with_value(axis.parameter, float(value))
        points.append(point)

    worst = max(points, key=lambda q: q.gt)
    check_validity_bound(worst)

    phi = default_phi_grid(experiment.phi_points)
    logger.info(f"Sweeping {len(points)} points over {[a.parameter for a in axes]} with {jobs} job(s)")
    rows = Parallel(n_jobs=jobs)(delayed(_sweep_point)(moments, point, phi) for point in points)

    axis_columns = {axis.parameter if axis.parameter != "time" else "t": [v[i] for v in grid]
                    for i, axis in enumerate(axes)}
    table = pd.concat([pd.DataFrame(axis_columns), pd.DataFrame(rows)], axis=1)
    axis_names = list(axis_columns)
    number_columns = [f"n_{label}" for label in MODE_LABELS]
    observables = number_columns + ["g2"]
    curves = {"sweep": table[axis_names + observables]}
    squeezing_columns = [f"S_min_{label}" for label in MODE_LABELS]
    if all(column in table for column in squeezing_columns):
        curves["squeezing_minimum"] = table[axis_names + squeezing_columns]
        observables += squeezing_columns
    # plus one file per observable against the axes
    curves.update({column: table[axis_names + [column]] for column in observables})

    totals = table["n_total"].to_numpy()
    payload = {
        "axes": [axis.model_dump() for axis in axes],
        "points": len(points),
        "total_photon_number": {"min": float(totals.min()), "max": float(totals.max())},
        "rows": table.to_dict(orient="records"),
    }
    return ScenarioResult(payload, curves)


HANDLERS: Dict[str, Callable[..., ScenarioResult]] = {
    "propagator-dump": run_propagator_dump,
    "statistics": run_statistics,
    "squeezing": run_squeezing,
    "fock": run_fock,
    "coherent": run_coherent,
    "mixture": run_mixture,
    "verify": run_verify,
    "sweep": run_sweep,
}


def _dedupe(messages: List[str]) -> List[str]:
    return list(dict.fromkeys(messages))


def run(experiment: ExperimentConfig, jobs: int = config.DEFAULT_JOBS) -> Report:
    """Run the configured scenario; warnings raised on the way are recorded in the report."""
    logger.info(f"Running scenario '{experiment.scenario}' (seed {experiment.seed})")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        p = None
        if experiment.parameters is not None:
            p, _ = parse_parameters(experiment.parameters.model_dump(exclude_none=True), strict=experiment.oracle.strict)
        state = None
        if experiment.state is not None:
            state = InputState(experiment.state, experiment.seed)
        result = HANDLERS[experiment.scenario](experiment, state, p, jobs)

    report = Report(
        scenario=experiment.scenario,
        config=experiment.model_dump(mode="json"),
        payload=result.payload,
        seed=experiment.seed,
        residuals=result.residuals,
        warnings=_dedupe([str(w.message) for w in caught]),
        curves=result.curves,
        failure=result.failure,
    )
    logger.info(f"Scenario '{experiment.scenario}' finished with {len(report.warnings)} warning(s)")
    return report
