"""
Cross-validation of the closed-form model against itself and the Fock oracle.

Each check returns a CheckResult holding named residuals, each with its own
tolerance. The suite runs on the standard parameter set g1 = 0.6, g-1 = 0.8
with Delta in {0, 0.5}.
"""
import logging
import math
import time
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

import config
from raman_multiplex.errors import VerificationFailure
from raman_multiplex.fock_oracle import FockBasis, OracleState, evolve, measure_moments, quadrature_variance
from raman_multiplex.photon_statistics import (
    CROSS_PAIRS,
    MODES,
    MomentSet,
    autocorrelation,
    propagate_moments,
    squeezing_factor,
    squeezing_transfer,
)
from raman_multiplex.physical_config import CouplingParams
from raman_multiplex.propagator import (
    ANTI_STOKES,
    PROBE,
    STOKES,
    build_propagator,
    phase_reference_arctan,
    propagator_via_generator,
    propagator_via_modes,
    sin_over_g_series,
    transfer_factors,
)
from raman_multiplex.states import (
    BIPARTITIONS,
    CoherentMixture,
    CoherentTriple,
    Separability,
    binomial_marginal_purity,
    coherent_ket,
    coherent_mixture_kets,
    coherent_moments,
    evolve_coherent,
    fock_ket,
    fock_moments,
    fock_output,
    mixture_moments,
    sample_thermal_mixture,
    separability_witness,
    squeezed_moments,
    squeezed_vacuum_ket,
    thermal_mixture_kets,
    thermal_moments,
    transform_mixture,
    vacuum_sideband_p_reduction,
)

logger = logging.getLogger(__name__)

STANDARD_COUPLINGS = (0.6, 0.8)
STANDARD_DETUNINGS = (0.0, 0.5)
TIME_GRID_POINTS = 16
QUADRATURE_ANGLES = np.linspace(0.0, math.pi, 8, endpoint=False)
# normalized oracle ratios are compared only where <n_q> is this large
ORACLE_RATIO_FLOOR = 1e-4


class OracleSettings(BaseModel):
    """Truncation and tolerance settings for oracle comparisons."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    n_max: int = Field(config.FOCK_N_MAX, ge=1, le=config.FOCK_N_MAX_CEILING)
    # squeezed vacuum at r = 0.3 still holds ~1e-6 on level 10
    squeezed_n_max: int = Field(config.FOCK_N_MAX_CEILING, ge=1, le=config.FOCK_N_MAX_CEILING)
    tail_tol: float = Field(config.TAIL_TOLERANCE, gt=0)
    squeezed_tail_tol: float = Field(1e-8, gt=0)
    tolerance: float = Field(config.VERIFY_TOLERANCE, gt=0)
    strict: bool = config.STRICT_MODE
    thermal_mean: float = Field(0.05, ge=0)
    thermal_samples: int = Field(8, ge=1)
    draws: int = Field(100, ge=1)


@dataclass
class CheckResult:
    criterion: int
    name: str
    residuals: Dict[str, float]
    tolerances: Dict[str, float]
    details: Dict[str, Any] = field(default_factory=dict)
    elapsed: float = 0.0

    @property
    def residual(self) -> float:
        return max(self.residuals.values())

    @property
    def passed(self) -> bool:
        return all(self.residuals[key] <= self.tolerances[key] for key in self.residuals)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "criterion": self.criterion,
            "name": self.name,
            "passed": self.passed,
            "residuals": self.residuals,
            "tolerances": self.tolerances,
            "details": self.details,
        }


@dataclass
class VerificationReport:
    checks: List[CheckResult]
    seed: int
    settings: OracleSettings

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failures(self) -> List[CheckResult]:
        return [check for check in self.checks if not check.passed]

    def residuals(self) -> Dict[str, Dict[str, float]]:
        return {check.name: check.residuals for check in self.checks}

    def raise_on_failure(self):
        if self.failures:
            names = ", ".join(f"{c.name} ({c.residual:.3e})" for c in self.failures)
            raise VerificationFailure(f"verification failed: {names}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "seed": self.seed,
            "settings": self.settings.model_dump(),
            "passed": self.passed,
            "checks": [check.to_dict() for check in self.checks],
        }


def standard_params() -> List[CouplingParams]:
    g_anti, g_stokes = STANDARD_COUPLINGS
    return [CouplingParams(g_anti, g_stokes, delta, 0.0) for delta in STANDARD_DETUNINGS]


def time_grid(p: CouplingParams, points: int = TIME_GRID_POINTS) -> np.ndarray:
    """Evolution times covering g t in [0, pi]."""
    return np.linspace(0.0, math.pi / p.g, points)


def _max_abs(values) -> float:
    values = np.asarray(values)
    return float(np.max(np.abs(values))) if values.size else 0.0


def _ratio(numerator: float, mean: float, order: int, floor: float) -> Optional[float]:
    return numerator / mean ** order if mean > floor else None


# =============================================================================
# PROPAGATOR CHECKS
# =============================================================================

def check_propagator_routes(seed: int, draws: int = 100) -> CheckResult:
    """Unitarity and closed form vs mode decomposition vs generator exponential over random draws."""
    rng = np.random.default_rng(seed)
    unitarity = 0.0
    agreement = 0.0
    for _ in range(draws):
        g_anti, g_stokes = rng.uniform(0.0, 2.0, 2)
        p = CouplingParams(g_anti, g_stokes, rng.uniform(-2.0, 2.0), rng.uniform(0.0, math.pi))
        closed = build_propagator(p)
        unitarity = max(unitarity, closed.unitarity_defect())
        for other in (propagator_via_modes(p), propagator_via_generator(p)):
            agreement = max(agreement, _max_abs(closed.matrix - other.matrix))
    return CheckResult(
        1, "propagator_routes",
        {"unitarity_defect": unitarity, "route_agreement": agreement},
        {"unitarity_defect": 1e-12, "route_agreement": 1e-10},
        {"draws": draws},
    )


def check_degenerate_limits() -> CheckResult:
    """phi_L continuous (mod pi) through Delta = 0; small-gt series matches direct evaluation."""
    g_anti, g_stokes = STANDARD_COUPLINGS
    jump = 0.0
    for t in (0.5, 1.0, 2.5):
        phases = np.array([
            build_propagator(CouplingParams(g_anti, g_stokes, delta, t)).phase_reference
            for delta in np.linspace(-1e-5, 1e-5, 101)
        ])
        steps = (np.diff(phases) + math.pi / 2) % math.pi - math.pi / 2
        jump = max(jump, _max_abs(steps))

    arctan_gap = 0.0
    for delta in (-0.5, 0.0, 0.5):
        for t in (0.2, 0.6, 1.0):
            p = CouplingParams(g_anti, g_stokes, delta, t)
            if p.gt < math.pi / 2:
                arctan_gap = max(arctan_gap, abs(phase_reference_arctan(p) - build_propagator(p).phase_reference))

    t = 1e-7
    series_gap = abs(sin_over_g_series(1.0, t) - math.sin(t))
    tiny = CouplingParams(g_anti, g_stokes, 0.0, 1e-9)
    branch_gap = _max_abs(build_propagator(tiny).matrix - propagator_via_generator(tiny).matrix)
    return CheckResult(
        10, "degenerate_limits",
        {"phase_jump": jump, "arctan_gap": arctan_gap, "series_gap": series_gap, "series_branch_gap": branch_gap},
        {"phase_jump": 1e-6, "arctan_gap": 1e-12, "series_gap": 1e-12, "series_branch_gap": 1e-12},
    )


# =============================================================================
# ORACLE CHECKS
# =============================================================================

@dataclass
class OracleCase:
    label: str
    moments: MomentSet
    ket: Callable[[], OracleState]
    expected_g2: Optional[float] = None


def oracle_cases(settings: OracleSettings, seed: int) -> List[OracleCase]:
    """Test inputs, each with its moment and ket forms on a matching truncation."""
    basis = FockBasis(settings.n_max)
    squeezed_basis = FockBasis(settings.squeezed_n_max)
    tol = settings.tail_tol
    cases = []
    for alpha in (0.5, 0.6 * np.exp(0.3j)):
        triple = CoherentTriple.probe(alpha)
        cases.append(OracleCase(f"coherent_{abs(alpha):.1f}", coherent_moments(triple),
                                lambda triple=triple: coherent_ket(triple, basis, tol, settings.strict), 1.0))
    for n in range(1, 5):
        cases.append(OracleCase(f"fock_{n}", fock_moments(n),
                                lambda n=n: fock_ket(0, n, 0, basis, tol, settings.strict), 1 - 1 / n))

    # higher moments of the truncated squeezed ket, not of the ideal state
    squeezed_ket = squeezed_vacuum_ket(0.3, 0.0, squeezed_basis, settings.squeezed_tail_tol, settings.strict)
    squeezed_input = replace(measure_moments(squeezed_ket), vacuum_sidebands=True)
    cases.append(OracleCase("squeezed_0.3", squeezed_input, lambda: squeezed_ket))

    # wide cutoff: g2 = <n(n-1)>/<n>^2 must equal 2 to rounding
    cases.append(OracleCase("thermal", thermal_moments(settings.thermal_mean, cutoff=squeezed_basis.n_max - 1),
                            lambda: thermal_mixture_kets(settings.thermal_mean, squeezed_basis, tol), 2.0))
    sampled = sample_thermal_mixture(settings.thermal_mean, settings.thermal_samples, seed)
    cases.append(OracleCase("thermal_samples", mixture_moments(sampled),
                            lambda: coherent_mixture_kets(sampled, basis, tol, settings.strict)))
    return cases


def _moment_gap(closed: MomentSet, oracle: MomentSet, orders: int = 2) -> float:
    return max(
        _max_abs(closed.first - oracle.first),
        _max_abs(closed.pair - oracle.pair),
        _max_abs(closed.hermitian - oracle.hermitian),
        _max_abs(closed.number_moments[:, :orders] - oracle.number_moments[:, :orders]),
        _max_abs(closed.cross_number - oracle.cross_number),
    )


def _quadrature_gap(closed: MomentSet, state: OracleState) -> float:
    gap = 0.0
    for q in MODES:
        curve = squeezing_factor(closed.first[q], closed.pair[q, q], closed.hermitian[q, q].real, QUADRATURE_ANGLES)
        for phi, value in zip(QUADRATURE_ANGLES, curve):
            gap = max(gap, abs(value + 1 - quadrature_variance(state, q, phi)))
    return gap


def check_oracle_suite(settings: OracleSettings, seed: int) -> List[CheckResult]:
    """Moments, autocorrelations, cross-correlations and conservation over the t grid."""
    moment_gap = quadrature_gap = 0.0
    g_spread = g_oracle_gap = g_expected_gap = 0.0
    cross_gap = 0.0
    closed_drift = oracle_drift = 0.0

    for p0 in standard_params():
        for case in oracle_cases(settings, seed):
            state0 = case.ket()
            input_probe = case.moments.probe_number_moments
            shared = {n: autocorrelation(input_probe, n).value for n in (2, 3, 4)}
            if case.expected_g2 is not None:
                g_expected_gap = max(g_expected_gap, abs(shared[2] - case.expected_g2))

            closed_totals, oracle_totals = [], []
            for t in time_grid(p0):
                p = p0.at_time(t)
                closed = propagate_moments(case.moments, build_propagator(p))
                evolved = evolve(state0, p, strict=settings.strict)
                oracle = measure_moments(evolved)

                moment_gap = max(moment_gap, _moment_gap(closed, oracle))
                quadrature_gap = max(quadrature_gap, _quadrature_gap(closed, evolved))
                closed_totals.append(closed.total_photon_number)
                oracle_totals.append(oracle.total_photon_number)

                closed_numbers = closed.mean_photon_numbers
                oracle_numbers = oracle.mean_photon_numbers
                for q in MODES:
                    for n in (2, 3, 4):
                        value = _ratio(closed.number_moment(q, n), closed_numbers[q], n, config.NORMALIZATION_FLOOR)
                        if value is not None:
                            g_spread = max(g_spread, abs(value - shared[n]))
                    value = _ratio(oracle.number_moment(q, 2), oracle_numbers[q], 2, ORACLE_RATIO_FLOOR)
                    if value is not None:
                        g_oracle_gap = max(g_oracle_gap, abs(value - shared[2]))
                for k, l in CROSS_PAIRS:
                    i, j = k + 1, l + 1
                    if min(oracle_numbers[i], oracle_numbers[j]) > ORACLE_RATIO_FLOOR:
                        value = oracle.cross_number[i, j] / (oracle_numbers[i] * oracle_numbers[j])
                        cross_gap = max(cross_gap, abs(value - shared[2]))

            closed_drift = max(closed_drift, _max_abs(np.array(closed_totals) - closed_totals[0]))
            oracle_drift = max(oracle_drift, _max_abs(np.array(oracle_totals) - oracle_totals[0]))

    tol = settings.tolerance
    return [
        CheckResult(2, "oracle_moments",
                    {"moment_gap": moment_gap, "quadrature_gap": quadrature_gap},
                    {"moment_gap": tol, "quadrature_gap": tol}),
        CheckResult(3, "autocorrelation_multiplexing",
                    {"mode_spread": g_spread, "oracle_gap": g_oracle_gap, "expected_gap": g_expected_gap},
                    {"mode_spread": 1e-9, "oracle_gap": 1e-9, "expected_gap": 1e-9}),
        CheckResult(4, "cross_correlation", {"oracle_gap": cross_gap}, {"oracle_gap": 1e-9}),
        CheckResult(5, "photon_number_conservation",
                    {"closed_form_drift": closed_drift, "oracle_drift": oracle_drift},
                    {"closed_form_drift": 1e-10, "oracle_drift": 1e-10}),
    ]


def check_coherent_multiplexing(settings: OracleSettings) -> CheckResult:
    basis = FockBasis(settings.n_max)
    worst = 0.0
    for p0 in standard_params():
        for alpha in (0.5, 0.6 * np.exp(0.3j)):
            triple = CoherentTriple.probe(alpha)
            initial = coherent_ket(triple, basis, settings.tail_tol, settings.strict)
            for t in time_grid(p0):
                p = p0.at_time(t)
                expected = coherent_ket(evolve_coherent(triple, build_propagator(p)), basis, settings.tail_tol)
                evolved = evolve(initial, p, strict=settings.strict)
                worst = max(worst, 1 - evolved.fidelity(expected))
    return CheckResult(6, "coherent_multiplexing", {"infidelity": worst}, {"infidelity": settings.tolerance})


def check_fock_tripartite(settings: OracleSettings) -> CheckResult:
    basis = FockBasis(settings.n_max)
    amplitude_gap = 0.0
    for p0 in standard_params():
        for n in range(1, 5):
            initial = fock_ket(0, n, 0, basis, settings.tail_tol, settings.strict)
            for t in time_grid(p0):
                p = p0.at_time(t)
                table = fock_output(n, build_propagator(p)).to_ket(basis, settings.tail_tol)
                evolved = evolve(initial, p, strict=settings.strict)
                amplitude_gap = max(amplitude_gap, _max_abs(table.amplitudes - evolved.amplitudes))

    g_anti, g_stokes = STANDARD_COUPLINGS
    p = CouplingParams(g_anti, g_stokes, 0.0, (math.pi / 2) / math.hypot(g_anti, g_stokes))
    purity_gap = 0.0
    not_entangled = 0
    for n in range(1, 5):
        output = fock_output(n, build_propagator(p))
        result = separability_witness(output)
        if result.classification is not Separability.ENTANGLED:
            not_entangled += 1
        for label, mode in BIPARTITIONS.items():
            expected = binomial_marginal_purity(n, output.shares[mode])
            purity_gap = max(purity_gap, abs(result.purities[label] - expected))
    tol = settings.tolerance
    return CheckResult(
        7, "fock_tripartite",
        {"amplitude_gap": amplitude_gap, "purity_gap": purity_gap, "not_entangled": float(not_entangled)},
        {"amplitude_gap": tol, "purity_gap": tol, "not_entangled": 0.0},
    )


def check_squeezing_transfer(settings: OracleSettings) -> CheckResult:
    basis = FockBasis(settings.squeezed_n_max)
    squeezed = squeezed_moments(0.3)
    coherent = coherent_moments(CoherentTriple.probe(0.5))
    initial = squeezed_vacuum_ket(0.3, 0.0, basis, settings.squeezed_tail_tol, settings.strict)
    phi = QUADRATURE_ANGLES
    input_curve = squeezing_factor(0.0, squeezed.pair[PROBE, PROBE], squeezed.hermitian[PROBE, PROBE].real, phi)

    closed_gap = oracle_gap = relation_gap = coherent_sidebands = 0.0
    for p0 in standard_params():
        for t in time_grid(p0)[1:]:
            p = p0.at_time(t)
            factors = transfer_factors(p)
            propagator = build_propagator(p)
            output = propagate_moments(squeezed, propagator)
            evolved = evolve(initial, p, strict=settings.strict)
            shifts = {STOKES: math.pi / 2, PROBE: propagator.phase_reference, ANTI_STOKES: math.pi / 2}
            for q, shift in shifts.items():
                expected = factors[q] * input_curve
                shifted = phi + shift
                closed = squeezing_factor(output.first[q], output.pair[q, q], output.hermitian[q, q].real, shifted)
                oracle = np.array([quadrature_variance(evolved, q, angle) - 1 for angle in shifted])
                closed_gap = max(closed_gap, _max_abs(closed - expected))
                oracle_gap = max(oracle_gap, _max_abs(oracle - expected))

            relation_gap = max(relation_gap, squeezing_transfer(squeezed, p).relation_residual)
            coherent_curves = squeezing_transfer(coherent, p).curves
            coherent_sidebands = max(coherent_sidebands, _max_abs(coherent_curves[[STOKES, ANTI_STOKES]]))

    residuals = {"closed_form_gap": closed_gap, "oracle_gap": oracle_gap,
                 "normalized_relation_gap": relation_gap, "coherent_sideband_squeezing": coherent_sidebands}
    return CheckResult(8, "squeezing_transfer", residuals, {key: settings.tolerance for key in residuals})


def check_mixture_transport(settings: OracleSettings, seed: int) -> CheckResult:
    basis = FockBasis(settings.n_max)
    mixtures = [
        CoherentMixture([0.5, 0.5], (CoherentTriple.probe(0.5), CoherentTriple.probe(-0.5))),
        sample_thermal_mixture(settings.thermal_mean, settings.thermal_samples, seed),
    ]
    moment_gap = weight_gap = constraint = 0.0
    negative_weights = 0
    for p0 in standard_params():
        for mixture in mixtures:
            initial = coherent_mixture_kets(mixture, basis, settings.tail_tol, settings.strict)
            probe_support = [(w, c.amplitudes[PROBE]) for w, c in zip(mixture.weights, mixture.components)]
            for t in time_grid(p0):
                p = p0.at_time(t)
                propagator = build_propagator(p)
                transported = transform_mixture(mixture, propagator)
                weight_gap = max(weight_gap, _max_abs(transported.weights - mixture.weights))
                negative_weights += int(np.sum(transported.weights < 0))
                closed = mixture_moments(transported)
                oracle = measure_moments(evolve(initial, p, strict=settings.strict))
                moment_gap = max(moment_gap, _moment_gap(closed, oracle, orders=closed.n_top))
                support = vacuum_sideband_p_reduction(probe_support, propagator)
                constraint = max(constraint, support.sideband_constraint_residual)

    tol = settings.tolerance
    return CheckResult(
        9, "mixture_transport",
        {"moment_gap": moment_gap, "weight_gap": weight_gap,
         "negative_weights": float(negative_weights), "delta_constraint": constraint},
        {"moment_gap": tol, "weight_gap": 0.0, "negative_weights": 0.0, "delta_constraint": 1e-12},
    )


def run_verification_suite(settings: Optional[OracleSettings] = None, seed: int = 0) -> VerificationReport:
    """Run every check; failures are reported, not raised."""
    settings = settings or OracleSettings()
    steps = (
        lambda: [check_propagator_routes(seed, settings.draws)],
        lambda: check_oracle_suite(settings, seed),
        lambda: [check_coherent_multiplexing(settings)],
        lambda: [check_fock_tripartite(settings)],
        lambda: [check_squeezing_transfer(settings)],
        lambda: [check_mixture_transport(settings, seed)],
        lambda: [check_degenerate_limits()],
    )
    checks: List[CheckResult] = []
    for step in steps:
        started = time.perf_counter()
        produced = step()
        elapsed = time.perf_counter() - started
        for check in produced:
            check.elapsed = elapsed / len(produced)
            level = logging.INFO if check.passed else logging.ERROR
            logger.log(level, f"[{check.criterion}] {check.name}: worst residual {check.residual:.3e}")
        checks.extend(produced)
    checks.sort(key=lambda c: c.criterion)
    return VerificationReport(checks, seed, settings)
