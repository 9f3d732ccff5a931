"""
Photon statistics of the three output modes from closed-form moment propagation.

Moments are carried in a MomentSet (storage order Stokes, probe, anti-Stokes).
Because b(t) = U b(0), first and second moments transform linearly for any
input. Higher normally ordered moments are produced in two situations only:
the sidebands start in vacuum (every output mode is then a rescaled copy of
the input probe), or the input is Gaussian (Wick closure over the propagated
first and second moments).
"""
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

import config
from raman_multiplex.errors import (
    ConfigValidationError,
    MomentOrderError,
    UndefinedCorrelationError,
    UnsupportedMomentError,
    VerificationFailure,
)
from raman_multiplex.physical_config import CouplingParams
from raman_multiplex.propagator import (
    ANTI_STOKES,
    MODE_LABELS,
    PROBE,
    STOKES,
    PropagatorMatrix,
    build_propagator,
    sin_over_g,
    transfer_factors,
)

logger = logging.getLogger(__name__)

MODES = (STOKES, PROBE, ANTI_STOKES)
# (k, l) pairs of the two-mode cross-correlations, as sideband orders
CROSS_PAIRS = ((0, 1), (0, -1), (1, -1))


@dataclass(frozen=True, eq=False)
class MomentSet:
    """First and second moments of the three modes plus tracked normally ordered moments."""

    first: np.ndarray  # <b_q>
    pair: np.ndarray  # <b_q b_q'>
    hermitian: np.ndarray  # <b_q^dag b_q'>
    number_moments: Optional[np.ndarray] = None  # [q, n-1] = <b_q^dag^n b_q^n>
    cross_number: Optional[np.ndarray] = None  # <n_k n_l>, k != l
    n_top: int = config.N_TOP
    gaussian: bool = False
    vacuum_sidebands: bool = False

    def __post_init__(self):
        object.__setattr__(self, "first", np.asarray(self.first, dtype=complex).reshape(3))
        object.__setattr__(self, "pair", np.asarray(self.pair, dtype=complex).reshape(3, 3))
        object.__setattr__(self, "hermitian", np.asarray(self.hermitian, dtype=complex).reshape(3, 3))
        if self.number_moments is not None:
            number = np.asarray(self.number_moments, dtype=float)
            if number.shape != (3, self.n_top):
                raise MomentOrderError(f"number_moments must have shape (3, {self.n_top}), got {number.shape}")
            object.__setattr__(self, "number_moments", number)
        if self.cross_number is not None:
            object.__setattr__(self, "cross_number", np.asarray(self.cross_number, dtype=float).reshape(3, 3))

    @classmethod
    def vacuum(cls, n_top: int = config.N_TOP) -> "MomentSet":
        zeros = np.zeros((3, 3))
        return cls(np.zeros(3), zeros, zeros, np.zeros((3, n_top)), zeros, n_top, gaussian=True, vacuum_sidebands=True)

    @classmethod
    def probe_only(cls, mean: complex, pair: complex, number_moments: Sequence[float],
                   gaussian: bool = False) -> "MomentSet":
        """Input with an arbitrary probe state and both sidebands in vacuum."""
        number_moments = np.asarray(number_moments, dtype=float)
        n_top = len(number_moments)
        first = np.zeros(3, dtype=complex)
        first[PROBE] = mean
        pair_matrix = np.zeros((3, 3), dtype=complex)
        pair_matrix[PROBE, PROBE] = pair
        hermitian = np.zeros((3, 3), dtype=complex)
        hermitian[PROBE, PROBE] = number_moments[0]
        number = np.zeros((3, n_top))
        number[PROBE] = number_moments
        return cls(first, pair_matrix, hermitian, number, np.zeros((3, 3)), n_top,
                   gaussian=gaussian, vacuum_sidebands=True)

    @property
    def mean_photon_numbers(self) -> np.ndarray:
        return np.real(np.diag(self.hermitian))

    @property
    def total_photon_number(self) -> float:
        return float(np.sum(self.mean_photon_numbers))

    @property
    def probe_number_moments(self) -> np.ndarray:
        if self.number_moments is None:
            raise UnsupportedMomentError("number moments are not tracked for this input")
        return self.number_moments[PROBE]

    def number_moment(self, mode: int, order: int) -> float:
        if self.number_moments is None:
            raise UnsupportedMomentError("number moments are not tracked for this input")
        if not 1 <= order <= self.n_top:
            raise MomentOrderError(f"order {order} outside 1..{self.n_top}")
        return float(self.number_moments[mode, order - 1])

    def validate(self, tol: float = 1e-9) -> "MomentSet":
        """Check <n_q> >= 0, positive semidefinite <b^dag b> and Cauchy-Schwarz."""
        if np.max(np.abs(self.hermitian - self.hermitian.conj().T)) > tol:
            raise ConfigValidationError("<b_q^dag b_q'> is not Hermitian", field="hermitian")
        if np.max(np.abs(self.pair - self.pair.T)) > tol:
            raise ConfigValidationError("<b_q b_q'> is not symmetric", field="pair")
        numbers = self.mean_photon_numbers
        if np.any(numbers < -tol):
            raise ConfigValidationError(f"negative mean photon number {numbers}", field="hermitian")
        if np.min(np.linalg.eigvalsh(self.hermitian)) < -tol:
            raise ConfigValidationError("<b_q^dag b_q'> is not positive semidefinite", field="hermitian")
        bound = np.outer(numbers, numbers)
        if np.any(np.abs(self.hermitian) ** 2 > bound + tol):
            raise ConfigValidationError("Cauchy-Schwarz bound violated", field="hermitian")
        return self

    def to_dict(self) -> Dict[str, Any]:
        def pairs(array):
            return np.stack([np.real(array), np.imag(array)], axis=-1).tolist()

        return {
            "first": pairs(self.first),
            "pair": pairs(self.pair),
            "hermitian": pairs(self.hermitian),
            "number_moments": None if self.number_moments is None else self.number_moments.tolist(),
            "cross_number": None if self.cross_number is None else self.cross_number.tolist(),
            "n_top": self.n_top,
            "gaussian": self.gaussian,
            "vacuum_sidebands": self.vacuum_sidebands,
        }


def gaussian_normal_moment(first: np.ndarray, pair: np.ndarray, hermitian: np.ndarray,
                           operators: Sequence[Tuple[int, bool]]) -> complex:
    """
    Normally ordered moment of a Gaussian state.

    `operators` lists (mode, is_creation) with every creation operator before
    every annihilation operator. The moment is the sum over all ways of
    leaving operators as their mean or contracting them in pairs with the
    centered second moments.
    """
    operators = tuple(operators)
    seen_annihilation = False
    for _, is_creation in operators:
        if is_creation and seen_annihilation:
            raise UnsupportedMomentError("operators must be normally ordered")
        seen_annihilation = seen_annihilation or not is_creation

    centered_pair = pair - np.outer(first, first)
    centered_hermitian = hermitian - np.outer(first.conj(), first)

    def mean(op):
        mode, is_creation = op
        return first[mode].conjugate() if is_creation else first[mode]

    def contraction(earlier, later):
        (mode_a, creation_a), (mode_b, creation_b) = earlier, later
        if creation_a and creation_b:
            return centered_pair[mode_b, mode_a].conjugate()
        if not creation_a and not creation_b:
            return centered_pair[mode_a, mode_b]
        return centered_hermitian[mode_a, mode_b]

    @lru_cache(maxsize=None)
    def expand(remaining: Tuple[int, ...]) -> complex:
        if not remaining:
            return 1.0 + 0.0j
        head, rest = remaining[0], remaining[1:]
        total = mean(operators[head]) * expand(rest)
        for position, partner in enumerate(rest):
            total += contraction(operators[head], operators[partner]) * expand(rest[:position] + rest[position + 1:])
        return total

    return complex(expand(tuple(range(len(operators)))))


def _gaussian_number_moments(first, pair, hermitian, n_top):
    number = np.zeros((3, n_top))
    for mode in MODES:
        for order in range(1, n_top + 1):
            operators = [(mode, True)] * order + [(mode, False)] * order
            number[mode, order - 1] = gaussian_normal_moment(first, pair, hermitian, operators).real
    cross = np.zeros((3, 3))
    for k in MODES:
        for l in MODES:
            if k != l:
                # n_k and n_l commute, so <n_k n_l> is already normally ordered
                operators = [(k, True), (l, True), (k, False), (l, False)]
                cross[k, l] = gaussian_normal_moment(first, pair, hermitian, operators).real
    return number, cross


def propagate_moments(moments: MomentSet, propagator: PropagatorMatrix) -> MomentSet:
    """Transform every tracked moment through b(t) = U b(0)."""
    u = propagator.matrix
    first = u @ moments.first
    pair = u @ moments.pair @ u.T
    hermitian = u.conj() @ moments.hermitian @ u.T

    if moments.number_moments is None:
        return MomentSet(first, pair, hermitian, None, None, moments.n_top, gaussian=moments.gaussian)

    if moments.vacuum_sidebands:
        shares = np.abs(propagator.probe_column) ** 2
        orders = np.arange(1, moments.n_top + 1)
        probe = moments.number_moments[PROBE]
        number = shares[:, None] ** orders[None, :] * probe[None, :]
        cross = np.outer(shares, shares) * (probe[1] if moments.n_top >= 2 else 0.0)
        np.fill_diagonal(cross, 0.0)
    elif moments.gaussian:
        number, cross = _gaussian_number_moments(first, pair, hermitian, moments.n_top)
    else:
        raise UnsupportedMomentError(
            "higher-order moments need vacuum sidebands or a Gaussian input; "
            "drop number_moments to propagate first and second moments only"
        )
    return MomentSet(first, pair, hermitian, number, cross, moments.n_top, gaussian=moments.gaussian)


def photon_moments_vacuum_sidebands(input_probe: Sequence[float], p: CouplingParams, order: int) -> np.ndarray:
    """<b_q^dag^n b_q^n> for all three output modes when the sidebands start in vacuum."""
    input_probe = np.asarray(input_probe, dtype=float)
    if not 1 <= order <= len(input_probe):
        raise MomentOrderError(f"order {order} outside 1..{len(input_probe)}")
    s = sin_over_g(p.g, p.evolution_time)
    factors = np.array([
        (p.g_stokes * s) ** (2 * order),
        (1.0 - (p.g_c * s) ** 2) ** order,
        (p.g_anti * s) ** (2 * order),
    ])
    return factors * input_probe[order - 1]


@dataclass(frozen=True)
class SharedCorrelation:
    """A normalized correlation that takes the same value in every output mode."""

    order: int
    value: float
    modes: Tuple[str, ...] = MODE_LABELS

    def for_mode(self, mode: int) -> float:
        return self.value


def autocorrelation(input_probe: Sequence[float], order: int) -> SharedCorrelation:
    """g^(n) of the input probe, replicated unchanged into all three output modes."""
    input_probe = np.asarray(input_probe, dtype=float)
    if not 1 <= order <= len(input_probe):
        raise MomentOrderError(f"order {order} outside 1..{len(input_probe)}")
    mean_number = input_probe[0]
    if mean_number <= 0:
        raise UndefinedCorrelationError("g^(n) is undefined for an input probe with <n_0> = 0")
    return SharedCorrelation(order, float(input_probe[order - 1] / mean_number ** order))


def cross_correlation(input_probe: Sequence[float]) -> Dict[Tuple[int, int], float]:
    """g_kl^(2) for (0,1), (0,-1), (1,-1); all equal the probe's g^(2)."""
    value = autocorrelation(input_probe, 2).value
    return {pair: value for pair in CROSS_PAIRS}


def mode_autocorrelations(moments: MomentSet, order: int) -> np.ndarray:
    """g_q^(n) computed per mode from (propagated) moments; NaN where <n_q> vanishes."""
    result = np.full(3, np.nan)
    for mode in MODES:
        mean_number = moments.number_moment(mode, 1)
        if mean_number > config.NORMALIZATION_FLOOR:
            result[mode] = moments.number_moment(mode, order) / mean_number ** order
    return result


def mode_cross_correlations(moments: MomentSet) -> Dict[Tuple[int, int], float]:
    """<n_k n_l> / (<n_k><n_l>) from (propagated) moments; NaN where undefined."""
    if moments.cross_number is None:
        raise UnsupportedMomentError("cross-number moments are not tracked for this input")
    numbers = moments.mean_photon_numbers
    result = {}
    for k, l in CROSS_PAIRS:
        i, j = k + 1, l + 1
        defined = min(numbers[i], numbers[j]) > config.NORMALIZATION_FLOOR
        result[(k, l)] = moments.cross_number[i, j] / (numbers[i] * numbers[j]) if defined else math.nan
    return result


def classify_photon_statistics(g2: float, tol: float = 1e-9) -> str:
    if g2 < 1 - tol:
        return "sub-poissonian"
    if g2 > 1 + tol:
        return "super-poissonian"
    return "poissonian"


def squeezing_factor(mean: complex, pair: complex, number: float, phi) -> np.ndarray:
    """S(phi) = 2[<b^dag b> - |<b>|^2] + [(<b^2> - <b>^2) e^{-2i phi} + c.c.]; variance of X_phi minus 1."""
    phi = np.asarray(phi, dtype=float)
    anomalous = pair - mean ** 2
    return 2 * (np.real(number) - abs(mean) ** 2) + 2 * np.real(anomalous * np.exp(-2j * phi))


def squeezing_minimum(mean: complex, pair: complex, number: float) -> Tuple[float, float]:
    """Closed-form (min S, argmin phi in [0, pi)); S is a sinusoid in 2 phi."""
    anomalous = pair - mean ** 2
    minimum = 2 * (np.real(number) - abs(mean) ** 2) - 2 * abs(anomalous)
    phase = ((np.angle(anomalous) - math.pi) / 2) % math.pi
    return float(minimum), float(phase)


def grid_minimum(phi: np.ndarray, curve: np.ndarray) -> Tuple[float, float]:
    """Minimum of a pi-periodic curve on a uniform grid, refined by a three-point parabola."""
    index = int(np.argmin(curve))
    step = phi[1] - phi[0]
    left, centre, right = curve[index - 1], curve[index], curve[(index + 1) % len(curve)]
    curvature = left - 2 * centre + right
    offset = 0.5 * (left - right) / curvature if curvature > 0 else 0.0
    value = centre - 0.25 * (left - right) * offset
    return float(value), float((phi[index] + offset * step) % math.pi)


def default_phi_grid(points: int = config.PHI_GRID_POINTS) -> np.ndarray:
    return np.linspace(0.0, math.pi, points, endpoint=False)


def squeezing_curves(moments: MomentSet, phi: np.ndarray) -> np.ndarray:
    """S_q(phi) for all three modes of an arbitrary moment set, shape (3, len(phi))."""
    return np.vstack([
        squeezing_factor(moments.first[q], moments.pair[q, q], moments.hermitian[q, q].real, phi)
        for q in MODES
    ])


@dataclass(frozen=True, eq=False)
class SqueezingReport:
    phi: np.ndarray
    input_curve: np.ndarray
    curves: np.ndarray  # (3, len(phi))
    minima: np.ndarray
    minimizing_phases: np.ndarray
    closed_form_minima: np.ndarray
    closed_form_phases: np.ndarray
    normalized: np.ndarray  # NaN where <n_q> is below the normalization floor
    mean_photon_numbers: np.ndarray
    phase_reference: float
    transfer_factors: np.ndarray
    relation_residual: float
    min_variance: float

    def normalized_factor(self, mode: int) -> np.ndarray:
        if self.mean_photon_numbers[mode] <= config.NORMALIZATION_FLOOR:
            raise UndefinedCorrelationError(
                f"s_q undefined for {MODE_LABELS[mode]}: <n> = {self.mean_photon_numbers[mode]:.3e}"
            )
        return self.normalized[mode]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "phi": self.phi,
            "S_-1": self.curves[STOKES],
            "S_0": self.curves[PROBE],
            "S_1": self.curves[ANTI_STOKES],
        })

    def to_dict(self) -> Dict[str, Any]:
        return {
            "phase_reference": self.phase_reference,
            "transfer_factors": self.transfer_factors.tolist(),
            "input_minimum": float(np.min(self.input_curve)),
            "minima": dict(zip(MODE_LABELS, self.minima.tolist())),
            "minimizing_phases": dict(zip(MODE_LABELS, self.minimizing_phases.tolist())),
            "closed_form_minima": dict(zip(MODE_LABELS, self.closed_form_minima.tolist())),
            "closed_form_phases": dict(zip(MODE_LABELS, self.closed_form_phases.tolist())),
            "mean_photon_numbers": dict(zip(MODE_LABELS, self.mean_photon_numbers.tolist())),
            "normalized_relation_residual": self.relation_residual,
            "min_quadrature_variance": self.min_variance,
        }


def squeezing_transfer(moments: MomentSet, p: CouplingParams, phi: Optional[np.ndarray] = None) -> SqueezingReport:
    """Output squeezing curves of all modes from the input probe's first and second moments."""
    if not moments.vacuum_sidebands:
        raise UnsupportedMomentError("squeezing transfer assumes vacuum sidebands at the input")
    phi = default_phi_grid() if phi is None else np.asarray(phi, dtype=float)

    mean = moments.first[PROBE]
    pair = moments.pair[PROBE, PROBE]
    number = moments.hermitian[PROBE, PROBE].real

    def input_factor(angle):
        return squeezing_factor(mean, pair, number, angle)

    input_curve = input_factor(phi)
    if np.min(input_curve) + 1 < -1e-12:
        raise ConfigValidationError("input quadrature variance is negative", field="pair")

    propagator = build_propagator(p)
    phase_reference = propagator.phase_reference
    factors = transfer_factors(p)
    shifts = np.array([math.pi / 2, phase_reference, math.pi / 2])

    def output_factor(mode, angle):
        return factors[mode] * input_factor(np.asarray(angle) - shifts[mode])

    curves = np.vstack([output_factor(q, phi) for q in MODES])
    grid = [grid_minimum(phi, curves[q]) for q in MODES]
    input_min, input_phase = squeezing_minimum(mean, pair, number)

    numbers = factors * number
    normalized = np.full_like(curves, np.nan)

    # s_q(phi + shift_q) = s_0^in(phi), checked on moments propagated through U
    output = propagate_moments(moments, propagator)
    output_numbers = np.real(np.diag(output.hermitian))
    relation_residual = 0.0
    for q in MODES:
        if numbers[q] <= config.NORMALIZATION_FLOOR:
            continue
        normalized[q] = curves[q] / numbers[q]
        if number > config.NORMALIZATION_FLOOR and output_numbers[q] > config.NORMALIZATION_FLOOR:
            propagated = squeezing_factor(output.first[q], output.pair[q, q], output_numbers[q], phi + shifts[q])
            gap = np.abs(propagated / output_numbers[q] - input_curve / number)
            relation_residual = max(relation_residual, float(np.max(gap)))

    if relation_residual > config.VERIFY_TOLERANCE:
        raise VerificationFailure(f"normalized squeezing relations broken by {relation_residual:.3e}")

    min_variance = float(np.min(curves) + 1)
    return SqueezingReport(
        phi=phi,
        input_curve=input_curve,
        curves=curves,
        minima=np.array([value for value, _ in grid]),
        minimizing_phases=np.array([phase for _, phase in grid]),
        closed_form_minima=factors * input_min,
        closed_form_phases=(input_phase + shifts) % math.pi,
        normalized=normalized,
        mean_photon_numbers=numbers,
        phase_reference=phase_reference,
        transfer_factors=factors,
        relation_residual=relation_residual,
        min_variance=min_variance,
    )


@dataclass(frozen=True, eq=False)
class StatisticsReport:
    params: CouplingParams
    input_moments: MomentSet
    output_moments: MomentSet
    autocorrelations: Dict[int, np.ndarray]
    shared_autocorrelations: Dict[int, float] = field(default_factory=dict)
    cross_correlations: Dict[Tuple[int, int], float] = field(default_factory=dict)
    squeezing: Optional[SqueezingReport] = None

    @property
    def classification(self) -> Optional[str]:
        g2 = self.shared_autocorrelations.get(2)
        return None if g2 is None else classify_photon_statistics(g2)

    def to_dict(self) -> Dict[str, Any]:
        def finite(values):
            return [None if not np.isfinite(v) else float(v) for v in values]

        return {
            "params": self.params.to_dict(),
            "input": self.input_moments.to_dict(),
            "mean_photon_numbers": dict(zip(MODE_LABELS, self.output_moments.mean_photon_numbers.tolist())),
            "total_photon_number": self.output_moments.total_photon_number,
            "autocorrelations": {f"g{order}": dict(zip(MODE_LABELS, finite(values)))
                                 for order, values in self.autocorrelations.items()},
            "shared_autocorrelations": {f"g{order}": value for order, value in self.shared_autocorrelations.items()},
            "cross_correlations": {f"{k},{l}": (None if not np.isfinite(v) else float(v))
                                   for (k, l), v in self.cross_correlations.items()},
            "classification": self.classification,
            "squeezing": None if self.squeezing is None else self.squeezing.to_dict(),
        }


def compute_statistics(moments: MomentSet, p: CouplingParams, phi: Optional[np.ndarray] = None,
                       output: Optional[MomentSet] = None) -> StatisticsReport:
    """
    Propagate `moments` and collect every statistic the model defines.

    `output` may be supplied when the output moments were obtained another
    way (point-mass transport of a mixture with populated sidebands).
    """
    if output is None:
        output = propagate_moments(moments, build_propagator(p))
    autocorrelations = {}
    cross = {}
    if output.number_moments is not None:
        autocorrelations = {order: mode_autocorrelations(output, order) for order in range(2, moments.n_top + 1)}
        cross = mode_cross_correlations(output)

    shared = {}
    squeezing = None
    if moments.vacuum_sidebands:
        probe = moments.probe_number_moments
        if probe[0] > 0:
            shared = {order: autocorrelation(probe, order).value for order in range(2, moments.n_top + 1)}
        squeezing = squeezing_transfer(moments, p, phi)

    logger.info(f"Computed statistics at g*t = {p.gt:.4g}, total <n> = {output.total_photon_number:.6g}")
    return StatisticsReport(p, moments, output, autocorrelations, shared, cross, squeezing)
