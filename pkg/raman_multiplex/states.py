"""
Input states, their closed-form evolution and the structure of the outputs.

Every state family has two faces: a MomentSet for the statistics module and
a truncated ket (or ket mixture) for the Fock oracle. Classical inputs are
finite point-mass coherent mixtures; transporting each point mass through U
is the whole P-representation transform.
"""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Annotated, Any, Dict, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, ValidationError, field_validator, model_validator
from scipy.special import comb, gammaln
from scipy.stats import binom

import config
from raman_multiplex.errors import ConfigValidationError, config_error_from_validation
from raman_multiplex.fock_oracle import FockBasis, KetMixture, TruncatedState
from raman_multiplex.photon_statistics import MomentSet, gaussian_normal_moment
from raman_multiplex.propagator import ANTI_STOKES, MODE_LABELS, PROBE, STOKES, PropagatorMatrix

logger = logging.getLogger(__name__)

MODES = (STOKES, PROBE, ANTI_STOKES)
WEIGHT_TOLERANCE = 1e-12
PURITY_THRESHOLD = 1 - 1e-12

# Bipartitions (single mode | other two) by label
BIPARTITIONS = {
    "stokes|probe,anti_stokes": STOKES,
    "probe|stokes,anti_stokes": PROBE,
    "anti_stokes|stokes,probe": ANTI_STOKES,
}


def complex_from_pair(pair: Sequence[float]) -> complex:
    re, im = pair
    return complex(re, im)


def complex_to_pair(z: complex) -> List[float]:
    return [float(np.real(z)), float(np.imag(z))]


# =============================================================================
# COHERENT STATES AND POINT-MASS MIXTURES
# =============================================================================

@dataclass(frozen=True, eq=False)
class CoherentTriple:
    """Product coherent state |a_-1>|a_0>|a_1>, storage order."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amplitudes = np.array(self.amplitudes, dtype=complex).reshape(3)
        if not np.all(np.isfinite(amplitudes)):
            raise ConfigValidationError("coherent amplitudes must be finite", field="amplitudes")
        amplitudes.setflags(write=False)
        object.__setattr__(self, "amplitudes", amplitudes)

    @classmethod
    def probe(cls, alpha: complex) -> "CoherentTriple":
        return cls(np.array([0.0, alpha, 0.0], dtype=complex))

    @property
    def mean_photon_numbers(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    @property
    def has_vacuum_sidebands(self) -> bool:
        return self.amplitudes[STOKES] == 0 and self.amplitudes[ANTI_STOKES] == 0

    def to_pairs(self) -> List[List[float]]:
        return [complex_to_pair(a) for a in self.amplitudes]


@dataclass(frozen=True, eq=False)
class CoherentMixture:
    """Finite point-mass P-function: sum_i p_i |alpha_i><alpha_i|."""

    weights: np.ndarray
    components: Tuple[CoherentTriple, ...]

    def __post_init__(self):
        weights = np.array(self.weights, dtype=float).reshape(-1)
        components = tuple(self.components)
        if len(weights) != len(components) or not components:
            raise ConfigValidationError("need one weight per component and at least one component", field="components")
        if np.any(weights <= 0):
            raise ConfigValidationError("mixture weights must be strictly positive", field="weights")
        if abs(weights.sum() - 1) > WEIGHT_TOLERANCE:
            raise ConfigValidationError(f"mixture weights sum to {weights.sum():.15g}, not 1", field="weights")
        weights.setflags(write=False)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "components", components)

    @classmethod
    def single(cls, triple: CoherentTriple) -> "CoherentMixture":
        return cls(np.ones(1), (triple,))

    @property
    def amplitude_table(self) -> np.ndarray:
        return np.vstack([c.amplitudes for c in self.components])

    @property
    def has_vacuum_sidebands(self) -> bool:
        return all(c.has_vacuum_sidebands for c in self.components)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "components": [
                {"weight": float(w), "amplitudes": c.to_pairs()}
                for w, c in zip(self.weights, self.components)
            ]
        }


def evolve_coherent(state: CoherentTriple, propagator: PropagatorMatrix) -> CoherentTriple:
    """alpha_q(t) = sum_q' u_qq' alpha_q'(0)."""
    return CoherentTriple(propagator.apply(state.amplitudes))


def transform_mixture(mixture: CoherentMixture, propagator: PropagatorMatrix) -> CoherentMixture:
    """Transport every point mass through U; weights are untouched."""
    return CoherentMixture(
        mixture.weights.copy(),
        tuple(evolve_coherent(component, propagator) for component in mixture.components),
    )


@dataclass(frozen=True, eq=False)
class PointMassSupport:
    """Output P-function support for a probe-only input with vacuum sidebands."""

    mixture: CoherentMixture
    line: np.ndarray  # (u_-1,0, u_00, u_10): every support point is alpha * line
    sideband_constraint_residual: float
    probe_recovery_residual: float


def vacuum_sideband_p_reduction(probe_support: Sequence[Tuple[float, complex]],
                                propagator: PropagatorMatrix) -> PointMassSupport:
    """
    Transport a probe point-mass list with vacuum sidebands.

    The output P-function sits on the line alpha_q = alpha u_q0. Both
    sideband delta constraints sum_q u*_{+-1,q} alpha_q = 0 and the probe
    recovery sum_q u*_0q alpha_q = alpha are checked on the transported points.
    """
    weights = np.array([w for w, _ in probe_support], dtype=float)
    alphas = np.array([a for _, a in probe_support], dtype=complex)
    mixture = CoherentMixture(weights, tuple(CoherentTriple.probe(a) for a in alphas))
    transported = transform_mixture(mixture, propagator)

    u = propagator.matrix
    outputs = transported.amplitude_table
    # rows of U^* applied to each transported triple
    projections = outputs @ u.conj().T
    sideband_residual = float(np.max(np.abs(projections[:, [STOKES, ANTI_STOKES]]), initial=0.0))
    probe_residual = float(np.max(np.abs(projections[:, PROBE] - alphas), initial=0.0))
    logger.debug(f"P-reduction residuals: sidebands {sideband_residual:.2e}, probe {probe_residual:.2e}")
    return PointMassSupport(transported, propagator.probe_column.copy(), sideband_residual, probe_residual)


def sample_thermal_mixture(mean: float, count: int, seed: int) -> CoherentMixture:
    """Monte-Carlo point masses drawn from the thermal P-function exp(-|a|^2/n)/(pi n), probe only."""
    if mean < 0:
        raise ConfigValidationError("must be non-negative", field="mean")
    if count < 1:
        raise ConfigValidationError("must be at least 1", field="samples")
    rng = np.random.default_rng(seed)
    scale = math.sqrt(mean / 2)
    alphas = rng.normal(0.0, scale, count) + 1j * rng.normal(0.0, scale, count)
    weights = np.full(count, 1.0 / count)
    weights[-1] = 1.0 - weights[:-1].sum()
    return CoherentMixture(weights, tuple(CoherentTriple.probe(a) for a in alphas))


# =============================================================================
# FOCK INPUT AND THE TRIPARTITE OUTPUT
# =============================================================================

@dataclass(frozen=True, eq=False)
class TripartiteFockOutput:
    """
    (b_0^dag(t))^n |0> / sqrt(n!) expanded over |l-m>_-1 |n-l>_0 |m>_1.

    `amplitudes[(l, m)]` is c_lm for 0 <= m <= l <= n.
    """

    n: int
    amplitudes: Dict[Tuple[int, int], complex]
    shares: np.ndarray  # |u_q0|^2

    def __post_init__(self):
        total = sum(abs(c) ** 2 for c in self.amplitudes.values())
        if abs(total - 1) > 1e-12:
            raise ConfigValidationError(f"Fock output norm {total:.15g} differs from 1", field="n")

    @staticmethod
    def occupations(n: int, l: int, m: int) -> Tuple[int, int, int]:
        return l - m, n - l, m

    def occupation_table(self) -> List[Tuple[Tuple[int, int, int], complex]]:
        return [(self.occupations(self.n, l, m), c) for (l, m), c in sorted(self.amplitudes.items())]

    def amplitude_tensor(self) -> np.ndarray:
        """psi[n_-1, n_0, n_1] over 0..n in each mode."""
        tensor = np.zeros((self.n + 1,) * 3, dtype=complex)
        for occupation, c in self.occupation_table():
            tensor[occupation] = c
        return tensor

    def mode_distribution(self, mode: int) -> np.ndarray:
        """P(n_q = k), k = 0..n."""
        probabilities = np.abs(self.amplitude_tensor()) ** 2
        other = tuple(axis for axis in MODES if axis != mode)
        return probabilities.sum(axis=other)

    def reduced_purities(self) -> Dict[str, float]:
        tensor = self.amplitude_tensor()
        purities = {}
        for label, mode in BIPARTITIONS.items():
            matrix = np.moveaxis(tensor, mode, 0).reshape(self.n + 1, -1)
            reduced = matrix @ matrix.conj().T
            purities[label] = float(np.real(np.sum(np.abs(reduced) ** 2)))
        return purities

    def to_ket(self, basis: FockBasis, tail_tol: float = config.TAIL_TOLERANCE, strict: bool = False) -> TruncatedState:
        amplitudes = np.zeros(basis.dimension, dtype=complex)
        for occupation, c in self.occupation_table():
            amplitudes[basis.flat_index(*occupation)] = c
        return TruncatedState(amplitudes, basis, tail_tol=tail_tol, strict=strict, label=f"fock_output_{self.n}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "components": [
                {"occupations": list(occupation), "amplitude": complex_to_pair(c)}
                for occupation, c in self.occupation_table()
            ],
            "mode_shares": dict(zip(MODE_LABELS, self.shares.tolist())),
            "reduced_purities": self.reduced_purities(),
        }


def fock_output(n: int, propagator: PropagatorMatrix) -> TripartiteFockOutput:
    """c_lm = sqrt(C(n,l) C(l,m)) u_-1,0^(l-m) u_00^(n-l) u_10^m."""
    if n < 0:
        raise ConfigValidationError("photon number must be non-negative", field="n")
    u_stokes, u_probe, u_anti = propagator.probe_column
    amplitudes = {}
    for l in range(n + 1):
        for m in range(l + 1):
            weight = math.sqrt(comb(n, l, exact=True) * comb(l, m, exact=True))
            amplitudes[(l, m)] = complex(weight * u_stokes ** (l - m) * u_probe ** (n - l) * u_anti ** m)
    return TripartiteFockOutput(n, amplitudes, np.abs(propagator.probe_column) ** 2)


def binomial_marginal_purity(n: int, share: float) -> float:
    """Purity of one mode of the Fock output; its photon number is Binomial(n, |u_q0|^2)."""
    probabilities = binom.pmf(np.arange(n + 1), n, share)
    return float(np.sum(probabilities ** 2))


# =============================================================================
# SEPARABILITY
# =============================================================================

class Separability(str, Enum):
    SEPARABLE = "separable"
    ENTANGLED = "entangled"
    PRODUCT = "product"


@dataclass(frozen=True)
class SeparabilityResult:
    classification: Separability
    purities: Dict[str, float] = field(default_factory=dict)
    # (weight, per-mode amplitudes) of the explicit product decomposition
    decomposition: Optional[List[Tuple[float, List[List[float]]]]] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "classification": self.classification.value,
            "purities": self.purities,
            "decomposition": self.decomposition,
        }


def separability_witness(state: Union[CoherentMixture, TripartiteFockOutput]) -> SeparabilityResult:
    if isinstance(state, CoherentMixture):
        decomposition = [(float(w), c.to_pairs()) for w, c in zip(state.weights, state.components)]
        return SeparabilityResult(Separability.SEPARABLE, decomposition=decomposition)

    purities = state.reduced_purities()
    entangled = any(value < PURITY_THRESHOLD for value in purities.values())
    return SeparabilityResult(Separability.ENTANGLED if entangled else Separability.PRODUCT, purities)


# =============================================================================
# MOMENT CONSTRUCTORS (statistics module inputs)
# =============================================================================

def falling_factorial_moments(n: int, n_top: int) -> np.ndarray:
    """<b^dag^k b^k> = n!/(n-k)! for the Fock state |n>, k = 1..n_top."""
    return np.array([math.perm(n, k) for k in range(1, n_top + 1)], dtype=float)


def coherent_moments(state: CoherentTriple, n_top: int = config.N_TOP) -> MomentSet:
    alpha = state.amplitudes
    numbers = np.abs(alpha) ** 2
    orders = np.arange(1, n_top + 1)
    cross = np.outer(numbers, numbers)
    np.fill_diagonal(cross, 0.0)
    return MomentSet(
        first=alpha,
        pair=np.outer(alpha, alpha),
        hermitian=np.outer(alpha.conj(), alpha),
        number_moments=numbers[:, None] ** orders[None, :],
        cross_number=cross,
        n_top=n_top,
        gaussian=True,
        vacuum_sidebands=state.has_vacuum_sidebands,
    )


def fock_moments(n: int, n_top: int = config.N_TOP) -> MomentSet:
    if n < 0:
        raise ConfigValidationError("photon number must be non-negative", field="n")
    return MomentSet.probe_only(0.0, 0.0, falling_factorial_moments(n, n_top))


def fock_distribution_moments(probabilities: Sequence[float], n_top: int = config.N_TOP) -> MomentSet:
    """Probe in a diagonal mixture sum_n p_n |n><n|."""
    probabilities = np.asarray(probabilities, dtype=float)
    moments = sum(p * falling_factorial_moments(n, n_top) for n, p in enumerate(probabilities))
    return MomentSet.probe_only(0.0, 0.0, moments)


def gaussian_probe_moments(mean: complex, pair: complex, number: float, n_top: int = config.N_TOP) -> MomentSet:
    """Gaussian probe with vacuum sidebands; number moments by Wick closure."""
    first = np.zeros(3, dtype=complex)
    first[PROBE] = mean
    pair_matrix = np.zeros((3, 3), dtype=complex)
    pair_matrix[PROBE, PROBE] = pair
    hermitian = np.zeros((3, 3), dtype=complex)
    hermitian[PROBE, PROBE] = number
    probe = [
        gaussian_normal_moment(first, pair_matrix, hermitian, [(PROBE, True)] * k + [(PROBE, False)] * k).real
        for k in range(1, n_top + 1)
    ]
    return MomentSet.probe_only(mean, pair, probe, gaussian=True)


def squeezed_moments(r: float, theta: float = 0.0, n_top: int = config.N_TOP) -> MomentSet:
    """Squeezed vacuum S(xi)|0>, xi = r e^{i theta}: <b^2> = -e^{i theta} sinh r cosh r, <n> = sinh^2 r."""
    pair = -np.exp(1j * theta) * math.sinh(r) * math.cosh(r)
    return gaussian_probe_moments(0.0, pair, math.sinh(r) ** 2, n_top)


def thermal_distribution(mean: float, cutoff: int) -> np.ndarray:
    """Bose-Einstein probabilities for n = 0..cutoff, renormalized."""
    if mean <= 0:
        probabilities = np.zeros(cutoff + 1)
        probabilities[0] = 1.0
        return probabilities
    ratio = mean / (1 + mean)
    probabilities = ratio ** np.arange(cutoff + 1)
    return probabilities / probabilities.sum()


def thermal_moments(mean: float, n_top: int = config.N_TOP, cutoff: Optional[int] = None) -> MomentSet:
    """Thermal probe; exact Gaussian moments, or those of the truncated distribution when `cutoff` is set."""
    if mean < 0:
        raise ConfigValidationError("must be non-negative", field="mean")
    if cutoff is not None:
        return fock_distribution_moments(thermal_distribution(mean, cutoff), n_top)
    return gaussian_probe_moments(0.0, 0.0, mean, n_top)


def mixture_moments(mixture: CoherentMixture, n_top: int = config.N_TOP) -> MomentSet:
    """Weighted sum of coherent moments; no longer Gaussian."""
    parts = [coherent_moments(c, n_top) for c in mixture.components]
    weights = mixture.weights

    def combine(attribute):
        return sum(w * getattr(part, attribute) for w, part in zip(weights, parts))

    return MomentSet(
        first=combine("first"),
        pair=combine("pair"),
        hermitian=combine("hermitian"),
        number_moments=combine("number_moments"),
        cross_number=combine("cross_number"),
        n_top=n_top,
        gaussian=len(parts) == 1,
        vacuum_sidebands=mixture.has_vacuum_sidebands,
    )


# =============================================================================
# KET CONSTRUCTORS (oracle inputs)
# =============================================================================

def coherent_mode_amplitudes(alpha: complex, n_max: int) -> np.ndarray:
    n = np.arange(n_max + 1)
    if alpha == 0:
        vector = np.zeros(n_max + 1, dtype=complex)
        vector[0] = 1.0
        return vector
    log_magnitude = -abs(alpha) ** 2 / 2 + n * math.log(abs(alpha)) - 0.5 * gammaln(n + 1)
    return np.exp(log_magnitude) * np.exp(1j * n * np.angle(alpha))


def product_ket(vectors: Sequence[np.ndarray], basis: FockBasis, tail_tol: float = config.TAIL_TOLERANCE,
                strict: bool = False, label: str = "state") -> TruncatedState:
    stokes, probe, anti = vectors
    return TruncatedState(np.kron(np.kron(stokes, probe), anti), basis, tail_tol=tail_tol, strict=strict, label=label)


def coherent_ket(state: CoherentTriple, basis: FockBasis, tail_tol: float = config.TAIL_TOLERANCE,
                 strict: bool = False) -> TruncatedState:
    vectors = [coherent_mode_amplitudes(a, basis.n_max) for a in state.amplitudes]
    return product_ket(vectors, basis, tail_tol, strict, label="coherent")


def fock_ket(n_stokes: int, n_probe: int, n_anti: int, basis: FockBasis,
             tail_tol: float = config.TAIL_TOLERANCE, strict: bool = False) -> TruncatedState:
    amplitudes = np.zeros(basis.dimension, dtype=complex)
    amplitudes[basis.flat_index(n_stokes, n_probe, n_anti)] = 1.0
    return TruncatedState(amplitudes, basis, tail_tol=tail_tol, strict=strict,
                          label=f"fock_{n_stokes}_{n_probe}_{n_anti}")


def vacuum_vector(n_max: int) -> np.ndarray:
    vector = np.zeros(n_max + 1, dtype=complex)
    vector[0] = 1.0
    return vector


def squeezed_vacuum_ket(r: float, theta: float, basis: FockBasis, tail_tol: float = config.TAIL_TOLERANCE,
                        strict: bool = False) -> TruncatedState:
    """Probe in S(xi)|0>; c_2m = (-e^{i theta} tanh r)^m sqrt((2m)!) / (2^m m! sqrt(cosh r))."""
    probe = np.zeros(basis.n_max + 1, dtype=complex)
    ratio = -np.exp(1j * theta) * math.tanh(r)
    for m in range(basis.n_max // 2 + 1):
        log_weight = 0.5 * gammaln(2 * m + 1) - m * math.log(2) - gammaln(m + 1)
        probe[2 * m] = ratio ** m * math.exp(log_weight) / math.sqrt(math.cosh(r))
    vacuum = vacuum_vector(basis.n_max)
    return product_ket([vacuum, probe, vacuum], basis, tail_tol, strict, label="squeezed")


def thermal_mixture_kets(mean: float, basis: FockBasis, tail_tol: float = config.TAIL_TOLERANCE) -> KetMixture:
    """Probe Fock mixture truncated at n <= n_max - 1 so the cutoff level stays empty."""
    probabilities = thermal_distribution(mean, basis.n_max - 1)
    kets = [fock_ket(0, n, 0, basis, tail_tol=tail_tol) for n in range(basis.n_max)]
    return KetMixture(probabilities, kets)


def coherent_mixture_kets(mixture: CoherentMixture, basis: FockBasis, tail_tol: float = config.TAIL_TOLERANCE,
                          strict: bool = False) -> KetMixture:
    return KetMixture(mixture.weights.copy(), [coherent_ket(c, basis, tail_tol, strict) for c in mixture.components])


# =============================================================================
# STATE BLOCKS IN EXPERIMENT DOCUMENTS
# =============================================================================

ComplexPair = Tuple[float, float]


class _StateSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class CoherentSpec(_StateSpec):
    kind: Literal["coherent"]
    alpha: Optional[ComplexPair] = None
    amplitudes: Optional[Tuple[ComplexPair, ComplexPair, ComplexPair]] = None

    @model_validator(mode="after")
    def _one_form(self):
        if (self.alpha is None) == (self.amplitudes is None):
            raise ValueError("give exactly one of 'alpha' or 'amplitudes'")
        return self

    def triple(self) -> CoherentTriple:
        if self.alpha is not None:
            return CoherentTriple.probe(complex_from_pair(self.alpha))
        return CoherentTriple([complex_from_pair(a) for a in self.amplitudes])


class FockSpec(_StateSpec):
    kind: Literal["fock"]
    n: int = Field(..., ge=0)


class SqueezedSpec(_StateSpec):
    kind: Literal["squeezed"]
    r: float = Field(..., ge=0)
    theta: float = 0.0


class ThermalSpec(_StateSpec):
    kind: Literal["thermal"]
    mean: float = Field(..., ge=0)
    samples: Optional[int] = Field(None, ge=1)


class MixtureComponentSpec(_StateSpec):
    weight: float = Field(..., gt=0)
    amplitudes: Tuple[ComplexPair, ComplexPair, ComplexPair]


class MixtureSpec(_StateSpec):
    kind: Literal["mixture"]
    components: List[MixtureComponentSpec] = Field(..., min_length=1)

    @field_validator("components")
    @classmethod
    def _weights_sum_to_one(cls, value):
        total = sum(c.weight for c in value)
        if abs(total - 1) > WEIGHT_TOLERANCE:
            raise ValueError(f"component weights sum to {total:.15g}, not 1")
        return value

    def mixture(self) -> CoherentMixture:
        return CoherentMixture(
            [c.weight for c in self.components],
            tuple(CoherentTriple([complex_from_pair(a) for a in c.amplitudes]) for c in self.components),
        )


StateSpec = Annotated[Union[CoherentSpec, FockSpec, SqueezedSpec, ThermalSpec, MixtureSpec], Field(discriminator="kind")]
_STATE_ADAPTER = TypeAdapter(StateSpec)


@dataclass(frozen=True, eq=False)
class InputState:
    """A parsed state block with both its moment and ket renditions at hand."""

    spec: Any
    seed: Optional[int] = None

    @property
    def kind(self) -> str:
        return self.spec.kind

    def point_masses(self) -> Optional[CoherentMixture]:
        """The state as a point-mass mixture, when it is classical and finite."""
        if isinstance(self.spec, CoherentSpec):
            return CoherentMixture.single(self.spec.triple())
        if isinstance(self.spec, MixtureSpec):
            return self.spec.mixture()
        if isinstance(self.spec, ThermalSpec) and self.spec.samples:
            return sample_thermal_mixture(self.spec.mean, self.spec.samples, self.seed or 0)
        return None

    def moments(self, n_top: int = config.N_TOP, cutoff: Optional[int] = None) -> MomentSet:
        spec = self.spec
        if isinstance(spec, CoherentSpec):
            return coherent_moments(spec.triple(), n_top)
        if isinstance(spec, FockSpec):
            return fock_moments(spec.n, n_top)
        if isinstance(spec, SqueezedSpec):
            return squeezed_moments(spec.r, spec.theta, n_top)
        if isinstance(spec, ThermalSpec) and not spec.samples:
            return thermal_moments(spec.mean, n_top, cutoff)
        return mixture_moments(self.point_masses(), n_top)

    def ket(self, basis: FockBasis, tail_tol: float = config.TAIL_TOLERANCE, strict: bool = False):
        spec = self.spec
        if isinstance(spec, CoherentSpec):
            return coherent_ket(spec.triple(), basis, tail_tol, strict)
        if isinstance(spec, FockSpec):
            return fock_ket(0, spec.n, 0, basis, tail_tol, strict)
        if isinstance(spec, SqueezedSpec):
            return squeezed_vacuum_ket(spec.r, spec.theta, basis, tail_tol, strict)
        if isinstance(spec, ThermalSpec) and not spec.samples:
            return thermal_mixture_kets(spec.mean, basis, tail_tol)
        return coherent_mixture_kets(self.point_masses(), basis, tail_tol, strict)


def parse_state_spec(document: Dict[str, Any], seed: Optional[int] = None) -> InputState:
    """Validate a `{kind: ..., ...}` block."""
    try:
        spec = _STATE_ADAPTER.validate_python(document)
    except ValidationError as e:
        raise config_error_from_validation(e) from e
    return InputState(spec, seed)
