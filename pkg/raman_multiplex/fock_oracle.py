"""
Brute-force verifier in a truncated three-mode Fock space.

Nothing here uses the closed-form propagator: the Hamiltonian is assembled
from truncated ladder matrices and states are evolved by exact unitary
exponentiation. Flat index of |n_-1, n_0, n_1> is
n_-1 (N+1)^2 + n_0 (N+1) + n_1.
"""
import json
import logging
import warnings
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import List, Tuple, Union

import numpy as np
import scipy.sparse as sp

import config
from raman_multiplex.errors import BasisMismatchError, ResourceLimitError, TruncationError, TruncationWarning
from raman_multiplex.photon_statistics import MomentSet
from raman_multiplex.physical_config import CouplingParams
from raman_multiplex.propagator import ANTI_STOKES, PROBE, STOKES

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FockBasis:
    """Product basis truncated at n_max photons per mode."""

    n_max: int = config.FOCK_N_MAX

    def __post_init__(self):
        if self.n_max < 1:
            raise ResourceLimitError(f"n_max must be at least 1, got {self.n_max}")
        if self.n_max > config.FOCK_N_MAX_CEILING:
            raise ResourceLimitError(
                f"n_max = {self.n_max} exceeds the ceiling {config.FOCK_N_MAX_CEILING} "
                f"(dimension {(config.FOCK_N_MAX_CEILING + 1) ** 3})"
            )

    @property
    def mode_dimension(self) -> int:
        return self.n_max + 1

    @property
    def dimension(self) -> int:
        return self.mode_dimension ** 3

    def flat_index(self, n_stokes: int, n_probe: int, n_anti: int) -> int:
        for n in (n_stokes, n_probe, n_anti):
            if not 0 <= n <= self.n_max:
                raise ResourceLimitError(f"occupation {n} outside 0..{self.n_max}")
        d = self.mode_dimension
        return (n_stokes * d + n_probe) * d + n_anti

    def occupations_of(self, index: int) -> Tuple[int, int, int]:
        return tuple(int(n) for n in np.unravel_index(index, (self.mode_dimension,) * 3))

    @cached_property
    def occupations(self) -> np.ndarray:
        """(dimension, 3) table of (n_-1, n_0, n_1) for every flat index."""
        grid = np.indices((self.mode_dimension,) * 3).reshape(3, -1).T
        grid.setflags(write=False)
        return grid

    @cached_property
    def boundary_mask(self) -> np.ndarray:
        return np.any(self.occupations == self.n_max, axis=1)

    @cached_property
    def total_number(self) -> np.ndarray:
        return self.occupations.sum(axis=1)


class TruncatedState:
    """Pure ket over a FockBasis."""

    def __init__(self, amplitudes, basis: FockBasis, tail_tol: float = config.TAIL_TOLERANCE,
                 strict: bool = False, label: str = "state", validate: bool = True):
        amplitudes = np.asarray(amplitudes, dtype=complex).reshape(-1)
        if amplitudes.shape[0] != basis.dimension:
            raise BasisMismatchError(
                f"{label}: {amplitudes.shape[0]} amplitudes for a basis of dimension {basis.dimension}"
            )
        self.amplitudes = amplitudes
        self.basis = basis
        self.tail_tol = tail_tol
        self.label = label
        if validate:
            check_tail(self, strict=strict, stage="construction")

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    @property
    def tail_mass(self) -> float:
        return float(np.sum(np.abs(self.amplitudes[self.basis.boundary_mask]) ** 2))

    def amplitude(self, n_stokes: int, n_probe: int, n_anti: int) -> complex:
        return complex(self.amplitudes[self.basis.flat_index(n_stokes, n_probe, n_anti)])

    def overlap(self, other: "TruncatedState") -> complex:
        _require_same_basis(self.basis, other.basis)
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity(self, other: "TruncatedState") -> float:
        return abs(self.overlap(other)) ** 2

    def with_amplitudes(self, amplitudes) -> "TruncatedState":
        return TruncatedState(amplitudes, self.basis, tail_tol=self.tail_tol, label=self.label, validate=False)

    def to_json(self) -> str:
        """Debug dump: flat amplitude array as [re, im] pairs plus basis metadata."""
        return json.dumps({
            "n_max": self.basis.n_max,
            "index_order": "n_-1 (N+1)^2 + n_0 (N+1) + n_1",
            "tail_tol": self.tail_tol,
            "label": self.label,
            "amplitudes": [[float(z.real), float(z.imag)] for z in self.amplitudes],
        })

    @classmethod
    def from_json(cls, text: str) -> "TruncatedState":
        data = json.loads(text)
        amplitudes = np.array([complex(re, im) for re, im in data["amplitudes"]])
        return cls(amplitudes, FockBasis(data["n_max"]), tail_tol=data["tail_tol"], label=data.get("label", "state"))


@dataclass
class KetMixture:
    """Mixed state as a weighted list of kets sharing one basis."""

    weights: np.ndarray
    kets: List[TruncatedState] = field(default_factory=list)

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        if len(self.weights) != len(self.kets) or not self.kets:
            raise ValueError("mixture needs one weight per ket and at least one ket")
        if np.any(self.weights < 0):
            raise ValueError("mixture weights must be non-negative")
        for ket in self.kets[1:]:
            _require_same_basis(self.kets[0].basis, ket.basis)

    @property
    def basis(self) -> FockBasis:
        return self.kets[0].basis


OracleState = Union[TruncatedState, KetMixture]


def _require_same_basis(first: FockBasis, second: FockBasis):
    if first.n_max != second.n_max:
        raise BasisMismatchError(f"basis n_max {first.n_max} != {second.n_max}")


def check_tail(state: TruncatedState, strict: bool = False, stage: str = "evolution") -> float:
    """Warn (or raise in strict mode) when probability reaches the cutoff level."""
    tail = state.tail_mass
    if tail >= state.tail_tol:
        message = (
            f"{state.label}: truncation tail {tail:.3e} >= {state.tail_tol:.1e} "
            f"at {stage} (n_max = {state.basis.n_max})"
        )
        if strict:
            raise TruncationError(message)
        logger.warning(message)
        warnings.warn(message, TruncationWarning, stacklevel=3)
    return tail


@lru_cache(maxsize=None)
def single_mode_lowering(n_max: int) -> sp.csr_matrix:
    levels = np.arange(1, n_max + 1)
    return sp.diags(np.sqrt(levels), offsets=1, shape=(n_max + 1, n_max + 1), format="csr", dtype=complex)


@lru_cache(maxsize=None)
def annihilation_matrix(basis: FockBasis, mode: int) -> sp.csr_matrix:
    """b_q on the truncated product space; `mode` is a storage index (0 Stokes, 1 probe, 2 anti-Stokes)."""
    if mode not in (STOKES, PROBE, ANTI_STOKES):
        raise ValueError(f"mode must be a storage index 0..2, got {mode}")
    identity = sp.identity(basis.mode_dimension, dtype=complex, format="csr")
    factors = [identity, identity, identity]
    factors[mode] = single_mode_lowering(basis.n_max)
    matrix = sp.kron(sp.kron(factors[0], factors[1]), factors[2], format="csr")
    matrix.sort_indices()
    return matrix


def creation_matrix(basis: FockBasis, mode: int) -> sp.csr_matrix:
    return annihilation_matrix(basis, mode).conj().T.tocsr()


def number_matrix(basis: FockBasis, mode: int) -> sp.csr_matrix:
    return sp.diags(basis.occupations[:, mode].astype(complex), format="csr")


def total_number_matrix(basis: FockBasis) -> sp.csr_matrix:
    return sp.diags(basis.total_number.astype(complex), format="csr")


def hamiltonian_matrix(basis: FockBasis, p: CouplingParams) -> sp.csr_matrix:
    """H / hbar = Delta (n_1 + n_-1 - n_0) - [g_1 (b_0 b_1^dag + h.c.) + g_-1 (b_0 b_-1^dag + h.c.)]."""
    if basis.n_max > config.FOCK_N_MAX_CEILING:
        raise ResourceLimitError(f"n_max {basis.n_max} above ceiling {config.FOCK_N_MAX_CEILING}")
    b = {mode: annihilation_matrix(basis, mode) for mode in (STOKES, PROBE, ANTI_STOKES)}
    bd = {mode: creation_matrix(basis, mode) for mode in (STOKES, PROBE, ANTI_STOKES)}

    detuning_part = p.detuning * (
        number_matrix(basis, ANTI_STOKES) + number_matrix(basis, STOKES) - number_matrix(basis, PROBE)
    )
    anti_exchange = b[PROBE] @ bd[ANTI_STOKES] + b[ANTI_STOKES] @ bd[PROBE]
    stokes_exchange = b[PROBE] @ bd[STOKES] + b[STOKES] @ bd[PROBE]
    hamiltonian = detuning_part - (p.g_anti * anti_exchange + p.g_stokes * stokes_exchange)
    return hamiltonian.tocsr()


@dataclass(frozen=True, eq=False)
class HamiltonianSpectrum:
    """Eigendecomposition of H, one block per total-photon-number sector."""

    basis: FockBasis
    sectors: Tuple[Tuple[np.ndarray, np.ndarray, np.ndarray], ...]

    def propagate(self, amplitudes: np.ndarray, t: float) -> np.ndarray:
        out = np.zeros_like(amplitudes)
        for indices, eigenvalues, eigenvectors in self.sectors:
            coefficients = eigenvectors.conj().T @ amplitudes[indices]
            out[indices] = eigenvectors @ (np.exp(-1j * eigenvalues * t) * coefficients)
        return out


@lru_cache(maxsize=64)
def _spectrum(n_max: int, g_anti: float, g_stokes: float, detuning: float) -> HamiltonianSpectrum:
    basis = FockBasis(n_max)
    hamiltonian = hamiltonian_matrix(basis, CouplingParams(g_anti, g_stokes, detuning, 0.0))
    # H conserves the total photon number, so it is block diagonal over the
    # sectors of fixed n_-1 + n_0 + n_1.
    sectors = []
    for total in np.unique(basis.total_number):
        indices = np.flatnonzero(basis.total_number == total)
        block = hamiltonian[indices][:, indices].toarray()
        eigenvalues, eigenvectors = np.linalg.eigh(block)
        sectors.append((indices, eigenvalues, eigenvectors))
    logger.info(
        f"Cached oracle spectrum for n_max={n_max}, g1={g_anti}, g-1={g_stokes}, "
        f"Delta={detuning} ({len(sectors)} sectors)"
    )
    return HamiltonianSpectrum(basis, tuple(sectors))


def hamiltonian_spectrum(basis: FockBasis, p: CouplingParams) -> HamiltonianSpectrum:
    return _spectrum(basis.n_max, p.g_anti, p.g_stokes, p.detuning)


def evolve(state: OracleState, p: CouplingParams, strict: bool = False) -> OracleState:
    """exp(-i H t) applied to a ket (or to every ket of a mixture), t = p.evolution_time."""
    if isinstance(state, KetMixture):
        kets = [evolve(ket, p, strict=strict) for ket in state.kets]
        return KetMixture(state.weights.copy(), kets)

    check_tail(state, strict=strict, stage="evolution input")
    spectrum = hamiltonian_spectrum(state.basis, p)
    evolved = state.with_amplitudes(spectrum.propagate(state.amplitudes, p.evolution_time))
    check_tail(evolved, strict=strict, stage="evolution output")
    return evolved


class Observable:
    """Operator on a specific truncated basis, closed under +, -, @ and scalar *."""

    def __init__(self, matrix: sp.spmatrix, basis: FockBasis):
        self.matrix = sp.csr_matrix(matrix)
        self.basis = basis

    def _check(self, other: "Observable"):
        _require_same_basis(self.basis, other.basis)

    def __matmul__(self, other: "Observable") -> "Observable":
        self._check(other)
        return Observable(self.matrix @ other.matrix, self.basis)

    def __add__(self, other: "Observable") -> "Observable":
        self._check(other)
        return Observable(self.matrix + other.matrix, self.basis)

    def __sub__(self, other: "Observable") -> "Observable":
        self._check(other)
        return Observable(self.matrix - other.matrix, self.basis)

    def __mul__(self, scalar: complex) -> "Observable":
        return Observable(self.matrix * scalar, self.basis)

    __rmul__ = __mul__

    def power(self, exponent: int) -> "Observable":
        result = Observable(sp.identity(self.basis.dimension, dtype=complex, format="csr"), self.basis)
        for _ in range(exponent):
            result = result @ self
        return result

    @property
    def dagger(self) -> "Observable":
        return Observable(self.matrix.conj().T, self.basis)


class LadderAlgebra:
    """Builds observables from the ladder matrices of one basis."""

    def __init__(self, basis: FockBasis):
        self.basis = basis

    def b(self, mode: int) -> Observable:
        return Observable(annihilation_matrix(self.basis, mode), self.basis)

    def bdag(self, mode: int) -> Observable:
        return Observable(creation_matrix(self.basis, mode), self.basis)

    def n(self, mode: int) -> Observable:
        return Observable(number_matrix(self.basis, mode), self.basis)

    def normal_power(self, mode: int, order: int) -> Observable:
        """b^dag^n b^n"""
        return self.bdag(mode).power(order) @ self.b(mode).power(order)

    def quadrature(self, mode: int, phi: float) -> Observable:
        """X = b^dag e^{i phi} + b e^{-i phi}"""
        return self.bdag(mode) * np.exp(1j * phi) + self.b(mode) * np.exp(-1j * phi)


def expectation(state: OracleState, observable: Observable) -> complex:
    """<psi|O|psi>, or the weighted sum over the kets of a mixture."""
    if isinstance(state, KetMixture):
        return complex(sum(w * expectation(ket, observable) for w, ket in zip(state.weights, state.kets)))
    _require_same_basis(state.basis, observable.basis)
    return complex(np.vdot(state.amplitudes, observable.matrix @ state.amplitudes))


def quadrature_variance(state: OracleState, mode: int, phi: float) -> float:
    """
    <(Delta X_phi)^2> = S_q(phi) + 1.

    X^2 is expanded in normal order with [b, b^dag] = 1 put in by hand;
    the truncated b b^dag is wrong on the cutoff level.
    """
    algebra = LadderAlgebra(state.basis)
    mean = expectation(state, algebra.quadrature(mode, phi)).real
    b2 = expectation(state, algebra.b(mode) @ algebra.b(mode))
    number = expectation(state, algebra.n(mode)).real
    second = 2 * np.real(b2 * np.exp(-2j * phi)) + 2 * number + 1
    return float(second - mean ** 2)


def measure_moments(state: OracleState, n_top: int = config.N_TOP):
    """Every moment tracked by a MomentSet, measured on the oracle state."""
    algebra = LadderAlgebra(state.basis)
    modes = (STOKES, PROBE, ANTI_STOKES)
    first = np.array([expectation(state, algebra.b(q)) for q in modes])
    pair = np.array([[expectation(state, algebra.b(q) @ algebra.b(k)) for k in modes] for q in modes])
    hermitian = np.array([[expectation(state, algebra.bdag(q) @ algebra.b(k)) for k in modes] for q in modes])
    number_moments = np.array([
        [expectation(state, algebra.normal_power(q, order)).real for order in range(1, n_top + 1)]
        for q in modes
    ])
    cross_number = np.zeros((3, 3))
    for k in modes:
        for l in modes:
            if k != l:
                cross_number[k, l] = expectation(state, algebra.n(k) @ algebra.n(l)).real
    return MomentSet(
        first=first,
        pair=pair,
        hermitian=hermitian,
        number_moments=number_moments,
        cross_number=cross_number,
        n_top=n_top,
    )
