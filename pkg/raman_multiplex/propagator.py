"""
Closed-form three-mode propagator of the probe/sideband beating.

Mode operators evolve linearly, b_q(t) = sum_q' u_qq'(t) b_q'(0). All arrays use
one storage convention: index 0 = Stokes (q = -1), 1 = probe (q = 0),
2 = anti-Stokes (q = +1). Rows are output modes, columns input modes.
"""
import cmath
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Tuple

import numpy as np

import config
from raman_multiplex.errors import DegenerateCouplingError
from raman_multiplex.physical_config import CouplingParams

logger = logging.getLogger(__name__)

STOKES, PROBE, ANTI_STOKES = 0, 1, 2
MODE_LABELS = ("stokes", "probe", "anti_stokes")
SIDEBAND_ORDERS = (-1, 0, 1)


def storage_index(q: int) -> int:
    """Map a sideband order q in {-1, 0, 1} to its storage index."""
    if q not in SIDEBAND_ORDERS:
        raise ValueError(f"sideband order must be -1, 0 or 1, got {q}")
    return q + 1


def sin_over_g_series(g: float, t: float) -> float:
    return t - (g * t) ** 2 * t / 6


def sin_over_g(g: float, t: float) -> float:
    """sin(g t) / g, switching to the series form when g t is tiny."""
    if abs(g * t) < config.SMALL_GT_SERIES_THRESHOLD:
        return sin_over_g_series(g, t)
    return math.sin(g * t) / g


def _require_coupling(p: CouplingParams):
    if not p.g_c > 0:
        raise DegenerateCouplingError("g_c = 0: the probe does not couple to either sideband", field="g_anti")


@dataclass(frozen=True, eq=False)
class PropagatorMatrix:
    """Immutable 3x3 unitary u_qq'(t) together with the parameters it was built from."""

    matrix: np.ndarray
    params: CouplingParams

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=complex)
        if matrix.shape != (3, 3):
            raise ValueError(f"propagator must be 3x3, got {matrix.shape}")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    def entry(self, q: int, q_prime: int) -> complex:
        """u_{q,q'} addressed by sideband orders."""
        return complex(self.matrix[storage_index(q), storage_index(q_prime)])

    @property
    def probe_column(self) -> np.ndarray:
        """(u_-1,0, u_0,0, u_1,0): where an input probe photon ends up."""
        return self.matrix[:, PROBE]

    @property
    def phase_reference(self) -> float:
        """phi_L = arg(u_00), continuous across g t = pi/2 for Delta != 0."""
        return float(np.angle(self.matrix[PROBE, PROBE]))

    def unitarity_defect(self) -> float:
        return float(np.max(np.abs(self.matrix.conj().T @ self.matrix - np.eye(3))))

    def apply(self, amplitudes) -> np.ndarray:
        return self.matrix @ np.asarray(amplitudes, dtype=complex)

    def then(self, later: "PropagatorMatrix") -> np.ndarray:
        """Matrix of evolving by self first and `later` second."""
        return later.matrix @ self.matrix

    def to_json_pairs(self) -> List[List[List[float]]]:
        return [[[float(z.real), float(z.imag)] for z in row] for row in self.matrix]


@lru_cache(maxsize=4096)
def build_propagator(p: CouplingParams) -> PropagatorMatrix:
    """Evaluate the closed-form entries u_qq'(t)."""
    _require_coupling(p)
    g_c = p.g_c
    t = p.evolution_time
    s = sin_over_g(p.g, t)

    u00 = complex(math.cos(p.g * t), p.detuning * s)
    free = cmath.exp(-1j * p.detuning * t)
    w_anti = p.g_anti / g_c
    w_stokes = p.g_stokes / g_c

    u_anti = w_anti ** 2 * u00.conjugate() + w_stokes ** 2 * free
    u_stokes = w_stokes ** 2 * u00.conjugate() + w_anti ** 2 * free
    u_cross = w_anti * w_stokes * (u00.conjugate() - free)
    u_probe_anti = 1j * p.g_anti * s
    u_probe_stokes = 1j * p.g_stokes * s

    matrix = np.array(
        [
            [u_stokes, u_probe_stokes, u_cross],
            [u_probe_stokes, u00, u_probe_anti],
            [u_cross, u_probe_anti, u_anti],
        ],
        dtype=complex,
    )
    return PropagatorMatrix(matrix, p)


@dataclass(frozen=True, eq=False)
class ModeDecomposition:
    """Coupled/uncoupled sideband modes and the normal modes of the effective Hamiltonian."""

    # over (b_1, b_-1)
    coupled_weights: Tuple[float, float]
    uncoupled_weights: Tuple[float, float]
    # rows b_+, b_- over (b_0, b_c)
    normal_weights: np.ndarray
    # (b_u, b_+, b_-)
    frequencies: Tuple[float, float, float]

    @property
    def basis_matrix(self) -> np.ndarray:
        """Real orthogonal rows (b_u, b_+, b_-) over the storage modes."""
        c_anti, c_stokes = self.coupled_weights
        u_anti, u_stokes = self.uncoupled_weights
        coupled_row = np.array([c_stokes, 0.0, c_anti])
        uncoupled_row = np.array([u_stokes, 0.0, u_anti])
        probe_row = np.array([0.0, 1.0, 0.0])
        (p0, pc), (m0, mc) = self.normal_weights
        return np.vstack([
            uncoupled_row,
            p0 * probe_row + pc * coupled_row,
            m0 * probe_row + mc * coupled_row,
        ])

    def sidebands_from_modes(self) -> np.ndarray:
        """Rows b_1, b_-1 over (b_c, b_u)."""
        c_anti, c_stokes = self.coupled_weights
        u_anti, u_stokes = self.uncoupled_weights
        return np.array([[c_anti, u_anti], [c_stokes, u_stokes]])


def decompose_modes(p: CouplingParams) -> ModeDecomposition:
    _require_coupling(p)
    g_c, g = p.g_c, p.g
    root_plus = math.sqrt(max(p.g_plus, 0.0))
    root_minus = math.sqrt(max(p.g_minus, 0.0))
    norm = math.sqrt(2 * g)
    normal = np.array([
        [root_minus / norm, -root_plus / norm],
        [root_plus / norm, root_minus / norm],
    ])
    return ModeDecomposition(
        coupled_weights=(p.g_anti / g_c, p.g_stokes / g_c),
        uncoupled_weights=(p.g_stokes / g_c, -p.g_anti / g_c),
        normal_weights=normal,
        frequencies=(p.detuning, g, -g),
    )


def propagator_via_modes(p: CouplingParams) -> PropagatorMatrix:
    """Rebuild U from the free evolution of b_u, b_+ and b_-."""
    modes = decompose_modes(p)
    basis = modes.basis_matrix
    phases = np.exp(-1j * np.asarray(modes.frequencies) * p.evolution_time)
    return PropagatorMatrix(basis.T @ np.diag(phases) @ basis, p)


def hamiltonian_spec(p: CouplingParams) -> np.ndarray:
    """Coefficient matrix h with H = hbar sum_qq' h_qq' b_q^dag b_q'."""
    delta = p.detuning
    return np.array(
        [
            [delta, -p.g_stokes, 0.0],
            [-p.g_stokes, -delta, -p.g_anti],
            [0.0, -p.g_anti, delta],
        ],
        dtype=complex,
    )


def propagator_via_generator(p: CouplingParams) -> PropagatorMatrix:
    """U(t) = exp(-i h t) through the eigendecomposition of the Hermitian h."""
    eigenvalues, eigenvectors = np.linalg.eigh(hamiltonian_spec(p))
    phases = np.exp(-1j * eigenvalues * p.evolution_time)
    return PropagatorMatrix((eigenvectors * phases) @ eigenvectors.conj().T, p)


def coupled_basis_hamiltonian(p: CouplingParams) -> np.ndarray:
    """h in the (b_0, b_c, b_u) basis; b_u only precesses at Delta."""
    delta = p.detuning
    return np.array(
        [
            [-delta, -p.g_c, 0.0],
            [-p.g_c, delta, 0.0],
            [0.0, 0.0, delta],
        ]
    )


def coupled_mode_evolution(p: CouplingParams) -> np.ndarray:
    """Coefficients of b_c(t) over (b_0(0), b_c(0))."""
    s = sin_over_g(p.g, p.evolution_time)
    cos_gt = math.cos(p.gt)
    return np.array([1j * p.g_c * s, complex(cos_gt, -p.detuning * s)])


def phase_reference_arctan(p: CouplingParams) -> float:
    """arctan[(Delta/g) tan(g t)]; agrees with arg(u_00) only for |g t| < pi/2."""
    return math.atan((p.detuning / p.g) * math.tan(p.gt))


def transfer_factors(p: CouplingParams) -> np.ndarray:
    """|u_q0|^2 per mode: the share of probe photons found in each output mode."""
    s = sin_over_g(p.g, p.evolution_time)
    return np.array([
        (p.g_stokes * s) ** 2,
        1.0 - (p.g_c * s) ** 2,
        (p.g_anti * s) ** 2,
    ])
