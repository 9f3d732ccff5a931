import math

import numpy as np
import pytest
import scipy.sparse.linalg as spla
from numpy.testing import assert_allclose

from raman_multiplex.errors import BasisMismatchError, ResourceLimitError, TruncationError, TruncationWarning
from raman_multiplex.fock_oracle import (
    FockBasis,
    KetMixture,
    LadderAlgebra,
    TruncatedState,
    annihilation_matrix,
    evolve,
    expectation,
    hamiltonian_matrix,
    hamiltonian_spectrum,
    measure_moments,
    number_matrix,
    quadrature_variance,
)
from raman_multiplex.physical_config import CouplingParams
from raman_multiplex.propagator import ANTI_STOKES, PROBE, STOKES
from raman_multiplex.states import coherent_ket, CoherentTriple, fock_ket


def test_flat_index_layout():
    basis = FockBasis(3)
    assert basis.dimension == 64
    assert basis.flat_index(1, 2, 3) == 1 * 16 + 2 * 4 + 3
    assert basis.occupations_of(27) == (1, 2, 3)
    with pytest.raises(ResourceLimitError):
        basis.flat_index(4, 0, 0)


def test_ceiling_enforced():
    with pytest.raises(ResourceLimitError):
        FockBasis(17)


def test_lowering_on_probe(basis):
    b0 = annihilation_matrix(basis, PROBE)
    ket = fock_ket(0, 2, 0, basis).amplitudes
    lowered = b0 @ ket
    assert lowered[basis.flat_index(0, 1, 0)] == pytest.approx(math.sqrt(2))
    assert np.count_nonzero(lowered) == 1


def test_number_operator_eigenvalue(basis):
    ket = fock_ket(0, 2, 0, basis).amplitudes
    assert_allclose(number_matrix(basis, PROBE) @ ket, 2 * ket)


def test_hamiltonian_is_hermitian(basis, detuned):
    h = hamiltonian_matrix(basis, detuned)
    assert abs(h - h.conj().T).max() < 1e-14


def test_vacuum_stays_vacuum(basis, detuned):
    vacuum = fock_ket(0, 0, 0, basis)
    assert_allclose(evolve(vacuum, detuned).amplitudes, vacuum.amplitudes, atol=1e-14)


def test_single_photon_quarter_beat(basis, quarter_beat):
    out = evolve(fock_ket(0, 1, 0, basis), quarter_beat)
    assert out.amplitude(1, 0, 0) == pytest.approx(0.8j, abs=1e-10)
    assert out.amplitude(0, 0, 1) == pytest.approx(0.6j, abs=1e-10)
    assert abs(out.amplitude(0, 1, 0)) < 1e-10


def test_coherent_photon_number_conserved(basis, detuned):
    state = coherent_ket(CoherentTriple.probe(0.5), basis)
    algebra = LadderAlgebra(basis)
    out = evolve(state, detuned)
    total = sum(expectation(out, algebra.n(q)).real for q in (STOKES, PROBE, ANTI_STOKES))
    assert total == pytest.approx(0.25, abs=1e-10)


def test_sector_spectrum_matches_sparse_exponential():
    basis = FockBasis(4)
    p = CouplingParams(0.6, 0.8, 0.5, 0.9)
    rng = np.random.default_rng(3)
    amplitudes = rng.normal(size=basis.dimension) + 1j * rng.normal(size=basis.dimension)
    amplitudes[basis.boundary_mask] = 0
    amplitudes /= np.linalg.norm(amplitudes)
    by_sectors = hamiltonian_spectrum(basis, p).propagate(amplitudes, p.evolution_time)
    direct = spla.expm_multiply(-1j * p.evolution_time * hamiltonian_matrix(basis, p).tocsc(), amplitudes)
    assert_allclose(by_sectors, direct, atol=1e-10)


def test_vacuum_expectations_vanish(basis):
    vacuum = fock_ket(0, 0, 0, basis)
    algebra = LadderAlgebra(basis)
    for q in (STOKES, PROBE, ANTI_STOKES):
        assert expectation(vacuum, algebra.normal_power(q, 2)) == 0
        assert expectation(vacuum, algebra.bdag(q) @ algebra.b(PROBE)) == 0


def test_basis_mismatch(basis):
    small = FockBasis(3)
    with pytest.raises(BasisMismatchError):
        expectation(fock_ket(0, 1, 0, small), LadderAlgebra(basis).n(PROBE))
    with pytest.raises(BasisMismatchError):
        TruncatedState(np.zeros(10), basis)


def test_tail_warning_and_strict_escalation():
    basis = FockBasis(3)
    with pytest.warns(TruncationWarning):
        fock_ket(0, 3, 0, basis)
    with pytest.raises(TruncationError):
        fock_ket(0, 3, 0, basis, strict=True)


def test_vacuum_quadrature_variance_is_one(basis):
    vacuum = fock_ket(0, 0, 0, basis)
    for phi in (0.0, 0.4, 1.3):
        assert quadrature_variance(vacuum, PROBE, phi) == pytest.approx(1.0)


def test_mixture_expectation_is_weighted(basis):
    kets = [fock_ket(0, 1, 0, basis), fock_ket(0, 3, 0, basis)]
    mixture = KetMixture([0.25, 0.75], kets)
    assert expectation(mixture, LadderAlgebra(basis).n(PROBE)).real == pytest.approx(0.25 + 2.25)


def test_measure_moments_of_fock_state(basis):
    moments = measure_moments(fock_ket(0, 3, 0, basis))
    assert_allclose(moments.number_moments[PROBE], [3, 6, 6, 0])
    assert_allclose(moments.number_moments[STOKES], 0)
    assert moments.hermitian[PROBE, PROBE] == pytest.approx(3)
    assert_allclose(moments.first, 0)


def test_json_dump_restores_state(basis):
    state = coherent_ket(CoherentTriple.probe(0.3 + 0.2j), basis)
    restored = TruncatedState.from_json(state.to_json())
    assert restored.basis == basis
    assert_allclose(restored.amplitudes, state.amplitudes)
