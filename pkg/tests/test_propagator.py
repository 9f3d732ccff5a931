import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis.strategies import floats
from numpy.testing import assert_allclose

from raman_multiplex.physical_config import CouplingParams
from raman_multiplex.propagator import (
    ANTI_STOKES,
    PROBE,
    STOKES,
    build_propagator,
    coupled_basis_hamiltonian,
    coupled_mode_evolution,
    decompose_modes,
    hamiltonian_spec,
    phase_reference_arctan,
    propagator_via_generator,
    propagator_via_modes,
    sin_over_g,
    sin_over_g_series,
    storage_index,
    transfer_factors,
)

couplings = floats(min_value=0.01, max_value=2.0)
detunings = floats(min_value=-2.0, max_value=2.0)
times = floats(min_value=0.0, max_value=math.pi)


def test_storage_order():
    assert [storage_index(q) for q in (-1, 0, 1)] == [STOKES, PROBE, ANTI_STOKES]
    with pytest.raises(ValueError):
        storage_index(2)


def test_identity_at_zero_time(detuned):
    assert_allclose(build_propagator(detuned.at_time(0.0)).matrix, np.eye(3), atol=1e-15)


def test_quarter_beat_entries(quarter_beat):
    u = build_propagator(quarter_beat)
    assert abs(u.entry(0, 0)) < 1e-15
    assert u.entry(0, -1) == pytest.approx(0.8j, abs=1e-15)
    assert u.entry(0, 1) == pytest.approx(0.6j, abs=1e-15)
    assert u.entry(1, 1) == pytest.approx(0.64, abs=1e-15)
    assert u.entry(-1, -1) == pytest.approx(0.36, abs=1e-15)
    assert u.entry(1, -1) == pytest.approx(-0.48, abs=1e-15)


def test_matrix_is_symmetric_and_read_only(detuned):
    u = build_propagator(detuned)
    assert_allclose(u.matrix, u.matrix.T, atol=1e-15)
    with pytest.raises(ValueError):
        u.matrix[0, 0] = 1.0


@pytest.mark.parametrize("t", [0.1, 0.7, 1.9, 3.0])
def test_detuned_row_norms(t):
    u = build_propagator(CouplingParams(0.6, 0.8, 0.5, t))
    assert_allclose(np.linalg.norm(u.matrix, axis=1), np.ones(3), atol=1e-12)


@settings(max_examples=100, deadline=None)
@given(couplings, couplings, detunings, times)
def test_three_routes_agree(g_anti, g_stokes, detuning, t):
    p = CouplingParams(g_anti, g_stokes, detuning, t)
    closed = build_propagator(p)
    assert closed.unitarity_defect() < 1e-12
    assert_allclose(propagator_via_modes(p).matrix, closed.matrix, atol=1e-10)
    assert_allclose(propagator_via_generator(p).matrix, closed.matrix, atol=1e-10)


@given(couplings, couplings, detunings, times, times)
def test_composition_is_evolution(g_anti, g_stokes, detuning, t1, t2):
    p = CouplingParams(g_anti, g_stokes, detuning, t1)
    first, second = build_propagator(p), build_propagator(p.at_time(t2))
    assert_allclose(first.then(second), build_propagator(p.at_time(t1 + t2)).matrix, atol=1e-10)


def test_symmetric_couplings_mode_weights():
    modes = decompose_modes(CouplingParams(0.7, 0.7, 0.2, 0.0))
    assert_allclose(modes.coupled_weights, (1 / math.sqrt(2), 1 / math.sqrt(2)))
    assert_allclose(modes.uncoupled_weights, (1 / math.sqrt(2), -1 / math.sqrt(2)))


def test_resonant_normal_weights_are_balanced():
    modes = decompose_modes(CouplingParams(0.6, 0.8, 0.0, 0.0))
    assert_allclose(np.abs(modes.normal_weights), np.full((2, 2), 1 / math.sqrt(2)))


def test_detuned_basis_is_orthonormal():
    p = CouplingParams(0.6, 0.8, 0.5, 0.0)
    modes = decompose_modes(p)
    assert p.g_c == pytest.approx(1.0)
    assert modes.frequencies[1] == pytest.approx(math.sqrt(1.25))
    basis = modes.basis_matrix
    assert np.all(np.isfinite(basis))
    assert_allclose(basis @ basis.T, np.eye(3), atol=1e-14)


def test_sidebands_rebuilt_from_modes():
    modes = decompose_modes(CouplingParams(0.6, 0.8, 0.5, 0.0))
    matrix = modes.sidebands_from_modes()
    assert_allclose(matrix @ matrix.T, np.eye(2), atol=1e-14)


def test_generator_spectrum():
    p = CouplingParams(0.6, 0.8, 0.5, 0.0)
    h = hamiltonian_spec(p)
    assert_allclose(h, h.conj().T)
    assert_allclose(np.sort(np.linalg.eigvalsh(h)), sorted([0.5, math.sqrt(1.25), -math.sqrt(1.25)]), atol=1e-12)


def test_coupled_basis_hamiltonian_isolates_uncoupled_mode(detuned):
    h = coupled_basis_hamiltonian(detuned)
    assert h[2, 0] == h[2, 1] == h[0, 2] == h[1, 2] == 0
    assert_allclose(np.sort(np.linalg.eigvalsh(h)), np.sort(np.linalg.eigvalsh(hamiltonian_spec(detuned).real)),
                    atol=1e-12)


def test_coupled_mode_evolution_matches_propagator(detuned):
    u = build_propagator(detuned).matrix
    weights = np.array([detuned.g_stokes, 0.0, detuned.g_anti]) / detuned.g_c
    b_c_row = weights @ u
    from_probe, from_coupled = coupled_mode_evolution(detuned)
    assert b_c_row[PROBE] == pytest.approx(from_probe, abs=1e-12)
    assert_allclose(b_c_row[[STOKES, ANTI_STOKES]], from_coupled * weights[[STOKES, ANTI_STOKES]], atol=1e-12)


@pytest.mark.parametrize("delta, t", [(0.5, 0.3), (-0.5, 1.0), (0.2, 1.5)])
def test_phase_reference_arctan_on_principal_branch(delta, t):
    p = CouplingParams(0.6, 0.8, delta, t)
    assert p.gt < math.pi / 2
    assert phase_reference_arctan(p) == pytest.approx(build_propagator(p).phase_reference, abs=1e-12)


def test_phase_reference_continuous_through_zero_detuning():
    phases = np.array([
        build_propagator(CouplingParams(0.6, 0.8, delta, 2.5)).phase_reference
        for delta in np.linspace(-1e-5, 1e-5, 101)
    ])
    steps = (np.diff(phases) + math.pi / 2) % math.pi - math.pi / 2
    assert np.max(np.abs(steps)) < 1e-6


def test_series_branch():
    assert sin_over_g_series(1.0, 1e-7) == pytest.approx(math.sin(1e-7), abs=1e-12)
    tiny = CouplingParams(0.6, 0.8, 0.0, 1e-9)
    assert sin_over_g(tiny.g, tiny.evolution_time) == sin_over_g_series(tiny.g, tiny.evolution_time)
    assert_allclose(build_propagator(tiny).matrix, propagator_via_generator(tiny).matrix, atol=1e-12)


def test_transfer_factors_are_probe_column_shares(detuned):
    shares = np.abs(build_propagator(detuned).probe_column) ** 2
    assert_allclose(transfer_factors(detuned), shares, atol=1e-14)
    assert transfer_factors(detuned).sum() == pytest.approx(1.0)


def test_json_pairs(quarter_beat):
    pairs = build_propagator(quarter_beat).to_json_pairs()
    assert pairs[1][0] == pytest.approx([0.0, 0.8], abs=1e-15)
