import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.stats import binom

from raman_multiplex.errors import ConfigValidationError
from raman_multiplex.fock_oracle import evolve, measure_moments
from raman_multiplex.propagator import ANTI_STOKES, PROBE, STOKES, build_propagator
from raman_multiplex.states import (
    BIPARTITIONS,
    CoherentMixture,
    CoherentTriple,
    FockSpec,
    MixtureSpec,
    Separability,
    ThermalSpec,
    binomial_marginal_purity,
    coherent_ket,
    coherent_mixture_kets,
    evolve_coherent,
    fock_ket,
    fock_output,
    mixture_moments,
    parse_state_spec,
    sample_thermal_mixture,
    separability_witness,
    squeezed_moments,
    squeezed_vacuum_ket,
    thermal_distribution,
    transform_mixture,
    vacuum_sideband_p_reduction,
)


@pytest.fixture
def plus_minus():
    return CoherentMixture([0.5, 0.5], (CoherentTriple.probe(0.5), CoherentTriple.probe(-0.5)))


def test_coherent_probe_splits_into_sidebands(quarter_beat):
    out = evolve_coherent(CoherentTriple.probe(0.5), build_propagator(quarter_beat))
    assert_allclose(out.amplitudes, [0.4j, 0.0, 0.3j], atol=1e-15)
    assert not out.has_vacuum_sidebands


def test_coherent_output_matches_oracle(basis, detuned):
    state = CoherentTriple.probe(0.6 - 0.2j)
    expected = coherent_ket(evolve_coherent(state, build_propagator(detuned)), basis)
    assert evolve(coherent_ket(state, basis), detuned).fidelity(expected) == pytest.approx(1.0, abs=1e-10)


def test_mixture_components_transported(quarter_beat, plus_minus):
    out = transform_mixture(plus_minus, build_propagator(quarter_beat))
    assert_allclose(out.weights, [0.5, 0.5])
    assert_allclose(out.amplitude_table, [[0.4j, 0.0, 0.3j], [-0.4j, 0.0, -0.3j]], atol=1e-15)


def test_mixture_weights_validated():
    probe = CoherentTriple.probe(0.1)
    with pytest.raises(ConfigValidationError):
        CoherentMixture([0.5, 0.6], (probe, probe))
    with pytest.raises(ConfigValidationError):
        CoherentMixture([1.0, 0.0], (probe, probe))


def test_mixture_moments_match_oracle(basis, detuned):
    mixture = CoherentMixture([0.3, 0.7], (CoherentTriple([0.2, 0.5j, 0.0]), CoherentTriple([0.0, -0.4, 0.1j])))
    transported = mixture_moments(transform_mixture(mixture, build_propagator(detuned)))
    measured = measure_moments(evolve(coherent_mixture_kets(mixture, basis), detuned))
    assert_allclose(measured.first, transported.first, atol=1e-8)
    assert_allclose(measured.hermitian, transported.hermitian, atol=1e-8)
    assert_allclose(measured.number_moments, transported.number_moments, atol=1e-8)
    assert_allclose(measured.cross_number, transported.cross_number, atol=1e-8)


def test_p_reduction_stays_on_probe_line(detuned):
    propagator = build_propagator(detuned)
    support = vacuum_sideband_p_reduction([(0.25, 0.5), (0.75, -0.3 + 0.2j)], propagator)
    assert support.sideband_constraint_residual < 1e-12
    assert support.probe_recovery_residual < 1e-12
    assert_allclose(support.mixture.weights, [0.25, 0.75])
    assert_allclose(support.mixture.amplitude_table[1], (-0.3 + 0.2j) * support.line, atol=1e-15)


def test_thermal_sampling_is_seeded():
    first = sample_thermal_mixture(0.4, 50, seed=7)
    again = sample_thermal_mixture(0.4, 50, seed=7)
    other = sample_thermal_mixture(0.4, 50, seed=8)
    assert_allclose(first.amplitude_table, again.amplitude_table)
    assert not np.allclose(first.amplitude_table, other.amplitude_table)
    assert first.weights.sum() == pytest.approx(1.0, abs=1e-15)
    assert first.has_vacuum_sidebands


def test_thermal_sampling_mean():
    mixture = sample_thermal_mixture(0.4, 20000, seed=1)
    assert mixture_moments(mixture).mean_photon_numbers[PROBE] == pytest.approx(0.4, abs=0.02)


def test_fock_single_photon_table(quarter_beat):
    table = dict(fock_output(1, build_propagator(quarter_beat)).occupation_table())
    assert table[(1, 0, 0)] == pytest.approx(0.8j, abs=1e-15)
    assert table[(0, 0, 1)] == pytest.approx(0.6j, abs=1e-15)
    assert abs(table[(0, 1, 0)]) < 1e-15


@pytest.mark.parametrize("n", [1, 2, 4])
def test_fock_output_matches_oracle(basis, detuned, n):
    expected = fock_output(n, build_propagator(detuned)).to_ket(basis)
    out = evolve(fock_ket(0, n, 0, basis), detuned)
    assert_allclose(out.amplitudes, expected.amplitudes, atol=1e-10)


def test_fock_marginals_are_binomial(detuned):
    output = fock_output(3, build_propagator(detuned))
    purities = output.reduced_purities()
    for label, mode in BIPARTITIONS.items():
        share = output.shares[mode]
        assert_allclose(output.mode_distribution(mode), binom.pmf(np.arange(4), 3, share), atol=1e-14)
        assert purities[label] == pytest.approx(binomial_marginal_purity(3, share), abs=1e-13)


def test_single_photon_output_is_entangled(quarter_beat):
    result = separability_witness(fock_output(1, build_propagator(quarter_beat)))
    assert result.classification is Separability.ENTANGLED
    assert result.purities["stokes|probe,anti_stokes"] == pytest.approx(0.64 ** 2 + 0.36 ** 2)
    assert result.purities["probe|stokes,anti_stokes"] == pytest.approx(1.0)


def test_fock_output_at_zero_time_is_product(detuned):
    result = separability_witness(fock_output(2, build_propagator(detuned.at_time(0.0))))
    assert result.classification is Separability.PRODUCT


def test_mixture_is_separable_by_construction(plus_minus):
    result = separability_witness(plus_minus)
    assert result.classification is Separability.SEPARABLE
    assert result.decomposition[0] == (0.5, [[0.0, 0.0], [0.5, 0.0], [0.0, 0.0]])


def test_squeezed_ket_matches_moments(wide_basis):
    measured = measure_moments(squeezed_vacuum_ket(0.3, 0.4, wide_basis, tail_tol=1e-8))
    expected = squeezed_moments(0.3, 0.4)
    assert measured.pair[PROBE, PROBE] == pytest.approx(expected.pair[PROBE, PROBE], abs=1e-7)
    assert measured.hermitian[PROBE, PROBE].real == pytest.approx(math.sinh(0.3) ** 2, abs=1e-7)
    assert measured.number_moments[STOKES, 0] == 0 and measured.number_moments[ANTI_STOKES, 0] == 0


def test_thermal_distribution_is_normalized():
    probabilities = thermal_distribution(0.5, 30)
    assert probabilities.sum() == pytest.approx(1.0)
    assert probabilities[1] / probabilities[0] == pytest.approx(1 / 3)
    assert_allclose(thermal_distribution(0.0, 4), [1, 0, 0, 0, 0])


def test_parse_coherent_block(basis):
    state = parse_state_spec({"kind": "coherent", "alpha": [0.5, 0.0]})
    assert state.kind == "coherent"
    assert state.moments().first[PROBE] == 0.5
    assert state.ket(basis).amplitude(0, 0, 0) == pytest.approx(math.exp(-0.125))


def test_parse_mixture_and_sampled_thermal():
    mixture = parse_state_spec({
        "kind": "mixture",
        "components": [
            {"weight": 0.5, "amplitudes": [[0, 0], [0.5, 0], [0, 0]]},
            {"weight": 0.5, "amplitudes": [[0, 0], [-0.5, 0], [0, 0]]},
        ],
    })
    assert isinstance(mixture.spec, MixtureSpec)
    assert mixture.moments().mean_photon_numbers[PROBE] == pytest.approx(0.25)

    thermal = parse_state_spec({"kind": "thermal", "mean": 0.3, "samples": 10}, seed=3)
    assert isinstance(thermal.spec, ThermalSpec)
    assert_allclose(thermal.point_masses().amplitude_table, sample_thermal_mixture(0.3, 10, 3).amplitude_table)


@pytest.mark.parametrize("document", [
    {"kind": "laser", "alpha": [0.5, 0.0]},
    {"kind": "fock", "n": -1},
    {"kind": "coherent"},
    {"kind": "mixture", "components": [{"weight": 0.4, "amplitudes": [[0, 0], [0.5, 0], [0, 0]]}]},
])
def test_parse_rejects_bad_blocks(document):
    with pytest.raises(ConfigValidationError):
        parse_state_spec(document)


def test_fock_block_builds_probe_fock_state(basis):
    state = parse_state_spec({"kind": "fock", "n": 2})
    assert isinstance(state.spec, FockSpec)
    assert state.point_masses() is None
    assert state.ket(basis).amplitude(0, 2, 0) == 1
