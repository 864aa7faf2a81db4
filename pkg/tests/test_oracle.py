import math

import numpy as np
import pytest

from fieldmoments import FieldConfig, char_fn, outcome_distribution
from fieldmoments.oracle import (
    analytic_reduced_state,
    apply_cswap,
    apply_field_evolution,
    fidelity,
    povm_probabilities,
    prepare_initial,
    reduced_final_state,
    run_pipeline,
)

INV = 1.0 / math.sqrt(2.0)
PLUS_X = np.array([INV, INV])
MINUS_X = np.array([INV, -INV])
PLUS_Y = np.array([INV, 1j * INV])
MINUS_Y = np.array([INV, -1j * INV])


def test_prepare_initial_structure_L2():
    state = prepare_initial(2)
    amps = state.amplitudes
    assert amps.size == 16
    nonzero = np.flatnonzero(np.abs(amps) > 0)
    # (register l, data d, sensors 0) for l in {0, 1}, d in {0, 1}
    expected = sorted((l << 3) | (d << 2) for l in (0, 1) for d in (0, 1))
    assert nonzero.tolist() == expected
    assert np.allclose(amps[nonzero], 0.5)


def test_prepare_initial_single_site():
    state = prepare_initial(1)
    assert state.amplitudes.size == 4  # zero register qubits
    assert state.n_register == 0


def test_prepare_initial_size_and_shape_guards():
    with pytest.raises(ValueError):
        prepare_initial(32)
    with pytest.raises(ValueError):
        prepare_initial(6)
    with pytest.raises(ValueError):
        prepare_initial(0)


def test_cswap_is_involution_and_unitary():
    rng = np.random.default_rng(1)
    for L in (1, 2, 4):
        state = prepare_initial(L)
        state = apply_field_evolution(state, FieldConfig(rng.uniform(1, 5, L)), 0.6)
        once = apply_cswap(state)
        assert np.sum(np.abs(once.amplitudes) ** 2) == pytest.approx(1.0, abs=1e-14)
        twice = apply_cswap(once)
        assert np.max(np.abs(twice.amplitudes - state.amplitudes)) < 1e-13


def test_cswap_moves_data_plus_onto_addressed_sensor():
    state = apply_cswap(prepare_initial(2))
    amps = state.amplitudes
    # branch l: register |l>, data |0>, sensor l in |+>, other sensor |0>
    expected = np.zeros(16, dtype=complex)
    for l in (0, 1):
        for sensor_bit in (0, 1):
            expected[(l << 3) | (sensor_bit << l)] = 0.5
    assert np.max(np.abs(amps - expected)) < 1e-14


def test_field_evolution_identity_at_t0():
    state = apply_cswap(prepare_initial(4))
    evolved = apply_field_evolution(state, FieldConfig([1.0, 2.0, 3.0, 4.0]), 0.0)
    assert np.array_equal(evolved.amplitudes, state.amplitudes)


def test_field_evolution_preserves_norm():
    rng = np.random.default_rng(2)
    state = apply_cswap(prepare_initial(8))
    evolved = apply_field_evolution(state, FieldConfig(rng.uniform(1, 5, 8)), 1.3)
    assert np.sum(np.abs(evolved.amplitudes) ** 2) == pytest.approx(1.0, abs=1e-14)


def test_field_evolution_requires_matching_length():
    with pytest.raises(ValueError):
        apply_field_evolution(prepare_initial(2), FieldConfig([1.0, 2.0, 3.0]), 0.1)


def test_data_conditional_phases_L2():
    """After cswap / evolve, the addressed sensor carries exp(i w_l t)."""
    cfg = FieldConfig([1.0, 5.0])
    t = 0.3
    state = apply_field_evolution(apply_cswap(prepare_initial(2)), cfg, t)
    amps = state.amplitudes
    for l, w in enumerate(cfg.omegas):
        lo = amps[(l << 3) | 0]
        hi = amps[(l << 3) | (1 << l)]
        assert hi / lo == pytest.approx(np.exp(1j * w * t), abs=1e-13)


def test_reduced_state_matches_analytic():
    rng = np.random.default_rng(3)
    for L in (2, 4, 8):
        for _ in range(20):
            cfg = FieldConfig(rng.uniform(1, 5, L))
            t = float(rng.uniform(0, 2))
            fid = fidelity(run_pipeline(cfg, t), analytic_reduced_state(cfg, t))
            assert fid >= 1.0 - 1e-12


def test_reduced_state_at_t0_is_uniform_plus():
    reduced = run_pipeline(FieldConfig([1.0, 2.0, 3.0, 4.0]), 0.0)
    assert np.allclose(reduced, 1.0 / math.sqrt(8.0))


def test_reduced_final_state_signals_entangled_sensors():
    # before the second cswap the sensors are still entangled with the rest
    cfg = FieldConfig([1.0, 5.0])
    state = apply_field_evolution(apply_cswap(prepare_initial(2)), cfg, 0.4)
    with pytest.raises(ValueError):
        reduced_final_state(state)


def test_povm_plus_x_at_t0():
    reduced = run_pipeline(FieldConfig([2.0, 3.0]), 0.0)
    p1, p2 = povm_probabilities(reduced, PLUS_X)
    assert p1 == pytest.approx(1.0, abs=1e-13)
    assert p2 == pytest.approx(0.0, abs=1e-13)


def test_povm_reproduces_outcome_probabilities():
    rng = np.random.default_rng(4)
    for L in (2, 4, 8):
        cfg = FieldConfig(rng.uniform(1, 5, L))
        t = float(rng.uniform(0, 2))
        reduced = run_pipeline(cfg, t)
        for basis, plus, minus in (("x", PLUS_X, MINUS_X), ("y", PLUS_Y, MINUS_Y)):
            dist = outcome_distribution(cfg, t, basis)
            assert povm_probabilities(reduced, plus)[0] == pytest.approx(
                dist.p_plus, abs=1e-12
            )
            assert povm_probabilities(reduced, minus)[0] == pytest.approx(
                dist.p_minus, abs=1e-12
            )


def test_povm_difference_recovers_char_fn():
    cfg = FieldConfig([1.0, 2.5, 3.5, 5.0])
    t = 0.9
    reduced = run_pipeline(cfg, t)
    b = char_fn(cfg, t)
    px = povm_probabilities(reduced, PLUS_X)[0] - povm_probabilities(reduced, MINUS_X)[0]
    py = povm_probabilities(reduced, PLUS_Y)[0] - povm_probabilities(reduced, MINUS_Y)[0]
    assert px == pytest.approx(b.re, abs=1e-12)
    assert py == pytest.approx(b.im, abs=1e-12)


def test_povm_probability_permutation_invariant():
    cfg = FieldConfig([1.0, 4.0])
    swapped = FieldConfig([4.0, 1.0])
    t = 0.7
    for psi in (PLUS_X, MINUS_X, PLUS_Y, MINUS_Y):
        assert povm_probabilities(run_pipeline(cfg, t), psi)[0] == pytest.approx(
            povm_probabilities(run_pipeline(swapped, t), psi)[0], abs=1e-13
        )


def test_complement_branch_breaks_symmetry():
    """The miss branch retains which-site information under a field swap."""
    t = 0.7
    psi = PLUS_X
    branches = []
    for cfg in (FieldConfig([1.0, 4.0]), FieldConfig([4.0, 1.0])):
        reduced = run_pipeline(cfg, t)
        rd = reduced.reshape(2, 2)
        hit_amp = np.sum(rd @ psi.conj()) / math.sqrt(2.0)
        hit = np.kron(np.full(2, 1.0 / math.sqrt(2.0)), psi) * hit_amp
        miss = reduced - hit
        branches.append(miss / np.linalg.norm(miss))
    assert fidelity(branches[0], branches[1]) < 1.0 - 1e-6


def test_povm_rejects_unnormalized_psi():
    reduced = run_pipeline(FieldConfig([1.0, 2.0]), 0.1)
    with pytest.raises(ValueError):
        povm_probabilities(reduced, np.array([1.0, 1.0]))
