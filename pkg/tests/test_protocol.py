import math

import numpy as np
import pytest

from fieldmoments import (
    FieldConfig,
    MomentPlan,
    UniformFieldDistribution,
    char_fn,
    draw_fields,
    estimate_moment_mc,
    expectation_C,
    outcome_distribution,
    sample_protocol,
    variance_C,
)


def test_distribution_at_time_zero_x():
    dist = outcome_distribution(FieldConfig([1.3, 2.2]), 0.0, "x")
    assert dist.p_plus == pytest.approx(1.0, abs=1e-15)
    assert dist.p_minus == pytest.approx(0.0, abs=1e-15)
    assert dist.p_zero == pytest.approx(0.0, abs=1e-15)


def test_distribution_at_time_zero_y():
    # |B| = 1 and Im B = 0: equal +-1 outcomes, no projector miss
    dist = outcome_distribution(FieldConfig([1.3, 2.2]), 0.0, "y")
    assert dist.p_plus == pytest.approx(0.5, abs=1e-15)
    assert dist.p_minus == pytest.approx(0.5, abs=1e-15)
    assert dist.p_zero == pytest.approx(0.0, abs=1e-15)


def test_distribution_two_site_example():
    dist = outcome_distribution(FieldConfig([1.0, 5.0]), math.pi / 3, "x")
    assert dist.p_plus == pytest.approx(0.5625, abs=1e-13)
    assert dist.p_minus == pytest.approx(0.0625, abs=1e-13)
    assert dist.p_zero == pytest.approx(0.375, abs=1e-13)


def test_distribution_normalization_and_mean_identity():
    rng = np.random.default_rng(12)
    for _ in range(25):
        cfg = FieldConfig(rng.uniform(1, 5, int(rng.integers(1, 50))))
        t = float(rng.uniform(0, 3))
        b = char_fn(cfg, t)
        for basis, a in (("x", b.re), ("y", b.im)):
            dist = outcome_distribution(cfg, t, basis)
            assert dist.p_plus + dist.p_minus + dist.p_zero == pytest.approx(1.0, abs=1e-14)
            assert 0.0 <= dist.p_plus <= 1.0
            assert 0.0 <= dist.p_minus <= 1.0
            assert 0.0 <= dist.p_zero <= 1.0
            assert dist.p_plus - dist.p_minus == pytest.approx(a, abs=1e-13)


def test_distribution_permutation_invariant():
    rng = np.random.default_rng(13)
    omegas = rng.uniform(1, 5, 9)
    for basis in ("x", "y"):
        a = outcome_distribution(FieldConfig(omegas), 0.8, basis)
        b = outcome_distribution(FieldConfig(rng.permutation(omegas)), 0.8, basis)
        assert a.p_plus == pytest.approx(b.p_plus, abs=1e-13)
        assert a.p_minus == pytest.approx(b.p_minus, abs=1e-13)
        assert a.p_zero == pytest.approx(b.p_zero, abs=1e-13)


def test_distribution_rejects_bad_basis():
    with pytest.raises(ValueError):
        outcome_distribution(FieldConfig([1.0]), 0.1, "z")


def test_sampler_deterministic_for_seed():
    cfg = FieldConfig([1.0, 3.0, 5.0])
    plan = MomentPlan(k=2, dt=0.3)
    a = sample_protocol(cfg, plan, 500, seed=99)
    b = sample_protocol(cfg, plan, 500, seed=99)
    assert np.array_equal(a.per_repeat_C, b.per_repeat_C)
    assert a.d_estimate == b.d_estimate
    c = sample_protocol(cfg, plan, 500, seed=100)
    assert not np.array_equal(a.per_repeat_C, c.per_repeat_C)


def test_sampler_mean_is_exact_mean_of_samples():
    run = sample_protocol(FieldConfig([2.0]), MomentPlan(k=1, dt=0.2), 1000, seed=3)
    assert run.d_estimate == float(np.mean(run.per_repeat_C))
    assert run.d_variance_empirical == pytest.approx(
        float(np.var(run.per_repeat_C, ddof=1))
    )


def test_sampler_constant_field_mean():
    c = 2.0
    cfg = FieldConfig([c] * 4)
    plan = MomentPlan(k=1, dt=0.05)
    run = sample_protocol(cfg, plan, 10**5, seed=21)
    se = math.sqrt(variance_C(cfg, plan) / run.N)
    assert abs(run.d_estimate - math.sin(c * 0.05) / 0.05) <= 5 * se


def test_sampler_variance_matches_analytic():
    cfg = draw_fields(UniformFieldDistribution(1.0, 5.0, seed=64), 64)
    plan = MomentPlan(k=2, dt=0.3)
    run = sample_protocol(cfg, plan, 10**5, seed=8)
    assert run.d_variance_empirical == pytest.approx(variance_C(cfg, plan), rel=0.05)


def test_sampler_rejects_zero_repeats():
    with pytest.raises(ValueError):
        sample_protocol(FieldConfig([1.0]), MomentPlan(k=1, dt=0.1), 0, seed=0)


def test_estimate_moment_sign_unwrap():
    cfg = FieldConfig([2.0])
    plan = MomentPlan(k=2, dt=0.1)
    run = sample_protocol(cfg, plan, 2000, seed=6)
    assert estimate_moment_mc(run, 1) == run.d_estimate
    assert estimate_moment_mc(run, 2) == -run.d_estimate
    assert estimate_moment_mc(run, 3) == -run.d_estimate
    assert estimate_moment_mc(run, 4) == run.d_estimate


def test_estimate_moment_third_order_constant_field():
    c = 1.5
    cfg = FieldConfig([c] * 2)
    plan = MomentPlan(k=3, dt=0.04)
    run = sample_protocol(cfg, plan, 2 * 10**5, seed=17)
    se = math.sqrt(variance_C(cfg, plan) / run.N)
    fd = -expectation_C(cfg, plan)  # k = 3 has m = 1
    assert abs(fd - c**3) < 0.03  # small-step systematic gap
    assert abs(estimate_moment_mc(run, 3) - fd) <= 5 * se


def test_ensemble_variance_of_mean():
    """Across seeds, the variance of the run mean is variance_C / N."""
    cfg = draw_fields(UniformFieldDistribution(1.0, 5.0, seed=1), 32)
    plan = MomentPlan(k=1, dt=0.25)
    n = 2000
    n_seeds = 1000  # relative error of the variance estimate ~ sqrt(2/1000)
    means = [
        sample_protocol(cfg, plan, n, seed=s).d_estimate for s in range(n_seeds)
    ]
    expected = variance_C(cfg, plan) / n
    assert float(np.var(means, ddof=1)) == pytest.approx(expected, rel=0.20)


def test_json_summary_gates_raw_samples():
    import json

    run = sample_protocol(FieldConfig([1.0, 2.0]), MomentPlan(k=1, dt=0.2), 50, seed=2)
    summary = json.loads(run.to_json())
    assert "per_repeat_C" not in summary
    assert summary["N"] == 50 and summary["seed"] == 2
    full = json.loads(run.to_json(include_raw=True))
    assert len(full["per_repeat_C"]) == 50
