"""Bundled self-validation: oracle equivalence and cross-module identities.

Each check returns (name, passed, detail); the CLI turns any failure into a
nonzero exit status.  The per-copy variance oracle here is derived
independently of the printed closed forms it certifies, so a sign error in
either side is caught.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from . import anonymity, estimator, oracle, protocol
from .charfn import char_values
from .fields import FieldConfig

__all__ = ["percopy_variance", "run_validate", "CheckResult"]

CheckResult = tuple[str, bool, str]


def percopy_variance(cfg: FieldConfig, plan: estimator.MomentPlan) -> float:
    """Independent variance route: sum of weight^2 times per-copy variance.

    Per copy, the observable takes +1/-1 with probabilities p_plus/p_minus
    and 0 otherwise, so its second moment is (1 + |B|^2) / 2 and its mean
    is the x- or y-projection of B.
    """
    b = char_values(cfg, plan.times)
    a = b.real if plan.parity == "even" else b.imag
    second = (1.0 + b.real**2 + b.imag**2) / 2.0
    return float(np.dot(plan.coeffs**2, second - a**2))


def _check_oracle_equivalence(
    rng: np.random.Generator, l_values: tuple[int, ...] = (2, 4, 8)
) -> CheckResult:
    worst = 1.0
    for L in l_values:
        for _ in range(20):
            cfg = FieldConfig(rng.uniform(1.0, 5.0, size=L))
            t = float(rng.uniform(0.0, 2.0))
            fid = oracle.fidelity(
                oracle.run_pipeline(cfg, t), oracle.analytic_reduced_state(cfg, t)
            )
            worst = min(worst, fid)
    ok = worst >= 1.0 - 1e-12
    return ("oracle-equivalence", ok, f"min fidelity {worst:.15f}")


def _check_povm_identity(rng: np.random.Generator) -> CheckResult:
    """POVM branch probabilities equal the sampler's outcome probabilities."""
    inv = 1.0 / math.sqrt(2.0)
    bases = {
        "x": (np.array([inv, inv]), np.array([inv, -inv])),
        "y": (np.array([inv, 1j * inv]), np.array([inv, -1j * inv])),
    }
    worst = 0.0
    for L in (2, 4, 8):
        cfg = FieldConfig(rng.uniform(1.0, 5.0, size=L))
        t = float(rng.uniform(0.0, 2.0))
        rd = oracle.run_pipeline(cfg, t)
        for basis, (plus, minus) in bases.items():
            dist = protocol.outcome_distribution(cfg, t, basis)
            p_plus, _ = oracle.povm_probabilities(rd, plus)
            p_minus, _ = oracle.povm_probabilities(rd, minus)
            worst = max(worst, abs(p_plus - dist.p_plus), abs(p_minus - dist.p_minus))
    ok = worst <= 1e-12
    return ("povm-identity", ok, f"max |gate - analytic| = {worst:.3e}")


def _check_variance_identity(
    rng: np.random.Generator,
    variance_fn: Callable[[FieldConfig, estimator.MomentPlan], float] | None = None,
) -> CheckResult:
    variance_fn = variance_fn or estimator.variance_C
    worst = 0.0
    for _ in range(100):
        L = int(rng.integers(2, 65))
        cfg = FieldConfig(rng.uniform(1.0, 5.0, size=L))
        for k in (1, 2, 3, 4):
            dt = float(rng.uniform(0.05, 1.0)) * estimator.dt_max(5.0, k)
            plan = estimator.MomentPlan(k=k, dt=dt)
            printed = variance_fn(cfg, plan)
            independent = percopy_variance(cfg, plan)
            rel = abs(printed - independent) / max(abs(independent), 1e-300)
            worst = max(worst, rel)
    ok = worst <= 1e-10
    return ("variance-identity", ok, f"max relative gap {worst:.3e}")


def _check_qfi_inverse() -> CheckResult:
    worst = 0.0
    for L in (2, 4, 16, 64, 256):
        prod = anonymity.dense_qfi(L, 2, 0.7) @ anonymity.dense_qfi_inverse(L, 2, 0.7)
        worst = max(worst, float(np.max(np.abs(prod - np.eye(L)))))
    ok = worst <= 1e-10
    return ("qfi-inverse", ok, f"max |F F^-1 - I| = {worst:.3e}")


def _check_cswap_involution(rng: np.random.Generator) -> CheckResult:
    worst = 0.0
    for L in (1, 2, 4):
        state = oracle.prepare_initial(L)
        state = oracle.apply_field_evolution(
            state, FieldConfig(rng.uniform(1.0, 5.0, size=L)), 0.4
        )
        twice = oracle.apply_cswap(oracle.apply_cswap(state))
        worst = max(worst, float(np.max(np.abs(twice.amplitudes - state.amplitudes))))
    ok = worst <= 1e-13
    return ("cswap-involution", ok, f"max amplitude drift {worst:.3e}")


def run_validate(
    seed: int = 20240817,
    variance_fn: Callable[[FieldConfig, estimator.MomentPlan], float] | None = None,
    l_values: tuple[int, ...] = (2, 4, 8),
) -> list[CheckResult]:
    """Run every bundled check; deterministic for a fixed seed."""
    rng = np.random.Generator(np.random.PCG64(seed))
    return [
        _check_oracle_equivalence(rng, l_values),
        _check_povm_identity(rng),
        _check_variance_identity(rng, variance_fn),
        _check_qfi_inverse(),
        _check_cswap_involution(rng),
    ]
