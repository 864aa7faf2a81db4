"""Monte Carlo sampling of the protocol's measurement layer.

Each copy's observable is a rank-one register projector tensored with a
Pauli on the data qubit, so its outcomes are ternary: +1 and -1 when the
register lands in the all-plus state, 0 otherwise.  Copies live on disjoint
product factors, so sampling them independently reproduces the joint
observable's mean and variance exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .charfn import char_fn, char_values
from .estimator import MomentPlan
from .fields import FieldConfig

__all__ = [
    "OutcomeDistribution",
    "SampleRun",
    "outcome_distribution",
    "sample_protocol",
    "estimate_moment_mc",
]


@dataclass(frozen=True)
class OutcomeDistribution:
    """Ternary outcome probabilities of one copy's measurement."""

    p_plus: float
    p_minus: float
    p_zero: float
    basis: str

    def __post_init__(self) -> None:
        if self.basis not in ("x", "y"):
            raise ValueError("basis must be 'x' or 'y'")


def _probabilities(abs2: float, a: float) -> tuple[float, float, float]:
    p_plus = (1.0 + abs2 + 2.0 * a) / 4.0
    p_minus = (1.0 + abs2 - 2.0 * a) / 4.0
    p_zero = (1.0 - abs2) / 2.0
    # |B| <= 1 guarantees all three lie in [0, 1]; clip rounding dust only
    return (
        min(max(p_plus, 0.0), 1.0),
        min(max(p_minus, 0.0), 1.0),
        min(max(p_zero, 0.0), 1.0),
    )


def outcome_distribution(cfg: FieldConfig, t: float, basis: str) -> OutcomeDistribution:
    """Outcome probabilities for a data-qubit measurement along x or y."""
    if basis not in ("x", "y"):
        raise ValueError("basis must be 'x' or 'y'")
    b = char_fn(cfg, t)
    a = b.re if basis == "x" else b.im
    p_plus, p_minus, p_zero = _probabilities(b.abs2, a)
    return OutcomeDistribution(p_plus=p_plus, p_minus=p_minus, p_zero=p_zero, basis=basis)


@dataclass(frozen=True)
class SampleRun:
    """Outcome of N independent repetitions of the protocol."""

    seed: int
    N: int
    k: int
    dt: float
    per_repeat_C: np.ndarray
    d_estimate: float
    d_variance_empirical: float

    def to_json(self, include_raw: bool = False) -> str:
        payload = {
            "seed": self.seed,
            "N": self.N,
            "k": self.k,
            "dt": self.dt,
            "d_estimate": self.d_estimate,
            "d_variance_empirical": self.d_variance_empirical,
        }
        if include_raw:
            payload["per_repeat_C"] = [float(c) for c in self.per_repeat_C]
        return json.dumps(payload)


def sample_protocol(cfg: FieldConfig, plan: MomentPlan, N: int, seed: int) -> SampleRun:
    """Draw N observable samples, one ternary outcome per copy.

    Repetition streams come from a counter-based generator (numpy Philox)
    keyed by the seed: row r of the uniform block is repetition r's stream,
    so results are reproducible independent of scheduling.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    basis = "x" if plan.parity == "even" else "y"
    b = char_values(cfg, plan.times)
    a = b.real if basis == "x" else b.imag
    abs2 = b.real**2 + b.imag**2

    thresh_plus = np.empty(plan.copies)
    thresh_nonzero = np.empty(plan.copies)
    for j in range(plan.copies):
        p_plus, p_minus, _ = _probabilities(float(abs2[j]), float(a[j]))
        thresh_plus[j] = p_plus
        thresh_nonzero[j] = p_plus + p_minus

    rng = np.random.Generator(np.random.Philox(key=seed))
    u = rng.random((N, plan.copies))
    outcomes = np.where(u < thresh_plus, 1.0, np.where(u < thresh_nonzero, -1.0, 0.0))
    per_repeat = outcomes @ plan.coeffs
    d_estimate = float(np.mean(per_repeat))
    d_var = float(np.var(per_repeat, ddof=1)) if N > 1 else math.nan
    return SampleRun(
        seed=seed,
        N=N,
        k=plan.k,
        dt=plan.dt,
        per_repeat_C=per_repeat,
        d_estimate=d_estimate,
        d_variance_empirical=d_var,
    )


def estimate_moment_mc(run: SampleRun, k: int) -> float:
    """Unwrap the sampled mean into a moment estimate (sign per half-order)."""
    return (-1.0) ** (k // 2) * run.d_estimate
