"""Closed-form statistics of the moment-estimation observable.

Everything here is analytic: the forward-difference moment estimator, the
expectation and variance of the signed-binomial observable for even and odd
orders, the systematic/statistical uncertainty decomposition, the maximum
usable time step, and the grid search for the optimal step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .charfn import char_values
from .fields import FieldConfig, exact_moment

__all__ = [
    "MomentPlan",
    "EstimatorReport",
    "fd_moment",
    "expectation_C",
    "variance_C",
    "uncertainty",
    "dt_max",
    "dt_grid",
    "optimal_dt",
    "CSV_HEADER",
]

CSV_HEADER = (
    "L,k,dt,N,expectation,variance,systematic_error,"
    "total_uncertainty,relative_uncertainty"
)


@dataclass(frozen=True)
class MomentPlan:
    """Order, step and per-copy weights of one measurement observable.

    ``coeffs[j]`` is the signed weight ``(-1)**(k + j) * C(k, j) / dt**k``
    applied to the copy measured at time ``j * dt``.  For odd k the j = 0
    weight has magnitude one: its expectation contribution vanishes (the
    imaginary part of B is zero at t = 0) but it still contributes shot
    noise, which the printed variance formulas account for.
    """

    k: int
    dt: float

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("moment order k must be at least 1")
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError("dt must be positive and finite")

    @property
    def parity(self) -> str:
        return "even" if self.k % 2 == 0 else "odd"

    @property
    def m(self) -> int:
        """Half-order: k = 2m for even k, k = 2m + 1 for odd k."""
        return self.k // 2

    @property
    def copies(self) -> int:
        return self.k + 1

    @property
    def coeffs(self) -> np.ndarray:
        k = self.k
        signs = np.array([(-1) ** (k + j) for j in range(k + 1)], dtype=float)
        binom = np.array([math.comb(k, j) for j in range(k + 1)], dtype=float)
        return signs * binom / self.dt**k

    @property
    def times(self) -> np.ndarray:
        return self.dt * np.arange(self.k + 1, dtype=float)


# ----------------------------------------------------------------------
# Internal kernels over precomputed characteristic-function values.  The
# public operations evaluate B once and delegate here, so a full report at
# large L costs a single pass over the site array per copy time.
# ----------------------------------------------------------------------


def _fd_from_b(plan: MomentPlan, b: np.ndarray) -> float:
    k, dt = plan.k, plan.dt
    if plan.parity == "even":
        total = sum((-1) ** j * math.comb(k, j) * b[j].real for j in range(k + 1))
    else:
        total = sum(
            (-1) ** (j + 1) * math.comb(k, j) * b[j].imag for j in range(1, k + 1)
        )
    return (-1.0) ** plan.m * total / dt**k


def _expectation_from_b(plan: MomentPlan, b: np.ndarray) -> float:
    a = b.real if plan.parity == "even" else b.imag
    return float(np.dot(plan.coeffs, a))


def _variance_from_b(plan: MomentPlan, b: np.ndarray) -> float:
    k, dt, m = plan.k, plan.dt, plan.m
    re2 = b.real**2
    im2 = b.imag**2
    binom2 = np.array([math.comb(k, j) ** 2 for j in range(k + 1)], dtype=float)
    if plan.parity == "even":
        total = float(np.sum(binom2[1:] * (1.0 + im2[1:] - re2[1:])))
        var = total / (2.0 * dt ** (4 * m))
    else:
        total = math.comb(4 * m + 2, 2 * m + 1) + 1.0
        total += float(np.sum(binom2[1:] * (re2[1:] - im2[1:])))
        var = total / (2.0 * dt ** (4 * m + 2))
    # exact zero is attainable (deterministic outcomes); clip rounding dust
    return max(var, 0.0)


def fd_moment(cfg: FieldConfig, k: int, dt: float) -> float:
    """Forward-difference estimate of the k-th moment at step dt.

    Even orders difference the real part of B, odd orders the imaginary
    part (skipping j = 0, where it vanishes identically).
    """
    plan = MomentPlan(k=k, dt=dt)
    return _fd_from_b(plan, char_values(cfg, plan.times))


def expectation_C(cfg: FieldConfig, plan: MomentPlan) -> float:
    """Expectation of the observable: the signed forward difference.

    Equals ``(-1)**m * fd_moment`` by construction; computed here from the
    per-copy weight table so the two routes can be cross-checked.
    """
    return _expectation_from_b(plan, char_values(cfg, plan.times))


def variance_C(cfg: FieldConfig, plan: MomentPlan) -> float:
    """Variance of one observable sample, in the printed closed form."""
    return _variance_from_b(plan, char_values(cfg, plan.times))


@dataclass(frozen=True)
class EstimatorReport:
    """Analytic summary for one (L, k, dt, N) operating point."""

    L: int
    k: int
    dt: float
    n_repeats: int
    expectation: float
    variance: float
    systematic_error: float
    total_uncertainty: float
    relative_uncertainty: float
    exact_moment: float
    fd_moment: float

    def to_csv_row(self) -> str:
        cells = [
            str(self.L),
            str(self.k),
            repr(float(self.dt)),
            str(self.n_repeats),
            repr(float(self.expectation)),
            repr(float(self.variance)),
            repr(float(self.systematic_error)),
            repr(float(self.total_uncertainty)),
            repr(float(self.relative_uncertainty)),
        ]
        return ",".join(cells)


def _report(
    cfg: FieldConfig, plan: MomentPlan, N: int, exact: float | None = None
) -> EstimatorReport:
    if N < 1:
        raise ValueError("N must be at least 1")
    b = char_values(cfg, plan.times)
    fd = _fd_from_b(plan, b)
    if exact is None:
        exact = exact_moment(cfg, plan.k)
    var = _variance_from_b(plan, b)
    eps = (-1.0) ** plan.m * (fd - exact)
    total = math.sqrt(var / N + (fd - exact) ** 2)
    relative = total / abs(exact) if exact != 0.0 else math.nan
    return EstimatorReport(
        L=cfg.L,
        k=plan.k,
        dt=plan.dt,
        n_repeats=N,
        expectation=_expectation_from_b(plan, b),
        variance=var,
        systematic_error=eps,
        total_uncertainty=total,
        relative_uncertainty=relative,
        exact_moment=exact,
        fd_moment=fd,
    )


def uncertainty(cfg: FieldConfig, plan: MomentPlan, N: int) -> EstimatorReport:
    """Total and relative estimation uncertainty after N repetitions.

    The total combines the shot-noise term ``variance / N`` with the square
    of the systematic forward-difference error.  A zero exact moment leaves
    the relative uncertainty as NaN rather than raising.
    """
    return _report(cfg, plan, N)


def dt_max(omega_max: float, k: int) -> float:
    """Largest usable step: phases must stay within one period."""
    if omega_max <= 0:
        raise ValueError("omega_max must be positive")
    if k < 1:
        raise ValueError("k must be at least 1")
    return 2.0 * math.pi / (omega_max * k)


def dt_grid(
    omega_max: float, k: int, points: int, span_decades: float = 3.0
) -> np.ndarray:
    """Log-spaced step grid ending exactly at dt_max(omega_max, k)."""
    if points < 3:
        raise ValueError("grid needs at least 3 points")
    top = dt_max(omega_max, k)
    return np.geomspace(top * 10.0**-span_decades, top, points)


def optimal_dt(
    cfg: FieldConfig,
    k: int,
    N: int,
    grid: int = 200,
    omega_max: float | None = None,
) -> tuple[float, EstimatorReport]:
    """Grid-scan the step for minimum relative uncertainty.

    Deterministic: ties break toward the smaller step.  If the exact moment
    is zero the relative uncertainty is undefined everywhere, and the scan
    falls back to minimizing the total uncertainty (the NaN propagates in
    the returned report).
    """
    if omega_max is None:
        omega_max = float(np.max(cfg.omegas))
    exact = exact_moment(cfg, k)
    best: tuple[float, EstimatorReport] | None = None
    for dt in dt_grid(omega_max, k, grid):
        report = _report(cfg, MomentPlan(k=k, dt=float(dt)), N, exact=exact)
        key = report.relative_uncertainty
        if math.isnan(key):
            key = report.total_uncertainty
        if best is None or key < best[0]:
            best = (key, report)
    assert best is not None
    return best[1].dt, best[1]
