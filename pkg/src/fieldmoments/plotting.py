"""Figure rendering for sweep outputs.

Renders the two standard views to image files next to the delimited data:
relative uncertainty against the time step (log-log, exposing the
statistical/systematic trade-off) and minimum relative uncertainty against
the number of sites (log-log trend).
"""

from __future__ import annotations

from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .estimator import EstimatorReport

__all__ = ["plot_dt_sweep", "plot_l_sweep"]


def plot_dt_sweep(rows: Sequence[EstimatorReport], path: str) -> None:
    """Relative uncertainty versus step for one (L, k, N) sweep."""
    dts = [r.dt for r in rows]
    rel = [r.relative_uncertainty for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.loglog(dts, rel, marker=".", lw=1)
    ax.set_xlabel(r"time step $\Delta t$")
    ax.set_ylabel("relative uncertainty")
    r0 = rows[0]
    ax.set_title(f"L={r0.L}, k={r0.k}, N={r0.n_repeats}")
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_l_sweep(
    l_values: Sequence[int], min_rel: Sequence[float], k: int, path: str
) -> None:
    """Minimum relative uncertainty versus site count."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.loglog(l_values, min_rel, marker="o", lw=1)
    ax.set_xlabel("number of sites L")
    ax.set_ylabel("min relative uncertainty")
    ax.set_title(f"k={k}")
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
