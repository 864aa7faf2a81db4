"""Fisher-information bounds on what an eavesdropper can learn per site.

The information matrix over the L site frequencies has a uniform diagonal
and a uniform off-diagonal (scaled identity plus all-ones), so it is stored
in that two-parameter compressed form; dense materialization is for
validation only.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

__all__ = [
    "QfiReport",
    "sum_of_squares",
    "qfi_matrix",
    "qfi_inverse",
    "security_margin",
    "max_secure_N",
    "qfi_report",
    "dense_qfi",
    "dense_qfi_inverse",
]

SECURITY_THRESHOLD = math.pi


def sum_of_squares(k: int) -> int:
    """Exact integer sum of j**2 for j = 1..k."""
    if k < 1:
        raise ValueError("k must be at least 1")
    return k * (k + 1) * (2 * k + 1) // 6


@dataclass(frozen=True)
class QfiReport:
    """Compressed information matrix, its inverse, and the security verdict."""

    L: int
    k: int
    dt: float
    N: int
    qfi_diag: float
    qfi_offdiag: float
    inv_diag: float
    inv_offdiag: float
    freq_bound: float
    phase_bound: float
    secure: bool

    def to_json(self) -> str:
        return json.dumps(asdict(self))


def _check_matrix_args(L: int, k: int, dt: float) -> None:
    if L < 2:
        raise ValueError("matrix form needs L >= 2")
    if k < 1:
        raise ValueError("k must be at least 1")
    if dt <= 0:
        raise ValueError("dt must be positive")


def qfi_matrix(L: int, k: int, dt: float) -> tuple[float, float]:
    """(diagonal, off-diagonal) entries of the information matrix."""
    _check_matrix_args(L, k, dt)
    s = sum_of_squares(k)
    diag = (2 * L - 1) / L**2 * dt**2 * s
    offdiag = -1.0 / L**2 * dt**2 * s
    return diag, offdiag


def qfi_inverse(L: int, k: int, dt: float) -> tuple[float, float]:
    """(diagonal, off-diagonal) entries of the inverse information matrix."""
    _check_matrix_args(L, k, dt)
    s = sum_of_squares(k)
    denom = 2.0 * dt**2 * s
    return (1 + L) / denom, 1.0 / denom


def security_margin(L: int, k: int, N: int) -> tuple[float, bool]:
    """Per-site phase-uncertainty lower bound and whether it clears pi.

    The bound is step-independent: the frequency bound scales as 1/dt and
    the minimum interaction time is dt, so their product is fixed.
    """
    if L < 1 or N < 1:
        raise ValueError("L and N must be positive")
    phase_bound = math.sqrt((L + 1) / (2.0 * N * sum_of_squares(k)))
    return phase_bound, phase_bound >= SECURITY_THRESHOLD


def max_secure_N(L: int, k: int) -> int:
    """Largest repetition count that keeps the phase bound at or above pi."""
    if L < 1:
        raise ValueError("L must be positive")
    s = sum_of_squares(k)
    n = int((L + 1) / (2.0 * math.pi**2 * s))
    # guard the float estimate against boundary rounding
    while n >= 1 and not security_margin(L, k, n)[1]:
        n -= 1
    while security_margin(L, k, n + 1)[1]:
        n += 1
    return max(n, 0)


def qfi_report(L: int, k: int, dt: float, N: int) -> QfiReport:
    """Assemble the full per-site bound report for one operating point."""
    diag, offdiag = qfi_matrix(L, k, dt)
    inv_diag, inv_offdiag = qfi_inverse(L, k, dt)
    phase_bound, secure = security_margin(L, k, N)
    return QfiReport(
        L=L,
        k=k,
        dt=dt,
        N=N,
        qfi_diag=diag,
        qfi_offdiag=offdiag,
        inv_diag=inv_diag,
        inv_offdiag=inv_offdiag,
        freq_bound=phase_bound / dt,
        phase_bound=phase_bound,
        secure=secure,
    )


def dense_qfi(L: int, k: int, dt: float) -> np.ndarray:
    """Materialize the full L x L information matrix (validation only)."""
    diag, offdiag = qfi_matrix(L, k, dt)
    mat = np.full((L, L), offdiag)
    np.fill_diagonal(mat, diag)
    return mat


def dense_qfi_inverse(L: int, k: int, dt: float) -> np.ndarray:
    """Materialize the full L x L inverse (validation only)."""
    inv_diag, inv_offdiag = qfi_inverse(L, k, dt)
    mat = np.full((L, L), inv_offdiag)
    np.fill_diagonal(mat, inv_diag)
    return mat
