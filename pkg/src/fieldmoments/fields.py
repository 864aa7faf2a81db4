"""Magnetic-field configurations of the sensing sites and their exact moments."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

__all__ = ["FieldConfig", "UniformFieldDistribution", "draw_fields", "exact_moment"]


@dataclass(frozen=True)
class FieldConfig:
    """The resonant frequencies ``omega_l`` (rad per unit time) of the L sites.

    The array is copied and write-protected at construction, so a config can
    be shared freely across concurrent readers.
    """

    omegas: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.omegas, dtype=float, copy=True).ravel()
        if arr.size == 0:
            raise ValueError("need at least one site frequency")
        if not np.all(np.isfinite(arr)):
            raise ValueError("site frequencies must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "omegas", arr)

    @property
    def L(self) -> int:
        """Number of sites."""
        return int(self.omegas.size)

    # ------------------------------------------------------------------
    # serialization: plain text (one frequency per line) and JSON array.
    # repr() gives the shortest decimal that round-trips a double exactly.
    # ------------------------------------------------------------------
    def to_text(self) -> str:
        return "\n".join(repr(float(w)) for w in self.omegas) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "FieldConfig":
        values = [float(line) for line in text.splitlines() if line.strip()]
        return cls(np.asarray(values))

    def to_json(self) -> str:
        return json.dumps([float(w) for w in self.omegas])

    @classmethod
    def from_json(cls, payload: str) -> "FieldConfig":
        return cls(np.asarray(json.loads(payload), dtype=float))


@dataclass(frozen=True)
class UniformFieldDistribution:
    """Uniform draw of site frequencies on ``[omega_min, omega_max]``.

    ``seed`` feeds a named, cross-run-stable generator (numpy PCG64), so a
    given (distribution, L) pair always reproduces the same configuration.
    """

    omega_min: float
    omega_max: float
    seed: int

    def __post_init__(self) -> None:
        if not self.omega_min < self.omega_max:
            raise ValueError("omega_min must be strictly below omega_max")


def draw_fields(dist: UniformFieldDistribution, L: int) -> FieldConfig:
    """Draw L i.i.d. uniform frequencies from ``dist``, reproducibly."""
    if L < 1:
        raise ValueError("L must be at least 1")
    rng = np.random.Generator(np.random.PCG64(dist.seed))
    return FieldConfig(rng.uniform(dist.omega_min, dist.omega_max, size=L))


def exact_moment(cfg: FieldConfig, k: int) -> float:
    """Ground-truth k-th moment, the site average of ``omega_l**k``."""
    if k < 0:
        raise ValueError("moment order must be non-negative")
    if k == 0:
        return 1.0
    return float(np.mean(cfg.omegas**k))
