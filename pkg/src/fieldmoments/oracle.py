"""Brute-force gate-level simulation of a single protocol copy.

Certifies the analytic reduced-state model at small L by running the full
register / data / sensor pipeline on a dense state vector.

Qubit layout within a basis index (integer bit positions):
  bits 0 .. L-1        sensor qubits (bit l = sensor l)
  bit  L               data qubit
  bits L+1 .. L+log2L  register qubits (register value = site address)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fields import FieldConfig

__all__ = [
    "PureState",
    "prepare_initial",
    "apply_cswap",
    "apply_field_evolution",
    "reduced_final_state",
    "analytic_reduced_state",
    "run_pipeline",
    "povm_probabilities",
    "fidelity",
]

_MAX_L = 16


def _check_L(L: int) -> int:
    if L < 1 or (L & (L - 1)) != 0:
        raise ValueError("L must be a power of two")
    if L > _MAX_L:
        raise ValueError(f"L > {_MAX_L} exceeds the dense-state budget")
    return int(math.log2(L))


@dataclass(frozen=True)
class PureState:
    """Dense state vector over register (x) data (x) sensor factors."""

    amplitudes: np.ndarray
    L: int

    def __post_init__(self) -> None:
        n_reg = _check_L(self.L)
        dim = 1 << (n_reg + 1 + self.L)
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (dim,):
            raise ValueError(f"expected {dim} amplitudes, got {amps.shape}")
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"state not normalized: |amps|^2 = {norm}")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_register(self) -> int:
        return _check_L(self.L)


def prepare_initial(L: int) -> PureState:
    """Uniform register superposition, data in plus, all sensors down.

    L = 1 degenerates to zero register qubits and a plain data/sensor pair.
    """
    n_reg = _check_L(L)
    dim = 1 << (n_reg + 1 + L)
    amps = np.zeros(dim, dtype=complex)
    amp = 1.0 / math.sqrt(2 * L)
    for l in range(L):
        for d in (0, 1):
            amps[(l << (L + 1)) | (d << L)] = amp
    return PureState(amplitudes=amps, L=L)


def _cswap_permutation(L: int) -> np.ndarray:
    n_reg = _check_L(L)
    dim = 1 << (n_reg + 1 + L)
    idx = np.arange(dim, dtype=np.int64)
    reg = idx >> (L + 1)
    data_bit = (idx >> L) & 1
    sensor_bit = (idx >> reg) & 1
    flip = data_bit ^ sensor_bit
    # when data and addressed sensor differ, toggle both bits to swap them
    return idx ^ ((flip << L) | (flip << reg))


def apply_cswap(state: PureState) -> PureState:
    """Swap the data qubit with the register-addressed sensor qubit."""
    perm = _cswap_permutation(state.L)
    # the permutation is an involution, so indexing by it applies it
    return PureState(amplitudes=state.amplitudes[perm], L=state.L)


def apply_field_evolution(state: PureState, cfg: FieldConfig, t: float) -> PureState:
    """Free evolution of every sensor qubit under its local field.

    Sensor l in |1> picks up exp(+i w_l t / 2), in |0> exp(-i w_l t / 2).
    """
    L = state.L
    if cfg.L != L:
        raise ValueError("field config length must match sensor count")
    dim = state.amplitudes.size
    idx = np.arange(dim, dtype=np.int64)
    half_phase = np.zeros(dim)
    for l in range(L):
        bit = (idx >> l) & 1
        half_phase += np.where(bit, cfg.omegas[l], -cfg.omegas[l])
    amps = state.amplitudes * np.exp(0.5j * t * half_phase)
    return PureState(amplitudes=amps, L=L)


def reduced_final_state(state: PureState, tol: float = 1e-12) -> np.ndarray:
    """Slice off the disentangled sensor factor, returning register (x) data.

    After the second controlled swap every sensor qubit must be back in
    |0>; any leftover weight on other sensor configurations falsifies the
    analytic model and raises.
    """
    L = state.L
    dim = state.amplitudes.size
    idx = np.arange(dim, dtype=np.int64)
    sensors = idx & ((1 << L) - 1)
    leak = float(np.sum(np.abs(state.amplitudes[sensors != 0]) ** 2))
    if leak > tol:
        raise ValueError(f"sensor factor entangled: residual weight {leak:.3e}")
    reduced = np.empty(2 * L, dtype=complex)
    for l in range(L):
        for d in (0, 1):
            reduced[2 * l + d] = state.amplitudes[(l << (L + 1)) | (d << L)]
    return reduced


def analytic_reduced_state(cfg: FieldConfig, t: float) -> np.ndarray:
    """Closed-form register (x) data state after the full pipeline."""
    L = cfg.L
    _check_L(L)
    reduced = np.empty(2 * L, dtype=complex)
    amp = 1.0 / math.sqrt(2 * L)
    for l in range(L):
        reduced[2 * l] = amp
        reduced[2 * l + 1] = amp * np.exp(1j * cfg.omegas[l] * t)
    return reduced


def run_pipeline(cfg: FieldConfig, t: float) -> np.ndarray:
    """Full gate-level pipeline; returns the reduced register (x) data state."""
    state = prepare_initial(cfg.L)
    state = apply_cswap(state)
    state = apply_field_evolution(state, cfg, t)
    state = apply_cswap(state)
    return reduced_final_state(state)


def fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """Squared overlap of two normalized vectors (global-phase blind)."""
    return float(abs(np.vdot(a, b)) ** 2)


def povm_probabilities(state_rd: np.ndarray, psi: np.ndarray) -> tuple[float, float]:
    """Probability of the rank-one POVM branch selecting data state psi.

    The branch projects the register onto the all-plus state and the data
    qubit onto psi; the complement carries the remaining weight.
    """
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (2,):
        raise ValueError("psi must be a single-qubit state")
    norm = float(np.sum(np.abs(psi) ** 2))
    if abs(norm - 1.0) > 1e-10:
        raise ValueError("psi must be normalized")
    L = state_rd.size // 2
    rd = np.asarray(state_rd, dtype=complex).reshape(L, 2)
    amp = np.sum(rd @ psi.conj()) / math.sqrt(L)
    p1 = float(abs(amp) ** 2)
    return p1, 1.0 - p1
