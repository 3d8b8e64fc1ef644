"""Dense statevector simulation of small n-qubit systems.

Qubit ``i`` addresses bit ``i`` of the amplitude index (little-endian), so
the basis state |q_{n-1} .. q_1 q_0> lives at index sum_i q_i * 2**i.
RZ uses the half-angle convention diag(e^{-i*theta/2}, e^{+i*theta/2});
the global phase this introduces cancels in every fidelity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

MAX_QUBITS = 12

_INV_SQRT2 = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class GateOp:
    """A single concrete gate: Hadamard, Z rotation or controlled-X."""

    kind: str  # "h" | "rz" | "cx"
    target: int
    control: int | None = None
    theta: float | None = None


class Statevector:
    """Pure n-qubit state held as a dense complex128 amplitude vector."""

    __slots__ = ("n_qubits", "amplitudes")

    def __init__(self, n_qubits: int, amplitudes) -> None:
        amplitudes = np.asarray(amplitudes, dtype=np.complex128)
        if n_qubits < 1 or amplitudes.shape != (2**n_qubits,):
            raise ValueError(
                f"need 2**{n_qubits} amplitudes, got shape {amplitudes.shape}"
            )
        self.n_qubits = n_qubits
        self.amplitudes = amplitudes

    def copy(self) -> Statevector:
        return Statevector(self.n_qubits, self.amplitudes.copy())

    def norm_sq(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def __repr__(self) -> str:
        return f"Statevector(n_qubits={self.n_qubits})"


def zero_state(n_qubits: int) -> Statevector:
    """All qubits in |0>. Bounds keep the dense array at most 4096 long."""
    if not isinstance(n_qubits, int) or not 1 <= n_qubits <= MAX_QUBITS:
        raise ValueError(f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}")
    amp = np.zeros(2**n_qubits, dtype=np.complex128)
    amp[0] = 1.0
    return Statevector(n_qubits, amp)


def _check_qubit(n_qubits: int, qubit: int) -> None:
    if not 0 <= qubit < n_qubits:
        raise ValueError(f"qubit index {qubit} out of range for {n_qubits} qubit(s)")


# In-place kernels shared with the batched encoder in feature_maps. ``amp``
# may carry leading batch axes; the amplitude index is always the last axis.


def _h_inplace(amp: np.ndarray, qubit: int) -> None:
    view = amp.reshape(amp.shape[:-1] + (-1, 2, 1 << qubit))
    lo = view[..., 0, :].copy()
    hi = view[..., 1, :]
    view[..., 0, :] = (lo + hi) * _INV_SQRT2
    view[..., 1, :] = (lo - hi) * _INV_SQRT2


def _rz_inplace(amp: np.ndarray, qubit: int, theta) -> None:
    # theta is a scalar, or an array matching the batch axes of ``amp``.
    phase = np.exp(0.5j * np.asarray(theta))
    if phase.ndim:
        phase = phase.reshape(phase.shape + (1, 1))
    view = amp.reshape(amp.shape[:-1] + (-1, 2, 1 << qubit))
    view[..., 0, :] *= np.conj(phase)
    view[..., 1, :] *= phase


def _cx_inplace(amp: np.ndarray, control: int, target: int) -> None:
    hi, lo = (control, target) if control > target else (target, control)
    mid = 1 << (hi - lo - 1)
    view = amp.reshape(amp.shape[:-1] + (-1, 2, mid, 2, 1 << lo))
    if control > target:
        tmp = view[..., 1, :, 0, :].copy()
        view[..., 1, :, 0, :] = view[..., 1, :, 1, :]
        view[..., 1, :, 1, :] = tmp
    else:
        tmp = view[..., 0, :, 1, :].copy()
        view[..., 0, :, 1, :] = view[..., 1, :, 1, :]
        view[..., 1, :, 1, :] = tmp


def apply_hadamard(state: Statevector, qubit: int) -> Statevector:
    """H = (1/sqrt2) [[1, 1], [1, -1]] on the addressed qubit."""
    _check_qubit(state.n_qubits, qubit)
    out = state.amplitudes.copy()
    _h_inplace(out, qubit)
    return Statevector(state.n_qubits, out)


def apply_rz(state: Statevector, qubit: int, theta: float) -> Statevector:
    """Phase e^{-i*theta/2} on the qubit's 0-branch, e^{+i*theta/2} on 1."""
    _check_qubit(state.n_qubits, qubit)
    if not math.isfinite(theta):
        raise ValueError(f"rz angle must be finite, got {theta}")
    out = state.amplitudes.copy()
    _rz_inplace(out, qubit, float(theta))
    return Statevector(state.n_qubits, out)


def apply_cx(state: Statevector, control: int, target: int) -> Statevector:
    """Flip the target bit on basis states whose control bit is 1."""
    _check_qubit(state.n_qubits, control)
    _check_qubit(state.n_qubits, target)
    if control == target:
        raise ValueError(f"cx control and target collide on qubit {control}")
    out = state.amplitudes.copy()
    _cx_inplace(out, control, target)
    return Statevector(state.n_qubits, out)


def apply_gate(state: Statevector, op: GateOp) -> Statevector:
    if op.kind == "h":
        return apply_hadamard(state, op.target)
    if op.kind == "rz":
        return apply_rz(state, op.target, op.theta)
    if op.kind == "cx":
        return apply_cx(state, op.control, op.target)
    raise ValueError(f"unknown gate kind {op.kind!r}")


def inner_product(a: Statevector, b: Statevector) -> complex:
    """<a|b> = sum_k conj(a_k) * b_k."""
    if a.n_qubits != b.n_qubits:
        raise ValueError(
            f"dimension mismatch: {a.n_qubits} vs {b.n_qubits} qubits"
        )
    return complex(np.vdot(a.amplitudes, b.amplitudes))
