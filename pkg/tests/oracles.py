"""Independent reference implementations used only by the test-suite.

Everything here recomputes results through a different route than the
library: explicit 2^n x 2^n unitaries instead of in-place gate kernels, and
projected-gradient ascent instead of SMO. Tolerances in the tests compare
the two routes.
"""

from __future__ import annotations

import math

import numpy as np

_H2 = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=np.complex128) / math.sqrt(2.0)


def rz_matrix(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


def single_qubit_unitary(u2: np.ndarray, qubit: int, n: int) -> np.ndarray:
    # little-endian: qubit 0 is the lowest index bit, i.e. the last kron factor
    return np.kron(np.eye(2 ** (n - 1 - qubit)), np.kron(u2, np.eye(2**qubit)))


def cx_unitary(control: int, target: int, n: int) -> np.ndarray:
    dim = 2**n
    mat = np.zeros((dim, dim), dtype=np.complex128)
    for col in range(dim):
        row = col ^ (1 << target) if (col >> control) & 1 else col
        mat[row, col] = 1.0
    return mat


def gate_unitary(op, n: int) -> np.ndarray:
    if op.kind == "h":
        return single_qubit_unitary(_H2, op.target, n)
    if op.kind == "rz":
        return single_qubit_unitary(rz_matrix(op.theta), op.target, n)
    if op.kind == "cx":
        return cx_unitary(op.control, op.target, n)
    raise ValueError(op.kind)


def circuit_unitary(ops, n: int) -> np.ndarray:
    u = np.eye(2**n, dtype=np.complex128)
    for op in ops:
        u = gate_unitary(op, n) @ u
    return u


def dense_encode(circuit, x) -> np.ndarray:
    """Apply the bound circuit to |0...0> via full matrix products."""
    n = circuit.n_qubits
    psi = np.zeros(2**n, dtype=np.complex128)
    psi[0] = 1.0
    return circuit_unitary(circuit.bind(x), n) @ psi


def dense_fidelity(circuit, x, y) -> float:
    return float(abs(np.vdot(dense_encode(circuit, x), dense_encode(circuit, y))) ** 2)


def project_box_hyperplane(v: np.ndarray, y: np.ndarray, C: float) -> np.ndarray:
    """Euclidean projection onto {0 <= a <= C, y.a = 0} by bisection.

    sum(y * clip(v - lam*y, 0, C)) is nonincreasing in lam, so 80 halvings
    of the bracket pin lam to machine precision.
    """
    span = float(np.max(np.abs(v))) + C + 1.0
    lo, hi = -span, span
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if np.sum(y * np.clip(v - mid * y, 0.0, C)) > 0.0:
            lo = mid
        else:
            hi = mid
    return np.clip(v - 0.5 * (lo + hi) * y, 0.0, C)


def pg_svm_solve(K: np.ndarray, y: np.ndarray, C: float, iters: int = 5_000):
    """Projected-gradient ascent on the SVM dual; returns (alpha, bias, W)."""
    y = np.asarray(y, dtype=np.float64)
    Q = np.outer(y, y) * K
    lipschitz = float(np.linalg.eigvalsh((Q + Q.T) / 2.0)[-1])
    step = 1.0 / max(lipschitz, 1e-9)
    alpha = np.zeros(y.shape[0])
    for _ in range(iters):
        new = project_box_hyperplane(alpha + step * (1.0 - Q @ alpha), y, C)
        if np.max(np.abs(new - alpha)) < 1e-14:
            alpha = new
            break
        alpha = new
    objective = float(alpha.sum() - 0.5 * alpha @ Q @ alpha)
    decision_raw = K @ (alpha * y)
    margins = y - decision_raw
    at_zero = alpha <= 1e-6 * C
    at_cap = alpha >= C * (1 - 1e-6)
    free = ~at_zero & ~at_cap
    if np.any(free):
        bias = float(np.mean(margins[free]))
    else:
        # KKT bounds: alpha=0 demands y*f >= 1, alpha=C demands y*f <= 1.
        lower = margins[(at_zero & (y > 0)) | (at_cap & (y < 0))]
        upper = margins[(at_cap & (y > 0)) | (at_zero & (y < 0))]
        lo = float(lower.max()) if lower.size else -np.inf
        hi = float(upper.min()) if upper.size else np.inf
        if not np.isfinite(lo):
            bias = hi
        elif not np.isfinite(hi):
            bias = lo
        else:
            bias = 0.5 * (lo + hi)
    return alpha, bias, objective


def pg_svm_predict(K_test: np.ndarray, K_train: np.ndarray, y: np.ndarray,
                   alpha: np.ndarray, bias: float) -> np.ndarray:
    f = K_test @ (alpha * y) + bias
    return np.where(f >= 0.0, 1, -1)


def random_unit_kernel(rng: np.random.Generator, n: int) -> np.ndarray:
    """Random PSD matrix normalized to a unit diagonal."""
    a = rng.normal(size=(n, n + 2))
    K = a @ a.T
    d = np.sqrt(np.diag(K))
    K = K / np.outer(d, d)
    return (K + K.T) / 2.0
