"""Fidelity quantum kernels and the classical RBF kernel.

Fidelities come straight from exact statevectors, K(x, y) = |<phi(x)|phi(y)>|^2,
so Gram assembly is deterministic and shot-noise free. Each input row is
encoded once and reused across all pairs.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .feature_maps import FeatureMapSpec, encode_batch

CLAMP_ALARM = 1e-10  # a clamp larger than this signals a simulation bug

ROLES = ("train", "test")


@dataclass(frozen=True)
class KernelMatrix:
    """Dense Gram matrix with its role: square train or rectangular test."""

    values: np.ndarray
    role: str

    def __post_init__(self) -> None:
        if self.role not in ROLES:
            raise ValueError(f"role must be one of {ROLES}, got {self.role!r}")
        if self.values.ndim != 2:
            raise ValueError(f"kernel values must be 2-d, got shape {self.values.shape}")
        if self.role == "train" and self.values.shape[0] != self.values.shape[1]:
            raise ValueError(f"train kernel must be square, got {self.values.shape}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("kernel values must be finite")

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]


def _clamp_unit(values: np.ndarray) -> np.ndarray:
    out = np.clip(values, 0.0, 1.0)
    moved = float(np.max(np.abs(values - out))) if values.size else 0.0
    if moved > CLAMP_ALARM:
        warnings.warn(
            f"fidelity clamped by {moved:.3e} (> {CLAMP_ALARM:.0e}); "
            "the simulation is drifting",
            RuntimeWarning,
            stacklevel=3,
        )
    return out


def _as_matrix(vectors, n_features: int, name: str) -> np.ndarray:
    arr = np.asarray(vectors)
    if arr.dtype == object:
        raise ValueError(f"{name} rows are ragged")
    arr = np.atleast_2d(np.asarray(arr, dtype=np.float64))
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a matrix of row vectors, got shape {arr.shape}")
    if n_features is not None and arr.shape[1] != n_features:
        raise ValueError(
            f"{name} has {arr.shape[1]} columns, feature map expects {n_features}"
        )
    return arr


def fidelity(spec: FeatureMapSpec, x, y) -> float:
    """|<phi(x)|phi(y)>|^2, clamped into [0, 1]."""
    states = encode_batch(spec, np.stack([
        np.asarray(x, dtype=np.float64),
        np.asarray(y, dtype=np.float64),
    ]))
    overlap = np.vdot(states[0], states[1])
    return float(_clamp_unit(np.array([abs(overlap) ** 2]))[0])


def gram_matrix(spec: FeatureMapSpec, X, Y=None) -> KernelMatrix:
    """Pairwise fidelities: square train matrix, or test rows against train cols.

    With ``Y`` absent the result is K[i][j] = fidelity(X_i, X_j), mirrored
    across the diagonal so symmetry is exact. With ``Y`` present the result
    is the rectangular test matrix K[i][j] = fidelity(Y_i, X_j).
    """
    X = _as_matrix(X, spec.n_features, "X")
    states_x = encode_batch(spec, X)
    if Y is None:
        overlaps = states_x.conj() @ states_x.T
        fid = np.abs(overlaps) ** 2
        fid = np.triu(fid) + np.triu(fid, 1).T
        return KernelMatrix(_clamp_unit(fid), role="train")
    Y = _as_matrix(Y, spec.n_features, "Y")
    states_y = encode_batch(spec, Y)
    fid = np.abs(states_y.conj() @ states_x.T) ** 2
    return KernelMatrix(_clamp_unit(fid), role="test")


def rbf_kernel(X, Y=None, *, gamma: float) -> KernelMatrix:
    """K[i][j] = exp(-gamma * ||Y_i - X_j||^2) over row vectors."""
    if not np.isfinite(gamma) or gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    X = _as_matrix(X, None, "X")
    role = "train" if Y is None else "test"
    Yv = X if Y is None else _as_matrix(Y, X.shape[1], "Y")
    sq = (
        np.sum(Yv**2, axis=1)[:, None]
        + np.sum(X**2, axis=1)[None, :]
        - 2.0 * (Yv @ X.T)
    )
    np.maximum(sq, 0.0, out=sq)
    if role == "train":
        np.fill_diagonal(sq, 0.0)
        sq = np.triu(sq) + np.triu(sq, 1).T
    return KernelMatrix(np.exp(-gamma * sq), role=role)


def scale_gamma(X) -> float:
    """The "scale" default: 1 / (n_features * var(X flattened))."""
    X = _as_matrix(X, None, "X")
    var = float(X.var())
    if var <= 0.0:
        return 1.0
    return 1.0 / (X.shape[1] * var)


def train_kernel_diagnostics(K: KernelMatrix) -> dict[str, float]:
    """Symmetry error, diagonal error and minimum eigenvalue of a train kernel."""
    if K.role != "train":
        raise ValueError("diagnostics apply to train kernels only")
    v = K.values
    return {
        "symmetry_error": float(np.max(np.abs(v - v.T))),
        "diagonal_error": float(np.max(np.abs(np.diag(v) - 1.0))),
        "min_eigenvalue": float(np.linalg.eigvalsh((v + v.T) / 2.0)[0]),
    }


def write_kernel_csv(K: KernelMatrix, path) -> None:
    """Row-major dump, 17 significant digits per value."""
    with open(path, "w", encoding="utf-8") as fh:
        for row in K.values:
            fh.write(",".join(format(v, ".17g") for v in row))
            fh.write("\n")
