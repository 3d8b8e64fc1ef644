"""PCA dimensionality reduction and MinMax scaling to [-1, 1].

Both models are fit on training folds only; transforms never touch the
fitted state, so holding out rows cannot leak into the models.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PCAModel:
    mean: np.ndarray               # (d,)
    components: np.ndarray         # (k, d), orthonormal rows
    explained_variance: np.ndarray  # (k,), nonincreasing


@dataclass(frozen=True)
class ScalerModel:
    data_min: np.ndarray
    data_max: np.ndarray
    lo: float = -1.0
    hi: float = 1.0


def pca_fit(X, k: int) -> PCAModel:
    """Top-k right singular directions of the mean-centered data.

    SVD of the centered matrix keeps this stable at d=2048; component signs
    are fixed so each row's largest-magnitude entry is positive.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"X must be 2-d, got shape {X.shape}")
    n, d = X.shape
    if n < 2:
        raise ValueError(f"pca_fit needs at least 2 samples, got {n}")
    if not 1 <= k <= min(n - 1, d):
        raise ValueError(f"k must be in [1, {min(n - 1, d)}], got {k}")
    mean = X.mean(axis=0)
    _, s, vt = np.linalg.svd(X - mean, full_matrices=False)
    components = vt[:k].copy()
    flip = components[np.arange(k), np.argmax(np.abs(components), axis=1)] < 0
    components[flip] *= -1.0
    explained = (s[:k] ** 2) / (n - 1)
    return PCAModel(mean=mean, components=components, explained_variance=explained)


def pca_transform(model: PCAModel, X) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != model.mean.shape[0]:
        raise ValueError(
            f"expected {model.mean.shape[0]} features, got {X.shape[1]}"
        )
    return (X - model.mean) @ model.components.T


def minmax_fit(X) -> ScalerModel:
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[0] < 1:
        raise ValueError("minmax_fit needs at least one row")
    return ScalerModel(data_min=X.min(axis=0), data_max=X.max(axis=0))


def minmax_transform(model: ScalerModel, X) -> np.ndarray:
    """x -> lo + (hi-lo)*(x - min)/(max - min); constant features map to 0.

    Values outside the fitted range pass through unclipped, so held-out rows
    may land outside [lo, hi].
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != model.data_min.shape[0]:
        raise ValueError(
            f"expected {model.data_min.shape[0]} features, got {X.shape[1]}"
        )
    span = model.data_max - model.data_min
    safe = np.where(span == 0.0, 1.0, span)
    scaled = model.lo + (model.hi - model.lo) * (X - model.data_min) / safe
    mid = 0.5 * (model.lo + model.hi)
    return np.where(span == 0.0, mid, scaled)
