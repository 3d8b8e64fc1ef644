"""Random forest baseline: bagged CART trees with Gini splits.

Each tree trains on an n-draw bootstrap sample and examines ceil(sqrt(k))
candidate features per node, extending the search only while no feature in
the subset admits a valid split. Per-tree RNG streams derive from the master
seed by tree index, so parallel tree construction cannot change results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

POSITIVE = 1   # Nonhealthy: ties break toward the disease class
NEGATIVE = -1


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 100
    max_features: str = "sqrt"
    min_samples_split: int = 2
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_trees < 1:
            raise ValueError(f"n_trees must be >= 1, got {self.n_trees}")
        if self.min_samples_split < 2:
            raise ValueError(
                f"min_samples_split must be >= 2, got {self.min_samples_split}"
            )
        if self.max_features != "sqrt":
            raise ValueError("only the sqrt feature rule is supported")
        if self.seed < 0:
            raise ValueError(f"seed must be nonnegative, got {self.seed}")


@dataclass
class TreeNode:
    n_negative: int
    n_positive: int
    feature: int = -1
    threshold: float = 0.0
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    def vote(self) -> int:
        return POSITIVE if self.n_positive >= self.n_negative else NEGATIVE


@dataclass
class ForestModel:
    trees: list[TreeNode]
    bootstrap_indices: list[np.ndarray]
    n_features: int
    config: ForestConfig = field(repr=False, default_factory=ForestConfig)


def _best_split(X: np.ndarray, y_pos: np.ndarray, idx: np.ndarray,
                rng: np.random.Generator):
    """Minimum weighted-Gini split over a random feature subset.

    Returns (feature, threshold) routing ``value <= threshold`` left, or
    None when no feature admits a split. Thresholds are the largest value
    routed left, so prefix counts and routing agree exactly.
    """
    n = idx.shape[0]
    k = X.shape[1]
    n_try = math.ceil(math.sqrt(k))
    best_cost = np.inf
    best: tuple[int, float] | None = None
    examined = 0
    for f in rng.permutation(k):
        v = X[idx, f]
        order = np.argsort(v, kind="stable")
        vs = v[order]
        if vs[0] == vs[-1]:
            continue  # constant feature: does not count toward the subset
        examined += 1
        ys = y_pos[idx[order]]
        cum_pos = np.cumsum(ys)
        total_pos = cum_pos[-1]
        cut = np.nonzero(vs[:-1] < vs[1:])[0]
        nl = cut + 1.0
        nr = n - nl
        pl = cum_pos[cut] / nl
        pr = (total_pos - cum_pos[cut]) / nr
        gini_l = 1.0 - pl**2 - (1.0 - pl) ** 2
        gini_r = 1.0 - pr**2 - (1.0 - pr) ** 2
        cost = (nl * gini_l + nr * gini_r) / n
        pos = int(np.argmin(cost))
        if cost[pos] < best_cost:
            best_cost = float(cost[pos])
            best = (int(f), float(vs[cut[pos]]))
        if examined >= n_try and best is not None:
            break
    return best


def _grow(X: np.ndarray, y_pos: np.ndarray, idx: np.ndarray,
           rng: np.random.Generator, min_split: int) -> TreeNode:
    n_pos = int(y_pos[idx].sum())
    node = TreeNode(n_negative=idx.shape[0] - n_pos, n_positive=n_pos)
    if n_pos == 0 or n_pos == idx.shape[0] or idx.shape[0] < min_split:
        return node
    split = _best_split(X, y_pos, idx, rng)
    if split is None:
        return node  # duplicated rows with mixed labels: impure leaf
    node.feature, node.threshold = split
    mask = X[idx, node.feature] <= node.threshold
    node.left = _grow(X, y_pos, idx[mask], rng, min_split)
    node.right = _grow(X, y_pos, idx[~mask], rng, min_split)
    return node


def forest_train(X, y, config: ForestConfig = ForestConfig()) -> ForestModel:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError(f"X must be a nonempty 2-d matrix, got shape {X.shape}")
    n = X.shape[0]
    if y.shape != (n,):
        raise ValueError(f"labels must have shape ({n},), got {y.shape}")
    if n < 2:
        raise ValueError(f"forest_train needs at least 2 samples, got {n}")
    if np.all(y == y[0]):
        raise ValueError("training data contains a single class")
    y_pos = (y == POSITIVE).astype(np.int64)

    trees: list[TreeNode] = []
    bootstraps: list[np.ndarray] = []
    for t in range(config.n_trees):
        rng = np.random.default_rng([config.seed, t])
        sample = rng.integers(0, n, size=n)
        trees.append(_grow(X, y_pos, sample, rng, config.min_samples_split))
        bootstraps.append(sample)
    return ForestModel(
        trees=trees, bootstrap_indices=bootstraps, n_features=X.shape[1],
        config=config,
    )


def _tree_vote(node: TreeNode, row: np.ndarray) -> int:
    while not node.is_leaf:
        node = node.left if row[node.feature] <= node.threshold else node.right
    return node.vote()


def forest_predict(model: ForestModel, X) -> np.ndarray:
    """Majority vote over tree votes; exact ties go to the positive class."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != model.n_features:
        raise ValueError(
            f"expected {model.n_features} features, got {X.shape[1]}"
        )
    out = np.empty(X.shape[0], dtype=np.int64)
    for r in range(X.shape[0]):
        votes = sum(_tree_vote(tree, X[r]) for tree in model.trees)
        out[r] = POSITIVE if votes >= 0 else NEGATIVE
    return out
