"""Stratified k-fold cross-validation over the full experiment grid.

One grid cell per (PCA width x model variant); per fold the PCA and MinMax
models are fit on the training split only, both splits are transformed, and
every configured model is trained and scored on the held-out fold. Cell
ordering mirrors the two report tables: quantum-kernel variants by feature
map first, then the classical baselines.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone

import numpy as np

from .feature_maps import FAMILIES, FeatureMapSpec
from .forest import ForestConfig, forest_predict, forest_train
from .kernel import KernelMatrix, gram_matrix, rbf_kernel, scale_gamma
from .preprocess import minmax_fit, minmax_transform, pca_fit, pca_transform
from .svm import svm_predict, svm_train

HEALTHY = -1
NONHEALTHY = 1
LABEL_NAMES = {HEALTHY: "Healthy", NONHEALTHY: "Nonhealthy"}

CLASSICAL_MODELS = ("svm", "rf")

# Independent sub-seed streams derived from the single experiment seed.
_FOLD_STREAM = 0
_FOREST_STREAM = 1

FoldSplit = list[np.ndarray]


@dataclass
class Dataset:
    """Labeled deep-feature vectors; labels are -1 Healthy / +1 Nonhealthy."""

    ids: list[str]
    features: np.ndarray
    labels: np.ndarray

    def validate(self) -> None:
        if self.features.ndim != 2:
            raise ValueError(f"features must be 2-d, got shape {self.features.shape}")
        n = self.features.shape[0]
        if len(self.ids) != n or self.labels.shape != (n,):
            raise ValueError(
                f"inconsistent lengths: {len(self.ids)} ids, "
                f"{self.features.shape[0]} feature rows, {self.labels.shape[0]} labels"
            )
        if not np.all(np.isfinite(self.features)):
            raise ValueError("features must be finite")
        if not np.all(np.isin(self.labels, (HEALTHY, NONHEALTHY))):
            raise ValueError("labels must be -1 (Healthy) or +1 (Nonhealthy)")
        for cls, name in LABEL_NAMES.items():
            if int(np.sum(self.labels == cls)) < 2:
                raise ValueError(f"class {name} has fewer than 2 samples")


@dataclass(frozen=True)
class ExperimentConfig:
    pca_components: tuple[int, ...] = (3, 6, 9)
    models: tuple[str, ...] = CLASSICAL_MODELS
    maps: tuple[str, ...] = ("zz", "z", "paulix")
    reps: int = 1
    C: float = 1.0
    gamma: float | str = "scale"
    n_trees: int = 100
    k_folds: int = 5
    seed: int = 0
    # Provenance echoed into the report so a run is reproducible from it.
    input: str | None = None
    output: str | None = None
    dump_kernels: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "pca_components", tuple(self.pca_components))
        object.__setattr__(self, "models", tuple(self.models))
        object.__setattr__(self, "maps", tuple(self.maps))
        for m in self.models:
            if m not in CLASSICAL_MODELS:
                raise ValueError(f"unknown model {m!r}; expected {CLASSICAL_MODELS}")
        for m in self.maps:
            if m not in FAMILIES:
                raise ValueError(f"unknown feature map {m!r}; expected {FAMILIES}")
        if any(k < 1 for k in self.pca_components):
            raise ValueError("pca_components must be positive")
        if not self.models and not self.maps:
            raise ValueError("configure at least one model or feature map")
        if self.k_folds < 2:
            raise ValueError(f"k_folds must be >= 2, got {self.k_folds}")
        if self.C <= 0:
            raise ValueError(f"C must be positive, got {self.C}")
        if isinstance(self.gamma, str):
            if self.gamma != "scale":
                raise ValueError("gamma must be 'scale' or a positive number")
        elif self.gamma <= 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if self.seed < 0:
            raise ValueError(f"seed must be nonnegative, got {self.seed}")

    def to_dict(self) -> dict:
        return asdict(self)

    def digest(self) -> str:
        payload = json.dumps(self.to_dict(), sort_keys=True, default=list)
        return hashlib.sha256(payload.encode()).hexdigest()


@dataclass
class CellResult:
    pca_components: int
    model: str                 # "qsvm" | "svm" | "rf"
    feature_map: str | None    # encoding family for qsvm, None otherwise
    fold_accuracies: list[float]
    mean_accuracy: float


@dataclass
class ExperimentReport:
    cells: list[CellResult]
    config: dict
    seed: int
    config_hash: str
    fold_sizes: list[int]
    fold_test_majority_fraction: list[float]
    started_at: str
    finished_at: str

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "seed": self.seed,
            "config_hash": self.config_hash,
            "fold_sizes": self.fold_sizes,
            "fold_test_majority_fraction": self.fold_test_majority_fraction,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "cells": [asdict(c) for c in self.cells],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, default=list)

    def cell(self, pca: int, model: str, feature_map: str | None = None) -> CellResult:
        for c in self.cells:
            if (c.pca_components, c.model, c.feature_map) == (pca, model, feature_map):
                return c
        raise KeyError(f"no cell ({pca}, {model}, {feature_map})")

    def to_table_text(self) -> str:
        pcas = sorted({c.pca_components for c in self.cells})
        lines: list[str] = []
        maps = [c.feature_map for c in self.cells
                if c.model == "qsvm" and c.pca_components == pcas[0]]
        if maps:
            lines.append("QSVM accuracy by feature map (mean over folds)")
            lines.append(_table_row(["pca"] + list(maps)))
            for p in pcas:
                row = [str(p)] + [
                    f"{self.cell(p, 'qsvm', m).mean_accuracy:.4f}" for m in maps
                ]
                lines.append(_table_row(row))
            lines.append("")
        classical = [c.model for c in self.cells
                     if c.model != "qsvm" and c.pca_components == pcas[0]]
        columns = list(classical) + (["qsvm-z"] if "z" in maps else [])
        if columns:
            lines.append("Model comparison (mean over folds)")
            lines.append(_table_row(["pca"] + columns))
            for p in pcas:
                row = [str(p)]
                row += [f"{self.cell(p, m).mean_accuracy:.4f}" for m in classical]
                if "z" in maps:
                    row.append(f"{self.cell(p, 'qsvm', 'z').mean_accuracy:.4f}")
                lines.append(_table_row(row))
        return "\n".join(lines) + "\n"


def _table_row(cells: list[str], width: int = 10) -> str:
    return " | ".join(c.ljust(width) for c in cells)


def _derive_seed(seed: int, *stream: int) -> int:
    return int(np.random.SeedSequence([seed, *stream]).generate_state(1)[0])


def stratified_kfold(labels, k: int, seed: int) -> FoldSplit:
    """Shuffle within class, deal round-robin: class balance within 1 sample."""
    labels = np.asarray(labels)
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    rng = np.random.default_rng(seed)
    folds: list[list[int]] = [[] for _ in range(k)]
    for cls in np.unique(labels):
        idx = np.nonzero(labels == cls)[0]
        if idx.shape[0] < k:
            raise ValueError(
                f"class {cls!r} has {idx.shape[0]} members, fewer than k={k}"
            )
        for t, sample in enumerate(rng.permutation(idx)):
            folds[t % k].append(int(sample))
    return [np.sort(np.asarray(f, dtype=np.int64)) for f in folds]


def check_fold_split(folds: FoldSplit, n: int) -> None:
    """Disjointness and coverage; raises on any bookkeeping violation."""
    seen = np.concatenate(folds) if folds else np.empty(0, dtype=np.int64)
    if seen.shape[0] != n or np.unique(seen).shape[0] != n:
        raise ValueError("folds must partition the sample indices exactly")
    if np.any(seen < 0) or np.any(seen >= n):
        raise ValueError("fold indices out of range")


def accuracy(predicted, truth) -> float:
    predicted = np.asarray(predicted)
    truth = np.asarray(truth)
    if predicted.shape != truth.shape or predicted.ndim != 1:
        raise ValueError(
            f"length mismatch: {predicted.shape} predictions vs {truth.shape} truths"
        )
    if predicted.shape[0] == 0:
        raise ValueError("accuracy of an empty prediction set is undefined")
    return float(np.mean(predicted == truth))


def _variants(config: ExperimentConfig) -> list[tuple[str, str | None]]:
    return [("qsvm", m) for m in config.maps] + [(m, None) for m in config.models]


def _fit_predict(variant: tuple[str, str | None], Xtr, ytr, Xte, config,
                 pca_k: int, fold: int, kernel_sink=None):
    model_name, fmap = variant
    if model_name == "qsvm":
        spec = FeatureMapSpec(fmap, pca_k, config.reps)
        K_train = gram_matrix(spec, Xtr)
        K_test = gram_matrix(spec, Xtr, Xte)
    elif model_name == "svm":
        gamma = scale_gamma(Xtr) if config.gamma == "scale" else float(config.gamma)
        K_train = rbf_kernel(Xtr, gamma=gamma)
        K_test = rbf_kernel(Xtr, Xte, gamma=gamma)
    else:  # rf
        seed = _derive_seed(config.seed, _FOREST_STREAM, pca_k, fold)
        cfg = ForestConfig(n_trees=config.n_trees, seed=seed)
        model = forest_train(Xtr, ytr, cfg)
        return forest_predict(model, Xte)
    if kernel_sink is not None:
        tag = f"{model_name}{'-' + fmap if fmap else ''}_pca{pca_k}_fold{fold}"
        kernel_sink(f"{tag}_train", K_train)
        kernel_sink(f"{tag}_test", K_test)
    model = svm_train(K_train, ytr, config.C)
    return svm_predict(model, K_test)


def run_experiment(dataset: Dataset, config: ExperimentConfig,
                   folds: FoldSplit | None = None,
                   kernel_sink=None) -> ExperimentReport:
    """Score every grid cell with stratified k-fold cross-validation.

    ``folds`` overrides the derived split (reproduction runs); ``kernel_sink``
    receives every computed kernel matrix as (name, KernelMatrix).
    """
    dataset.validate()
    y = dataset.labels
    X = dataset.features
    n = X.shape[0]
    started = datetime.now(timezone.utc).isoformat()

    if folds is None:
        folds = stratified_kfold(y, config.k_folds, _derive_seed(config.seed, _FOLD_STREAM))
    check_fold_split(folds, n)

    variants = _variants(config)
    fold_accs: dict[tuple[int, str, str | None], list[float]] = {
        (p, m, fm): [] for p in config.pca_components for (m, fm) in variants
    }
    majority: list[float] = []
    sizes: list[int] = []

    for f, test_idx in enumerate(folds):
        train_idx = np.sort(
            np.concatenate([folds[g] for g in range(len(folds)) if g != f])
        )
        if np.intersect1d(train_idx, test_idx).size:
            raise AssertionError(f"fold {f} leaks test samples into training")
        ytr, yte = y[train_idx], y[test_idx]
        sizes.append(int(test_idx.shape[0]))
        counts = [int(np.sum(yte == c)) for c in (HEALTHY, NONHEALTHY)]
        majority.append(max(counts) / test_idx.shape[0])
        for pca_k in config.pca_components:
            pca = pca_fit(X[train_idx], pca_k)
            Ztr = pca_transform(pca, X[train_idx])
            scaler = minmax_fit(Ztr)
            Ztr = minmax_transform(scaler, Ztr)
            Zte = minmax_transform(scaler, pca_transform(pca, X[test_idx]))
            for variant in variants:
                pred = _fit_predict(
                    variant, Ztr, ytr, Zte, config, pca_k, f, kernel_sink
                )
                fold_accs[(pca_k, *variant)].append(accuracy(pred, yte))

    cells = [
        CellResult(
            pca_components=p,
            model=m,
            feature_map=fm,
            fold_accuracies=list(fold_accs[(p, m, fm)]),
            mean_accuracy=float(np.mean(fold_accs[(p, m, fm)])),
        )
        for p in config.pca_components
        for (m, fm) in variants
    ]
    return ExperimentReport(
        cells=cells,
        config=config.to_dict(),
        seed=config.seed,
        config_hash=config.digest(),
        fold_sizes=sizes,
        fold_test_majority_fraction=majority,
        started_at=started,
        finished_at=datetime.now(timezone.utc).isoformat(),
    )
