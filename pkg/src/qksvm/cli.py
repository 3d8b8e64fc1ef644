"""Command-line entry point: CSV ingestion, experiment runs, kernel dumps.

The feature CSV bridge is ``id,label,f0,...,f2047`` with UTF-8 text, decimal
features and label tokens healthy / nonhealthy / soft_rot (any case). All
randomness flows from the single --seed.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
import warnings
from pathlib import Path

import numpy as np

from .feature_maps import FAMILIES, FeatureMapSpec
from .kernel import gram_matrix, rbf_kernel, scale_gamma, write_kernel_csv
from .pipeline import (
    HEALTHY,
    NONHEALTHY,
    Dataset,
    ExperimentConfig,
    run_experiment,
)
from .preprocess import minmax_fit, minmax_transform, pca_fit, pca_transform

EXPECTED_FEATURES = 2048

_LABEL_TOKENS = {
    "healthy": HEALTHY,
    "nonhealthy": NONHEALTHY,
    "soft_rot": NONHEALTHY,
}

OUTPUT_DIR_ENV = "QKSVM_OUTPUT_DIR"


def format_float(value: float) -> str:
    """17 significant digits: enough to round-trip any double exactly."""
    return format(value, ".17g")


def load_feature_csv(path) -> Dataset:
    """Parse the feature CSV; every malformed row is reported by line number."""
    path = Path(path)
    if not path.is_file():
        raise ValueError(f"input file not found: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        if len(header) < 3 or header[0] != "id" or header[1] != "label":
            raise ValueError(
                f"{path}: line 1: header must start with 'id,label,f0,...'"
            )
        width = len(header) - 2
        if width != EXPECTED_FEATURES:
            warnings.warn(
                f"{path}: {width} feature columns (expected {EXPECTED_FEATURES}); "
                "accepting the uniform width",
                UserWarning,
                stacklevel=2,
            )
        ids: list[str] = []
        labels: list[int] = []
        rows: list[list[float]] = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ValueError(
                    f"{path}: line {line_no}: expected {len(header)} columns, "
                    f"got {len(row)}"
                )
            token = row[1].strip().lower()
            if token not in _LABEL_TOKENS:
                raise ValueError(
                    f"{path}: line {line_no}: unknown label token {row[1]!r}"
                )
            try:
                rows.append([float(v) for v in row[2:]])
            except ValueError:
                raise ValueError(
                    f"{path}: line {line_no}: non-numeric feature value"
                ) from None
            ids.append(row[0])
            labels.append(_LABEL_TOKENS[token])
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return Dataset(
        ids=ids,
        features=np.asarray(rows, dtype=np.float64),
        labels=np.asarray(labels, dtype=np.int64),
    )


def _gamma_value(text: str):
    if text == "scale":
        return "scale"
    value = float(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("gamma must be positive or 'scale'")
    return value


def _resolve_output(path_text: str) -> Path:
    path = Path(path_text)
    override = os.environ.get(OUTPUT_DIR_ENV)
    if override:
        path = Path(override) / path.name
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _cmd_run(args: argparse.Namespace) -> int:
    dataset = load_feature_csv(args.input)
    out_json = _resolve_output(args.output)
    config = ExperimentConfig(
        pca_components=tuple(args.pca),
        models=tuple(args.models),
        maps=tuple(args.maps),
        reps=args.reps,
        C=args.C,
        gamma=args.gamma,
        n_trees=args.n_trees,
        k_folds=args.k_folds,
        seed=args.seed,
        input=str(args.input),
        output=str(out_json),
        dump_kernels=bool(args.dump_kernels),
    )
    sink = None
    if args.dump_kernels:
        kernel_dir = out_json.parent

        def sink(name, K):
            write_kernel_csv(K, kernel_dir / f"kernel_{name}.csv")

    report = run_experiment(dataset, config, kernel_sink=sink)
    out_json.write_text(report.to_json(), encoding="utf-8")
    out_text = out_json.with_suffix(".txt")
    out_text.write_text(report.to_table_text(), encoding="utf-8")
    print(report.to_table_text())
    print(f"report: {out_json}")
    return 0


def _cmd_kernel(args: argparse.Namespace) -> int:
    dataset = load_feature_csv(args.input)
    pca = pca_fit(dataset.features, args.pca)
    Z = pca_transform(pca, dataset.features)
    Z = minmax_transform(minmax_fit(Z), Z)
    if args.map == "rbf":
        gamma = scale_gamma(Z) if args.gamma == "scale" else float(args.gamma)
        K = rbf_kernel(Z, gamma=gamma)
    else:
        K = gram_matrix(FeatureMapSpec(args.map, args.pca, args.reps), Z)
    out = _resolve_output(args.output)
    write_kernel_csv(K, out)
    print(f"{K.rows}x{K.cols} {args.map} kernel written to {out}")
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    dataset = load_feature_csv(args.input)
    dataset.validate()
    healthy = int(np.sum(dataset.labels == HEALTHY))
    print(
        f"{len(dataset.ids)} rows, {dataset.features.shape[1]} features, "
        f"{healthy} Healthy / {len(dataset.ids) - healthy} Nonhealthy"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qksvm",
        description="Quantum fidelity-kernel SVM experiments over deep-feature CSVs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the cross-validated experiment grid")
    run.add_argument("--input", required=True, help="feature CSV path")
    run.add_argument("--pca", type=int, nargs="+", default=[3, 6, 9])
    run.add_argument("--models", nargs="+", default=["svm", "rf"],
                     choices=["svm", "rf"])
    run.add_argument("--maps", "--map", nargs="+", default=["zz", "z", "paulix"],
                     choices=list(FAMILIES))
    run.add_argument("--reps", type=int, default=1)
    run.add_argument("--C", type=float, default=1.0)
    run.add_argument("--gamma", type=_gamma_value, default="scale")
    run.add_argument("--n-trees", type=int, default=100)
    run.add_argument("--k-folds", type=int, default=5)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--output", default="report.json")
    run.add_argument("--dump-kernels", action="store_true",
                     help="write every train/test kernel next to the report")
    run.set_defaults(func=_cmd_run)

    kern = sub.add_parser("kernel", help="dump one Gram matrix over the whole file")
    kern.add_argument("--input", required=True)
    kern.add_argument("--map", default="z", choices=list(FAMILIES) + ["rbf"])
    kern.add_argument("--reps", type=int, default=1)
    kern.add_argument("--pca", type=int, default=3)
    kern.add_argument("--gamma", type=_gamma_value, default="scale")
    kern.add_argument("--output", default="kernel.csv")
    kern.set_defaults(func=_cmd_kernel)

    val = sub.add_parser("validate", help="ingest a CSV and check invariants")
    val.add_argument("input")
    val.set_defaults(func=_cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())
