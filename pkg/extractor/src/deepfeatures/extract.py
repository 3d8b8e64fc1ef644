"""Labeled image folders -> deep-feature CSV.

Images are resized to 224x224, normalized with the backbone's canonical
ImageNet statistics, and pushed through a frozen ResNet-50 trunk whose
classification head is removed; the globally average-pooled 2048-d
activations land in one CSV row per image. Extraction is split-agnostic:
train/test separation happens entirely downstream of the CSV.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch
from PIL import Image
from torch import nn
from torchvision import models

IMAGE_SIZE = 224
FEATURE_DIM = 2048

# Canonical input normalization of the pretrained backbone.
_CHANNEL_MEAN = np.array([0.485, 0.456, 0.406], dtype=np.float32)
_CHANNEL_STD = np.array([0.229, 0.224, 0.225], dtype=np.float32)

_LABEL_FOLDERS = {
    "healthy": "Healthy",
    "nonhealthy": "Nonhealthy",
    "soft_rot": "Nonhealthy",
}

IMAGE_SUFFIXES = {".jpg", ".jpeg", ".png", ".bmp", ".webp"}


@dataclass(frozen=True)
class ManifestEntry:
    path: Path
    label: str  # "Healthy" | "Nonhealthy"


def scan_manifest(image_root) -> list[ManifestEntry]:
    """Collect (path, label) pairs from the two class subfolders.

    Unknown subfolders are skipped with a warning; an empty or missing class
    folder aborts the extraction.
    """
    root = Path(image_root)
    if not root.is_dir():
        raise ValueError(f"image root is not a directory: {root}")
    entries: list[ManifestEntry] = []
    seen_labels: set[str] = set()
    for sub in sorted(p for p in root.iterdir() if p.is_dir()):
        label = _LABEL_FOLDERS.get(sub.name.lower())
        if label is None:
            warnings.warn(f"skipping unrecognized folder {sub.name!r}", UserWarning,
                          stacklevel=2)
            continue
        images = sorted(
            p for p in sub.iterdir()
            if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES
        )
        if not images:
            raise ValueError(f"class folder {sub} contains no images")
        seen_labels.add(label)
        entries.extend(ManifestEntry(path=p, label=label) for p in images)
    missing = {"Healthy", "Nonhealthy"} - seen_labels
    if missing:
        raise ValueError(f"missing class folder(s): {sorted(missing)}")
    return entries


def build_backbone(pretrained: bool = True, seed: int = 0) -> nn.Module:
    """ResNet-50 trunk with the classification head removed.

    ``pretrained=False`` builds a seeded random initialization of the same
    architecture: deterministic, network-free, and contract-identical in
    shape — meant for offline smoke runs and tests.
    """
    if pretrained:
        net = models.resnet50(weights=models.ResNet50_Weights.IMAGENET1K_V1)
    else:
        torch.manual_seed(seed)
        net = models.resnet50(weights=None)
    net.fc = nn.Identity()
    net.eval()
    for param in net.parameters():
        param.requires_grad_(False)
    return net


def preprocess_image(path) -> np.ndarray:
    """Decode, resize to 224x224 and normalize; returns (3, 224, 224) float32."""
    with Image.open(path) as img:
        rgb = img.convert("RGB").resize((IMAGE_SIZE, IMAGE_SIZE), Image.BILINEAR)
    arr = np.asarray(rgb, dtype=np.float32) / 255.0
    arr = (arr - _CHANNEL_MEAN) / _CHANNEL_STD
    return arr.transpose(2, 0, 1)


def _format(value: float) -> str:
    return format(value, ".17g")


def extract_features(image_root, output_csv, backbone: nn.Module | None = None,
                     batch_size: int = 16) -> int:
    """Write one CSV row per readable image; returns the row count.

    Unreadable images are skipped with a warning naming the file; the run
    fails only if nothing could be extracted.
    """
    entries = scan_manifest(image_root)
    if backbone is None:
        backbone = build_backbone()
    root = Path(image_root)

    kept: list[ManifestEntry] = []
    tensors: list[np.ndarray] = []
    skipped = 0
    for entry in entries:
        try:
            tensors.append(preprocess_image(entry.path))
        except (OSError, ValueError) as exc:
            warnings.warn(f"skipping unreadable image {entry.path}: {exc}",
                          UserWarning, stacklevel=2)
            skipped += 1
            continue
        kept.append(entry)
    if not kept:
        raise ValueError(f"no readable images under {root}")

    features = np.empty((len(kept), FEATURE_DIM), dtype=np.float64)
    with torch.no_grad():
        for start in range(0, len(kept), batch_size):
            batch = torch.from_numpy(np.stack(tensors[start:start + batch_size]))
            out = backbone(batch)
            if out.ndim != 2 or out.shape[1] != FEATURE_DIM:
                raise ValueError(
                    f"backbone produced shape {tuple(out.shape)}, "
                    f"expected (*, {FEATURE_DIM})"
                )
            features[start:start + out.shape[0]] = out.numpy()

    output_csv = Path(output_csv)
    output_csv.parent.mkdir(parents=True, exist_ok=True)
    header = "id,label," + ",".join(f"f{i}" for i in range(FEATURE_DIM))
    with output_csv.open("w", encoding="utf-8") as fh:
        fh.write(header + "\n")
        for entry, row in zip(kept, features):
            rel = entry.path.relative_to(root).as_posix()
            fh.write(f"{rel},{entry.label}," + ",".join(_format(v) for v in row))
            fh.write("\n")
    if skipped:
        warnings.warn(f"{skipped} image(s) skipped", UserWarning, stacklevel=2)
    return len(kept)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="deepfeatures",
        description="Convert labeled image folders into a deep-feature CSV",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    ext = sub.add_parser("extract", help="run the extraction")
    ext.add_argument("--input", required=True, help="root with Healthy/ and Nonhealthy/")
    ext.add_argument("--output", required=True, help="CSV destination")
    ext.add_argument("--batch-size", type=int, default=16)
    ext.add_argument("--random-weights", action="store_true",
                     help="seeded random backbone instead of pretrained "
                          "(offline smoke runs)")
    ext.add_argument("--seed", type=int, default=0,
                     help="seed for --random-weights")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        backbone = build_backbone(pretrained=not args.random_weights, seed=args.seed)
        count = extract_features(
            args.input, args.output, backbone=backbone, batch_size=args.batch_size
        )
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"{count} rows written to {args.output}")
    return 0


def entrypoint() -> None:
    sys.exit(main())
