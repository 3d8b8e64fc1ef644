"""Image-folder to deep-feature CSV extraction with a frozen backbone."""

from .extract import (
    FEATURE_DIM,
    IMAGE_SIZE,
    ManifestEntry,
    build_backbone,
    extract_features,
    main,
    preprocess_image,
    scan_manifest,
)

__all__ = [
    "FEATURE_DIM",
    "IMAGE_SIZE",
    "ManifestEntry",
    "build_backbone",
    "extract_features",
    "main",
    "preprocess_image",
    "scan_manifest",
]

__version__ = "0.1.0"
