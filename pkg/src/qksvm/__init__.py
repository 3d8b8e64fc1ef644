"""Quantum fidelity-kernel SVM pipeline with classical baselines."""

from .cli import load_feature_csv
from .feature_maps import FAMILIES, CircuitDescription, FeatureMapSpec, build_feature_map, encode
from .forest import ForestConfig, ForestModel, forest_predict, forest_train
from .kernel import KernelMatrix, fidelity, gram_matrix, rbf_kernel, scale_gamma
from .pipeline import (
    Dataset,
    ExperimentConfig,
    ExperimentReport,
    accuracy,
    run_experiment,
    stratified_kfold,
)
from .preprocess import (
    PCAModel,
    ScalerModel,
    minmax_fit,
    minmax_transform,
    pca_fit,
    pca_transform,
)
from .statevector import (
    GateOp,
    Statevector,
    apply_cx,
    apply_gate,
    apply_hadamard,
    apply_rz,
    inner_product,
    zero_state,
)
from .svm import SVMModel, svm_decision, svm_predict, svm_train

__all__ = [
    "FAMILIES",
    "CircuitDescription",
    "Dataset",
    "ExperimentConfig",
    "ExperimentReport",
    "FeatureMapSpec",
    "ForestConfig",
    "ForestModel",
    "GateOp",
    "KernelMatrix",
    "PCAModel",
    "SVMModel",
    "ScalerModel",
    "Statevector",
    "accuracy",
    "apply_cx",
    "apply_gate",
    "apply_hadamard",
    "apply_rz",
    "build_feature_map",
    "encode",
    "fidelity",
    "forest_predict",
    "forest_train",
    "gram_matrix",
    "inner_product",
    "load_feature_csv",
    "minmax_fit",
    "minmax_transform",
    "pca_fit",
    "pca_transform",
    "rbf_kernel",
    "run_experiment",
    "scale_gamma",
    "stratified_kfold",
    "svm_decision",
    "svm_predict",
    "svm_train",
    "zero_state",
]

__version__ = "0.1.0"
