"""Data-encoding circuits: the Z, ZZ and Pauli-X feature maps.

Angles follow the common angle-embedding convention: single-qubit terms
rotate by 2*x_i, the entangling pair terms of the ZZ map rotate by
2*(pi - x_i)*(pi - x_j), and every repetition prepends a Hadamard layer.
The Pauli-X map realizes its X-axis rotation as the H.RZ(2x).H sandwich,
so per repetition each qubit sees exactly RX(2*x_i).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .statevector import (
    MAX_QUBITS,
    GateOp,
    Statevector,
    _cx_inplace,
    _h_inplace,
    _rz_inplace,
)

FAMILIES = ("z", "zz", "paulix")

MAX_REPS = 4


@dataclass(frozen=True)
class FeatureMapSpec:
    """Which encoding unitary to build: family, width and repetitions."""

    family: str
    n_features: int
    reps: int = 1

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(
                f"unknown feature map family {self.family!r}; expected one of {FAMILIES}"
            )
        if not 1 <= self.n_features <= MAX_QUBITS:
            raise ValueError(
                f"n_features must be in [1, {MAX_QUBITS}], got {self.n_features}"
            )
        if not 1 <= self.reps <= MAX_REPS:
            raise ValueError(f"reps must be in [1, {MAX_REPS}], got {self.reps}")


@dataclass(frozen=True)
class AngleTerm:
    """RZ angle as a function of the feature vector.

    One index i encodes 2*x_i; an index pair (i, j) encodes the
    entangling term 2*(pi - x_i)*(pi - x_j).
    """

    indices: tuple[int, ...]

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        if len(self.indices) == 1:
            return 2.0 * x[..., self.indices[0]]
        i, j = self.indices
        return 2.0 * (math.pi - x[..., i]) * (math.pi - x[..., j])


@dataclass(frozen=True)
class GateTemplate:
    kind: str  # "h" | "rz" | "cx"
    target: int
    control: int | None = None
    angle: AngleTerm | None = None

    def bind(self, x: np.ndarray) -> GateOp:
        theta = float(self.angle.evaluate(x)) if self.angle is not None else None
        return GateOp(self.kind, self.target, self.control, theta)


@dataclass(frozen=True)
class CircuitDescription:
    """Ordered gate templates whose RZ angles are functions of the input."""

    n_qubits: int
    gates: tuple[GateTemplate, ...] = field(default_factory=tuple)

    def bind(self, x) -> list[GateOp]:
        """Instantiate every template angle with a concrete feature vector."""
        x = np.asarray(x, dtype=np.float64)
        return [g.bind(x) for g in self.gates]


def _single(i: int) -> AngleTerm:
    return AngleTerm((i,))


def _pair(i: int, j: int) -> AngleTerm:
    return AngleTerm((i, j))


@lru_cache(maxsize=64)
def build_feature_map(spec: FeatureMapSpec) -> CircuitDescription:
    """Construct the encoding circuit for ``spec``, one block per repetition."""
    n = spec.n_features
    gates: list[GateTemplate] = []
    for _ in range(spec.reps):
        gates.extend(GateTemplate("h", q) for q in range(n))
        if spec.family == "z":
            gates.extend(GateTemplate("rz", q, angle=_single(q)) for q in range(n))
        elif spec.family == "zz":
            gates.extend(GateTemplate("rz", q, angle=_single(q)) for q in range(n))
            for i in range(n):
                for j in range(i + 1, n):
                    gates.append(GateTemplate("cx", j, control=i))
                    gates.append(GateTemplate("rz", j, angle=_pair(i, j)))
                    gates.append(GateTemplate("cx", j, control=i))
        else:  # paulix: close the basis-change sandwich opened by the H layer
            for q in range(n):
                gates.append(GateTemplate("rz", q, angle=_single(q)))
                gates.append(GateTemplate("h", q))
    return CircuitDescription(n, tuple(gates))


def _validate_features(spec: FeatureMapSpec, X: np.ndarray) -> None:
    if X.ndim != 2 or X.shape[1] != spec.n_features:
        raise ValueError(
            f"feature vectors of length {spec.n_features} required, got shape {X.shape}"
        )
    if not np.all(np.isfinite(X)):
        raise ValueError("feature values must be finite")
    if np.any(np.abs(X) > 1.0):
        warnings.warn(
            "feature values outside [-1, 1]; encoding angles remain valid but "
            "upstream scaling is expected to bound the range",
            RuntimeWarning,
            stacklevel=3,
        )


def encode_batch(spec: FeatureMapSpec, X) -> np.ndarray:
    """Encode every row of ``X``; returns an (m, 2**n) complex matrix."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    _validate_features(spec, X)
    circuit = build_feature_map(spec)
    m = X.shape[0]
    amp = np.zeros((m, 2**spec.n_features), dtype=np.complex128)
    amp[:, 0] = 1.0
    for g in circuit.gates:
        if g.kind == "h":
            _h_inplace(amp, g.target)
        elif g.kind == "rz":
            _rz_inplace(amp, g.target, g.angle.evaluate(X))
        else:
            _cx_inplace(amp, g.control, g.target)
    return amp


def encode(spec: FeatureMapSpec, x) -> Statevector:
    """|phi(x)>: apply the bound feature-map circuit to the all-zero state."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError(f"expected a single feature vector, got shape {x.shape}")
    return Statevector(spec.n_features, encode_batch(spec, x[None, :])[0])
