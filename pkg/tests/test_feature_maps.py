import math

import numpy as np
import pytest

from qksvm.feature_maps import (
    AngleTerm,
    CircuitDescription,
    FeatureMapSpec,
    build_feature_map,
    encode,
    encode_batch,
)
from qksvm.kernel import fidelity
from qksvm.statevector import GateOp

from oracles import circuit_unitary, dense_encode


@pytest.mark.parametrize(
    "family,n,reps",
    [("warp", 2, 1), ("z", 0, 1), ("z", 13, 1), ("zz", 2, 0), ("zz", 2, 5)],
)
def test_spec_validation(family, n, reps):
    with pytest.raises(ValueError):
        FeatureMapSpec(family, n, reps)


def test_z_map_gate_list():
    circuit = build_feature_map(FeatureMapSpec("z", 2, reps=1))
    x = np.array([0.3, -0.4])
    assert circuit.bind(x) == [
        GateOp("h", 0),
        GateOp("h", 1),
        GateOp("rz", 0, theta=2 * 0.3),
        GateOp("rz", 1, theta=2 * -0.4),
    ]


def test_zz_map_gate_list():
    circuit = build_feature_map(FeatureMapSpec("zz", 2, reps=1))
    x = np.array([0.3, -0.4])
    pair = 2 * (math.pi - 0.3) * (math.pi + 0.4)
    assert circuit.bind(x) == [
        GateOp("h", 0),
        GateOp("h", 1),
        GateOp("rz", 0, theta=2 * 0.3),
        GateOp("rz", 1, theta=2 * -0.4),
        GateOp("cx", 1, control=0),
        GateOp("rz", 1, theta=pair),
        GateOp("cx", 1, control=0),
    ]


def test_zz_pairs_cover_all_ordered_pairs():
    circuit = build_feature_map(FeatureMapSpec("zz", 4, reps=1))
    pairs = [g.angle.indices for g in circuit.gates
             if g.angle is not None and len(g.angle.indices) == 2]
    assert pairs == [(i, j) for i in range(4) for j in range(i + 1, 4)]


@pytest.mark.parametrize("family", ["z", "zz", "paulix"])
def test_reps_concatenate_the_block(family):
    one = build_feature_map(FeatureMapSpec(family, 3, reps=1)).gates
    two = build_feature_map(FeatureMapSpec(family, 3, reps=2)).gates
    assert two == one + one


def test_z_family_has_no_cx():
    for family in ("z", "paulix"):
        circuit = build_feature_map(FeatureMapSpec(family, 4, reps=2))
        assert all(g.kind != "cx" for g in circuit.gates)


def test_encode_z_single_qubit_closed_form():
    a = 0.9
    state = encode(FeatureMapSpec("z", 1, reps=1), [a])
    expected = np.array([np.exp(-1j * a), np.exp(1j * a)]) / np.sqrt(2.0)
    np.testing.assert_allclose(state.amplitudes, expected, atol=1e-12)


def test_encode_paulix_single_qubit_closed_form():
    a = 0.35
    state = encode(FeatureMapSpec("paulix", 1, reps=1), [a])
    expected = np.array([np.cos(a), -1j * np.sin(a)])
    np.testing.assert_allclose(state.amplitudes, expected, atol=1e-12)


@pytest.mark.parametrize("family", ["z", "zz", "paulix"])
@pytest.mark.parametrize("reps", [1, 2, 3])
def test_encode_is_normalized(family, reps):
    rng = np.random.default_rng(11)
    spec = FeatureMapSpec(family, 4, reps)
    for _ in range(10):
        state = encode(spec, rng.uniform(-1, 1, size=4))
        assert abs(state.norm_sq() - 1.0) < 1e-10


@pytest.mark.parametrize("family", ["z", "paulix"])
def test_product_maps_factorize(family):
    rng = np.random.default_rng(12)
    full = FeatureMapSpec(family, 3, reps=2)
    single = FeatureMapSpec(family, 1, reps=2)
    for _ in range(10):
        x = rng.uniform(-1, 1, size=3)
        y = rng.uniform(-1, 1, size=3)
        product = np.prod([fidelity(single, [x[q]], [y[q]]) for q in range(3)])
        assert abs(fidelity(full, x, y) - product) < 1e-10


def test_zz_degenerates_to_z_when_pair_angles_vanish():
    # Any feature equal to pi kills every pair term it appears in, so vectors
    # with at most one non-pi entry encode identically under zz and z.
    zz = FeatureMapSpec("zz", 2, reps=2)
    z = FeatureMapSpec("z", 2, reps=2)
    with pytest.warns(RuntimeWarning):
        state_zz = encode(zz, [math.pi, 0.4])
        state_z = encode(z, [math.pi, 0.4])
        np.testing.assert_allclose(state_zz.amplitudes, state_z.amplitudes, atol=1e-10)
        k_zz = fidelity(zz, [math.pi, 0.4], [math.pi, -0.8])
        k_z = fidelity(z, [math.pi, 0.4], [math.pi, -0.8])
    assert abs(k_zz - k_z) < 1e-10


@pytest.mark.parametrize("family", ["z", "zz", "paulix"])
def test_reps_equal_composing_the_block(family):
    rng = np.random.default_rng(13)
    x = rng.uniform(-1, 1, size=3)
    spec2 = FeatureMapSpec(family, 3, reps=2)
    block = build_feature_map(FeatureMapSpec(family, 3, reps=1))
    u = circuit_unitary(block.bind(x), 3)
    twice = u @ (u @ dense_encode(CircuitDescription(3), x))
    np.testing.assert_allclose(encode(spec2, x).amplitudes, twice, atol=1e-10)


def test_encode_input_validation():
    spec = FeatureMapSpec("z", 2, reps=1)
    with pytest.raises(ValueError):
        encode(spec, [0.1])
    with pytest.raises(ValueError):
        encode(spec, [0.1, float("nan")])
    with pytest.warns(RuntimeWarning):
        encode(spec, [1.5, 0.0])


def test_encode_batch_matches_single_encodes():
    rng = np.random.default_rng(14)
    spec = FeatureMapSpec("zz", 3, reps=2)
    X = rng.uniform(-1, 1, size=(6, 3))
    batch = encode_batch(spec, X)
    for r in range(6):
        np.testing.assert_array_equal(batch[r], encode(spec, X[r]).amplitudes)


def test_angle_term_values():
    x = np.array([0.5, -0.25])
    assert AngleTerm((1,)).evaluate(x) == -0.5
    assert AngleTerm((0, 1)).evaluate(x) == pytest.approx(
        2 * (math.pi - 0.5) * (math.pi + 0.25)
    )


def test_circuit_description_rejects_nothing_but_reports_qubits():
    circuit = build_feature_map(FeatureMapSpec("zz", 3, reps=1))
    assert isinstance(circuit, CircuitDescription)
    assert circuit.n_qubits == 3
    assert all(g.target < 3 for g in circuit.gates)
    assert all(g.control is None or g.control < 3 for g in circuit.gates)
