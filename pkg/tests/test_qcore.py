import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geomgate.errors import NonUnitaryInput, UnknownGateName
from geomgate.qcore import (CliffordElement, GateSpec, I2, KET0,
                            PAULIS, SIGMA_X, SIGMA_Y, SIGMA_Z,
                            axis_angle_unitary, axis_eigenstates,
                            clifford_group, clifford_index_of,
                            clifford_inverse, clifford_tables,
                            compose_cliffords, density_of, is_density_matrix,
                            is_hermitian, is_normalized, is_unitary,
                            named_gate, phase_distance, recovery_gate,
                            unitary_to_axis_angle)

from conftest import STANDARD_GATES, random_spec

SQ2 = math.sqrt(2.0)


def test_pauli_algebra_exhaustive():
    # sigma_i sigma_j = delta_ij I + i eps_ijk sigma_k
    eps = np.zeros((3, 3, 3))
    eps[0, 1, 2] = eps[1, 2, 0] = eps[2, 0, 1] = 1.0
    eps[0, 2, 1] = eps[2, 1, 0] = eps[1, 0, 2] = -1.0
    for i in range(3):
        for j in range(3):
            want = (I2 if i == j else np.zeros((2, 2))) + 1j * sum(
                eps[i, j, k] * PAULIS[k + 1] for k in range(3))
            got = PAULIS[i + 1] @ PAULIS[j + 1]
            assert np.allclose(got, want, atol=1e-15)


def test_pauli_predicates():
    for p in PAULIS:
        assert is_hermitian(p)
        assert is_unitary(p)
    for p in PAULIS[1:]:
        assert np.trace(p) == 0


def test_axis_angle_zero_rotation_is_identity():
    assert np.allclose(axis_angle_unitary(GateSpec(0, 0, 0)), I2, atol=0)


def test_axis_angle_pauli_rotation():
    got = axis_angle_unitary(GateSpec(math.pi / 2, 0.0, math.pi))
    assert np.allclose(got, -1j * SIGMA_X, atol=1e-15)


def test_axis_angle_hadamard():
    # oracle: -i (sx + sz)/sqrt(2) times H^dag equals -i I
    m = -1j * (SIGMA_X + SIGMA_Z) / SQ2
    h = STANDARD_GATES["H"]
    assert np.allclose(m @ h.conj().T, -1j * I2, atol=1e-15)
    got = axis_angle_unitary(GateSpec(math.pi / 4, 0.0, math.pi))
    assert np.allclose(got, m, atol=1e-15)
    assert phase_distance(got, h) < 1e-12


def test_unitary_to_axis_angle_rz_pi():
    spec = unitary_to_axis_angle(-1j * SIGMA_Z)
    assert spec.theta == pytest.approx(0.0, abs=1e-12)
    assert spec.phi == pytest.approx(0.0, abs=1e-12)
    assert spec.gamma == pytest.approx(math.pi, abs=1e-12)


def test_unitary_to_axis_angle_strips_global_phase():
    u = np.exp(1j * math.pi / 7) * I2
    spec = unitary_to_axis_angle(u)
    assert (spec.theta, spec.phi, spec.gamma) == (0.0, 0.0, 0.0)


def test_unitary_to_axis_angle_hadamard_round_trip():
    spec = unitary_to_axis_angle(STANDARD_GATES["H"])
    assert spec.theta == pytest.approx(math.pi / 4, abs=1e-12)
    assert spec.phi == pytest.approx(0.0, abs=1e-12)
    assert spec.gamma == pytest.approx(math.pi, abs=1e-12)
    assert phase_distance(axis_angle_unitary(spec), STANDARD_GATES["H"]) < 1e-12


def test_unitary_to_axis_angle_rejects_nonunitary():
    with pytest.raises(NonUnitaryInput):
        unitary_to_axis_angle(np.array([[1.0, 0.5], [0.0, 1.0]], dtype=complex))


def test_round_trip_1000_random_specs(rng):
    for _ in range(1000):
        spec = random_spec(rng)
        u = axis_angle_unitary(spec)
        back = unitary_to_axis_angle(u)
        assert phase_distance(axis_angle_unitary(back), u) < 1e-10
        assert 0.0 <= back.theta <= math.pi
        assert -math.pi <= back.phi < math.pi
        assert -2 * math.pi < back.gamma <= 2 * math.pi


@settings(max_examples=300, deadline=None)
@given(theta=st.floats(0.0, math.pi),
       phi=st.floats(-math.pi, math.pi, exclude_max=True),
       gamma=st.floats(-2 * math.pi, 2 * math.pi, exclude_min=True))
def test_round_trip_property(theta, phi, gamma):
    spec = GateSpec(theta, phi, gamma)
    u = axis_angle_unitary(spec)
    assert phase_distance(axis_angle_unitary(unitary_to_axis_angle(u)), u) < 1e-10


def test_gate_spec_validation():
    with pytest.raises(ValueError):
        GateSpec(-0.5, 0.0, 0.0)
    with pytest.raises(ValueError):
        GateSpec(0.0, 4.0, 0.0)
    with pytest.raises(ValueError):
        GateSpec(0.0, 0.0, 7.0)
    # boundary folding: phi = pi wraps to -pi, gamma = -2*pi folds to +2*pi
    assert GateSpec(0.1, math.pi, 0.0).phi == pytest.approx(-math.pi)
    folded = GateSpec(0.1, 0.0, -2.0 * math.pi)
    assert folded.gamma == pytest.approx(2.0 * math.pi)


def test_named_gates_match_standard_matrices():
    for name, matrix in STANDARD_GATES.items():
        spec = named_gate(name)
        assert phase_distance(axis_angle_unitary(spec), matrix) < 1e-12


def test_named_gate_examples():
    spec = named_gate("Rx(pi/2)")
    assert (spec.theta, spec.phi, spec.gamma) == (math.pi / 2, 0.0, math.pi / 2)
    spec = named_gate("Ry(pi)")
    assert (spec.theta, spec.phi, spec.gamma) == (math.pi / 2, math.pi / 2, math.pi)


def test_named_gate_unknown():
    with pytest.raises(UnknownGateName):
        named_gate("T")


def test_axis_eigenstates_are_eigenvectors(rng):
    for _ in range(50):
        spec = random_spec(rng)
        n = spec.axis
        ns = n[0] * SIGMA_X + n[1] * SIGMA_Y + n[2] * SIGMA_Z
        plus, minus = axis_eigenstates(spec)
        assert is_normalized(plus) and is_normalized(minus)
        assert np.allclose(ns @ plus, plus, atol=1e-12)
        assert np.allclose(ns @ minus, -minus, atol=1e-12)
        assert abs(np.vdot(plus, minus)) < 1e-12


def test_density_helpers():
    rho = density_of(KET0)
    assert is_density_matrix(rho)
    assert not is_density_matrix(1.1 * rho)


def test_phase_distance_examples():
    assert phase_distance(I2, I2) == 0.0
    assert phase_distance(I2, np.exp(1j * math.pi / 3) * I2) < 1e-15
    assert phase_distance(I2, SIGMA_X) == pytest.approx(1.0)
    with pytest.raises(NonUnitaryInput):
        phase_distance(I2, 2.0 * I2)


# ---------------------------------------------------------------------------
# Clifford group

def test_clifford_group_basics():
    group = clifford_group()
    assert len(group) == 24
    assert all(isinstance(e, CliffordElement) for e in group)
    assert np.allclose(group[0].unitary, I2, atol=0)
    # pairwise distinct up to phase
    for i in range(24):
        for j in range(i + 1, 24):
            assert phase_distance(group[i].unitary, group[j].unitary) > 1e-6


def test_clifford_elements_match_their_specs():
    for e in clifford_group():
        assert phase_distance(e.unitary, axis_angle_unitary(e.spec)) < 1e-10


def test_clifford_closure_and_inverse_exhaustive():
    group = clifford_group()
    compose, inverse = clifford_tables()
    for i in range(24):
        for j in range(24):
            prod = group[i].unitary @ group[j].unitary
            k = int(compose[i, j])
            assert phase_distance(prod, group[k].unitary) < 1e-10
    for i in range(24):
        inv = int(inverse[i])
        assert phase_distance(group[i].unitary @ group[inv].unitary, I2) < 1e-10
        assert compose_cliffords(i, inv) == 0


def test_clifford_index_of_round_trip():
    for e in clifford_group():
        assert clifford_index_of(np.exp(0.3j) * e.unitary) == e.index
    with pytest.raises(ValueError):
        clifford_index_of(axis_angle_unitary(GateSpec(0.3, 0.2, 0.7)))


def test_recovery_identity_and_single():
    group = clifford_group()
    assert recovery_gate([0]).index == 0
    for i in range(24):
        assert recovery_gate([i]).index == clifford_inverse(i)
    with pytest.raises(ValueError):
        recovery_gate([])


def test_recovery_random_length_100(rng):
    group = clifford_group()
    for _ in range(20):
        seq = [int(k) for k in rng.integers(0, 24, size=100)]
        rec = recovery_gate(seq)
        acc = I2
        for idx in seq:
            acc = group[idx].unitary @ acc
        assert phase_distance(rec.unitary @ acc, I2) < 1e-10
