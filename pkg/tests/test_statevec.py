"""State-vector kernels against dense matrix-exponential oracles."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from ionqec.pauli import PauliString
from ionqec.statevec import (
    GateOp,
    StateVector,
    apply_gate,
    apply_pauli,
    build_unitary,
    measure_pauli,
    measure_z,
    overlap_probability,
)

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]])
Z = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2)
PAULI = {"I": I2, "X": X, "Y": Y, "Z": Z}


def kron_on(n, ops):
    """Dense operator acting with ops[q] on qubit q (little-endian index)."""
    m = np.array([[1.0]], dtype=complex)
    for q in range(n):  # qubit 0 is the least significant factor
        m = np.kron(ops.get(q, I2), m)
    return m


def dense_oracle(gate: GateOp, n: int) -> np.ndarray:
    s_phi = np.cos(gate.phi) * X + np.sin(gate.phi) * Y
    if gate.kind == "MS":
        g = sum(kron_on(n, {q: s_phi}) for q in gate.qubits)
        return expm(-1j * (gate.theta / 4) * (g @ g))
    if gate.kind == "GlobalRot":
        g = sum(kron_on(n, {q: s_phi}) for q in gate.qubits)
        return expm(-1j * (gate.theta / 2) * g)
    if gate.kind in ("XX", "YY"):
        s = X if gate.kind == "XX" else Y
        i, j = gate.qubits
        return expm(-1j * (gate.theta / 2) * (kron_on(n, {i: s}) @ kron_on(n, {j: s})))
    axis = {"AddressedZ": Z, "LocalZ": Z, "LocalX": X, "LocalY": Y}[gate.kind]
    return expm(-1j * (gate.theta / 2) * kron_on(n, {gate.qubits[0]: axis}))


def engine_matrix(gate: GateOp, n: int) -> np.ndarray:
    u = build_unitary(gate)
    cols = []
    for b in range(1 << n):
        cols.append(u.apply(StateVector.basis(n, b)).amps)
    return np.array(cols).T


def random_state(n, rng):
    a = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return StateVector(n, a / np.linalg.norm(a))


# ----------------------------------------------------------------------
# gate kernels vs dense exponentials
# ----------------------------------------------------------------------

@pytest.mark.parametrize("gate,n", [
    (GateOp("MS", (0, 1), np.pi / 2, 0.0), 2),
    (GateOp("MS", (0, 2), np.pi / 2, 0.0), 3),
    (GateOp("MS", (0, 1, 2, 3, 4), np.pi / 2, 0.0), 5),
    (GateOp("MS", (0, 1, 2), 0.73, 1.1), 4),
    (GateOp("MS", (1, 3), -np.pi / 2, np.pi / 2), 4),
    (GateOp("XX", (0, 1), np.pi / 2), 2),
    (GateOp("XX", (1, 2), -0.8), 3),
    (GateOp("YY", (0, 2), np.pi / 2), 3),
    (GateOp("GlobalRot", (0, 1, 2), 0.9, 0.4), 3),
    (GateOp("GlobalRot", (0,), np.pi / 2, np.pi / 2), 2),
    (GateOp("LocalX", (1,), np.pi), 2),
    (GateOp("LocalY", (0,), np.pi / 2), 2),
    (GateOp("LocalZ", (2,), -np.pi / 2), 3),
    (GateOp("AddressedZ", (0,), 1.7), 1),
])
def test_gate_matches_dense_exponential(gate, n):
    got = engine_matrix(gate, n)
    want = dense_oracle(gate, n)
    assert np.max(np.abs(got - want)) < 1e-10


def test_ms_is_unitary_to_tolerance():
    m = engine_matrix(GateOp("MS", (0, 1, 2, 3, 4), np.pi / 2, 0.3), 5)
    assert np.max(np.abs(m.conj().T @ m - np.eye(32))) < 1e-12


def test_two_qubit_ms_on_00():
    # X^2(pi/2)|00> = (|00> - i|11>)/sqrt(2)
    st_ = apply_gate(StateVector.basis(2, 0), GateOp("XX", (0, 1), np.pi / 2))
    want = np.zeros(4, dtype=complex)
    want[0] = 1 / np.sqrt(2)
    want[3] = -1j / np.sqrt(2)
    assert np.max(np.abs(st_.amps - want)) < 1e-12


def test_ms_zero_angle_is_identity():
    st_ = random_state(3, np.random.default_rng(5))
    before = st_.amps.copy()
    apply_gate(st_, GateOp("MS", (0, 1, 2), 0.0, 0.0))
    assert np.max(np.abs(st_.amps - before)) < 1e-14


def test_five_qubit_ms_sixteen_equal_amplitudes():
    st_ = apply_gate(StateVector.basis(5, 0), GateOp("MS", (0, 1, 2, 3, 4), np.pi / 2, 0.0))
    mags = np.abs(st_.amps)
    big = mags[mags > 1e-9]
    assert big.size == 16
    assert np.allclose(big, 0.25, atol=1e-12)


def test_ms_commutes_with_x_on_participants(rng):
    st_ = random_state(4, rng)
    g = GateOp("MS", (0, 2, 3), np.pi / 2, 0.0)
    p = PauliString.from_label("X", [2])
    a = apply_gate(apply_pauli(st_.copy(), p), g)
    b = apply_pauli(apply_gate(st_.copy(), g), p)
    assert np.max(np.abs(a.amps - b.amps)) < 1e-10


# ----------------------------------------------------------------------
# Pauli application
# ----------------------------------------------------------------------

def test_apply_pauli_basics():
    assert np.allclose(apply_pauli(StateVector.basis(1, 0), PauliString.from_label("Z", [0])).amps, [1, 0])
    assert np.allclose(apply_pauli(StateVector.basis(1, 1), PauliString.from_label("Z", [0])).amps, [0, -1])
    assert np.allclose(apply_pauli(StateVector.basis(1, 0), PauliString.from_label("Y", [0])).amps, [0, 1j])
    got = apply_pauli(StateVector.basis(2, 0), PauliString.from_label("XZ", [0, 1]))
    assert np.allclose(got.amps, [0, 1, 0, 0])


@given(st.integers(0, 2), st.sampled_from(["X", "Y", "Z"]), st.integers(0, 10_000))
@settings(max_examples=60, deadline=None)
def test_apply_pauli_matches_dense(qubit, letter, seed):
    rng = np.random.default_rng(seed)
    s = random_state(3, rng)
    p = PauliString.from_label(letter, [qubit])
    want = kron_on(3, {qubit: PAULI[letter]}) @ s.amps
    got = apply_pauli(s.copy(), p).amps
    assert np.max(np.abs(got - want)) < 1e-12


@given(st.integers(0, 10_000))
@settings(max_examples=40, deadline=None)
def test_norm_preserved_by_random_circuits(seed):
    rng = np.random.default_rng(seed)
    s = random_state(4, rng)
    for _ in range(6):
        kind = rng.choice(["MS", "GlobalRot", "LocalX", "LocalZ"])
        if kind == "MS":
            qs = rng.choice(4, size=2, replace=False)
        elif kind == "GlobalRot":
            qs = rng.choice(4, size=3, replace=False)
        else:
            qs = rng.choice(4, size=1)
        apply_gate(s, GateOp(kind, tuple(int(q) for q in qs),
                             float(rng.uniform(-np.pi, np.pi)), float(rng.uniform(0, 2 * np.pi))))
    assert s.norm_error() < 1e-10


# ----------------------------------------------------------------------
# measurement and overlaps
# ----------------------------------------------------------------------

def test_measure_z_deterministic_and_born():
    out, s = measure_z(StateVector.basis(1, 0), 0, 0.999999)
    assert out == 1 and np.allclose(s.amps, [1, 0])
    plus = StateVector(1, np.array([1, 1]) / np.sqrt(2))
    out, s = measure_z(plus.copy(), 0, 0.3)
    assert out == 1 and np.allclose(s.amps, [1, 0])
    out, s = measure_z(plus.copy(), 0, 0.7)
    assert out == -1 and np.allclose(s.amps, [0, 1])


def test_measure_z_ghz_collapses_all_against_density_oracle():
    # |0000>+|1111>: measuring one qubit collapses the rest.
    a = np.zeros(16, dtype=complex)
    a[0] = a[15] = 1 / np.sqrt(2)
    ghz = StateVector(4, a)
    rho = np.outer(a, a.conj())
    p0 = np.trace(rho @ kron_on(4, {0: np.array([[1, 0], [0, 0]], dtype=complex)})).real
    assert abs(p0 - 0.5) < 1e-12
    out, s = measure_z(ghz.copy(), 0, 0.25)
    assert out == 1 and abs(abs(s.amps[0]) - 1) < 1e-12
    out, s = measure_z(ghz.copy(), 0, 0.75)
    assert out == -1 and abs(abs(s.amps[15]) - 1) < 1e-12


def test_measure_pauli_projects():
    plus = StateVector(1, np.array([1, 1]) / np.sqrt(2))
    out, s = measure_pauli(plus.copy(), PauliString.from_label("X", [0]), 0.5)
    assert out == 1
    assert overlap_probability(s, plus) > 1 - 1e-12


def test_overlap_probability():
    a = StateVector.basis(2, 0)
    b = StateVector.basis(2, 3)
    assert overlap_probability(a, a) == pytest.approx(1.0)
    assert overlap_probability(a, b) == pytest.approx(0.0)
    plus = StateVector(1, np.array([1, 1]) / np.sqrt(2))
    assert overlap_probability(StateVector.basis(1, 0), plus) == pytest.approx(0.5)


def test_errors():
    with pytest.raises(ValueError):
        GateOp("MS", (0,), 1.0)
    with pytest.raises(ValueError):
        GateOp("LocalX", (0, 1), 1.0)
    with pytest.raises(IndexError):
        apply_gate(StateVector.basis(2, 0), GateOp("LocalX", (5,), 1.0))
    with pytest.raises(ValueError):
        overlap_probability(StateVector.basis(1, 0), StateVector.basis(2, 0))
