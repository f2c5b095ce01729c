"""Exact pure-state simulation of a small qubit register.

Qubit i is the i-th bit (little-endian) of the basis index.  Gates are applied
by sparse in-place amplitude updates; the multi-qubit MS kernel is applied by
rotating the participating qubits into the S_phi eigenbasis and applying a
diagonal phase, which costs O(k * 2^n) instead of a dense 2^k x 2^k matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .pauli import PauliString

MAX_QUBITS = 16

# XX/YY are the two-qubit product rotations exp(-i theta/2 s_i s_j); they
# equal the 2-qubit MS kernel only up to a global phase, which we keep.
GATE_KINDS = ("MS", "GlobalRot", "AddressedZ", "LocalX", "LocalY", "LocalZ", "XX", "YY")


@dataclass
class StateVector:
    n_qubits: int
    amps: np.ndarray = field(default=None)

    def __post_init__(self):
        if not (1 <= self.n_qubits <= MAX_QUBITS):
            raise ValueError(f"n_qubits must be in [1, {MAX_QUBITS}]")
        if self.amps is None:
            a = np.zeros(1 << self.n_qubits, dtype=np.complex128)
            a[0] = 1.0
            self.amps = a
        else:
            self.amps = np.asarray(self.amps, dtype=np.complex128)
            if self.amps.shape != (1 << self.n_qubits,):
                raise ValueError("amplitude length is not 2^n")

    @staticmethod
    def basis(n_qubits: int, index: int = 0) -> "StateVector":
        a = np.zeros(1 << n_qubits, dtype=np.complex128)
        a[index] = 1.0
        return StateVector(n_qubits, a)

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amps.copy())

    def norm_error(self) -> float:
        return abs(1.0 - float(np.vdot(self.amps, self.amps).real))


@dataclass(frozen=True)
class GateOp:
    kind: str
    qubits: tuple
    theta: float
    phi: float = 0.0

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "qubits", tuple(self.qubits))
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError("repeated qubit index")
        if self.kind == "MS" and len(self.qubits) < 2:
            raise ValueError("MS needs at least 2 qubits")
        if self.kind in ("XX", "YY") and len(self.qubits) != 2:
            raise ValueError(f"{self.kind} acts on exactly two qubits")
        if self.kind in ("AddressedZ", "LocalX", "LocalY", "LocalZ") and len(self.qubits) != 1:
            raise ValueError(f"{self.kind} acts on exactly one qubit")


# ----------------------------------------------------------------------
# kernels
# ----------------------------------------------------------------------

def _apply_1q(amps: np.ndarray, qubit: int, m: np.ndarray) -> None:
    """In-place 2x2 update on one qubit (little-endian bit `qubit`)."""
    block = 1 << qubit
    a = amps.reshape(-1, 2, block)
    a0 = a[:, 0, :].copy()
    a1 = a[:, 1, :]
    a[:, 0, :] = m[0, 0] * a0 + m[0, 1] * a1
    a[:, 1, :] = m[1, 0] * a0 + m[1, 1] * a1


def _sigma_phi(phi: float) -> np.ndarray:
    # cos(phi) X + sin(phi) Y
    return np.array([[0.0, np.exp(-1j * phi)], [np.exp(1j * phi), 0.0]])


def _rot_matrix(axis: str, theta: float, phi: float = 0.0) -> np.ndarray:
    if axis == "phi":
        s = _sigma_phi(phi)
    elif axis == "X":
        s = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)
    elif axis == "Y":
        s = np.array([[0.0, -1j], [1j, 0.0]])
    else:  # Z
        s = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128)
    return np.cos(theta / 2) * np.eye(2) - 1j * np.sin(theta / 2) * s


class Unitary:
    """Compiled action of a GateOp on a StateVector (in place)."""

    def __init__(self, gate: GateOp):
        self.gate = gate

    def apply(self, state: StateVector) -> StateVector:
        g = self.gate
        for q in g.qubits:
            if q >= state.n_qubits:
                raise IndexError(f"qubit {q} out of range for {state.n_qubits}-qubit state")
        if g.kind == "MS":
            self._apply_ms(state)
        elif g.kind in ("XX", "YY"):
            self._apply_pair(state)
        elif g.kind == "GlobalRot":
            m = _rot_matrix("phi", g.theta, g.phi)
            for q in g.qubits:
                _apply_1q(state.amps, q, m)
        else:
            axis = {"AddressedZ": "Z", "LocalX": "X", "LocalY": "Y", "LocalZ": "Z"}[g.kind]
            _apply_1q(state.amps, g.qubits[0], _rot_matrix(axis, g.theta))
        return state

    def _apply_ms(self, state: StateVector) -> None:
        # exp(-i theta/4 S_phi^2): diagonalize each sigma_phi with W, then a
        # diagonal phase depending on the signed weight over participants.
        g = self.gate
        phi, theta = g.phi, g.theta
        e = np.exp(1j * phi)
        w = np.array([[1.0, 1.0], [e, -e]]) / np.sqrt(2.0)
        wd = w.conj().T
        for q in g.qubits:
            _apply_1q(state.amps, q, wd)
        idx = np.arange(state.amps.size)
        m = np.zeros(state.amps.size, dtype=np.int64)
        for q in g.qubits:
            m += (idx >> q) & 1
        s = len(g.qubits) - 2 * m
        state.amps *= np.exp(-1j * (theta / 4.0) * (s.astype(np.float64) ** 2))
        for q in g.qubits:
            _apply_1q(state.amps, q, w)

    def _apply_pair(self, state: StateVector) -> None:
        g = self.gate
        phi = 0.0 if g.kind == "XX" else np.pi / 2
        e = np.exp(1j * phi)
        w = np.array([[1.0, 1.0], [e, -e]]) / np.sqrt(2.0)
        wd = w.conj().T
        for q in g.qubits:
            _apply_1q(state.amps, q, wd)
        idx = np.arange(state.amps.size)
        prod = (1 - 2 * ((idx >> g.qubits[0]) & 1)) * (1 - 2 * ((idx >> g.qubits[1]) & 1))
        state.amps *= np.exp(-1j * (g.theta / 2.0) * prod.astype(np.float64))
        for q in g.qubits:
            _apply_1q(state.amps, q, w)


def build_unitary(gate: GateOp) -> Unitary:
    return Unitary(gate)


def apply_gate(state: StateVector, gate: GateOp) -> StateVector:
    return Unitary(gate).apply(state)


# ----------------------------------------------------------------------
# Pauli application, measurement, overlaps
# ----------------------------------------------------------------------

_PAULI_MATS = {
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128),
    "Y": np.array([[0.0, -1j], [1j, 0.0]]),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128),
}


def apply_pauli(state: StateVector, p: PauliString) -> StateVector:
    for q, s in p.factors.items():
        if q >= state.n_qubits:
            raise IndexError(f"qubit {q} out of range")
        _apply_1q(state.amps, q, _PAULI_MATS[s])
    if p.phase != 1:
        state.amps *= p.phase
    return state


def measure_z(state: StateVector, qubit: int, random01: float):
    """Projective Z measurement.  Outcome +1 <-> |0>, +1 iff random01 < P(+1)."""
    if qubit >= state.n_qubits:
        raise IndexError("qubit out of range")
    a = state.amps.reshape(-1, 2, 1 << qubit)
    p0 = float(np.sum(np.abs(a[:, 0, :]) ** 2))
    p1 = float(np.sum(np.abs(a[:, 1, :]) ** 2))
    if p0 < 1e-14 and p1 < 1e-14:
        raise ValueError("state has vanishing norm on both branches")
    if random01 < p0:
        a[:, 1, :] = 0.0
        state.amps /= np.sqrt(p0)
        return 1, state
    a[:, 0, :] = 0.0
    state.amps /= np.sqrt(p1)
    return -1, state


def expectation_pauli(state: StateVector, p: PauliString) -> float:
    tmp = apply_pauli(state.copy(), p)
    return float(np.vdot(state.amps, tmp.amps).real)


def measure_pauli(state: StateVector, p: PauliString, random01: float):
    """Projective measurement of a +-1 Pauli observable (phase must be +-1)."""
    if p.phase not in (1, -1):
        raise ValueError("observable needs a real sign")
    moved = apply_pauli(state.copy(), p)
    p_plus = 0.5 * (1.0 + float(np.vdot(state.amps, moved.amps).real))
    p_plus = min(1.0, max(0.0, p_plus))
    if random01 < p_plus:
        state.amps = (state.amps + moved.amps) / (2.0 * np.sqrt(p_plus))
        return 1, state
    state.amps = (state.amps - moved.amps) / (2.0 * np.sqrt(1.0 - p_plus))
    return -1, state


def overlap_probability(a: StateVector, b: StateVector) -> float:
    if a.n_qubits != b.n_qubits:
        raise ValueError("dimension mismatch")
    return float(np.abs(np.vdot(a.amps, b.amps)) ** 2)
