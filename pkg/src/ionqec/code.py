"""The 7-qubit color code.

Stabilizers, codewords, the distance-3 lookup decoder and the perfect
encode/discriminate procedures used at the ends of every storage experiment.
Qubits are indexed 0..6; the three plaquettes are (0,1,2,3), (1,2,4,5) and
(2,3,5,6), with X- and Z-type stabilizers sharing supports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .pauli import PauliString
from .statevec import GateOp, StateVector, apply_pauli, measure_pauli

PLAQUETTES = ((0, 1, 2, 3), (1, 2, 4, 5), (2, 3, 5, 6))
N_DATA = 7


@dataclass(frozen=True)
class CodeSpec:
    n: int
    sx: tuple          # three X-plaquette stabilizers
    sz: tuple          # three Z-plaquette stabilizers
    logical_x: PauliString
    logical_z: PauliString

    def stabilizers(self) -> tuple:
        return self.sx + self.sz


def steane() -> CodeSpec:
    sx = tuple(PauliString.from_label("X" * 4, plq) for plq in PLAQUETTES)
    sz = tuple(PauliString.from_label("Z" * 4, plq) for plq in PLAQUETTES)
    return CodeSpec(
        n=N_DATA,
        sx=sx,
        sz=sz,
        logical_x=PauliString.from_label("X" * 7, range(7)),
        logical_z=PauliString.from_label("Z" * 7, range(7)),
    )


CODE = steane()

# each single-qubit error flips exactly the plaquettes containing the qubit;
# the seven qubits realize all seven non-trivial 3-bit patterns
_PATTERN_TO_QUBIT = {
    frozenset(m for m, plq in enumerate(PLAQUETTES) if q in plq): q
    for q in range(N_DATA)
}

_codeword_cache: dict[int, tuple] = {}


def codewords() -> tuple[StateVector, StateVector]:
    """(|0_L>, |1_L>): +1 eigenstates of all six stabilizers, Z_L = +/-1."""
    if 0 not in _codeword_cache:
        zero = StateVector.basis(N_DATA, 0)
        for s in CODE.sx:  # project with (1 + S)/2, then normalize
            zero.amps = zero.amps + apply_pauli(zero.copy(), s).amps
        zero.amps /= np.linalg.norm(zero.amps)
        one = apply_pauli(zero.copy(), CODE.logical_x)
        _codeword_cache[0] = (zero, one)
    zero, one = _codeword_cache[0]
    return zero.copy(), one.copy()


def encode_logical(alpha: complex, beta: complex) -> StateVector:
    """Perfectly prepared alpha|0_L> + beta|1_L>."""
    if abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1.0) > 1e-9:
        raise ValueError("amplitudes must be normalized")
    zero, one = codewords()
    return StateVector(N_DATA, alpha * zero.amps + beta * one.amps)


def perfect_syndrome(state: StateVector, rng) -> tuple[tuple, StateVector]:
    """Sequential projective measurement of the six stabilizers.

    Returns the +-1 outcomes ordered (S_x 1..3, S_z 1..3) and the
    post-projection state.  Outcomes are Born-sampled; on a Pauli-corrupted
    codeword every outcome is deterministic and no randomness is consumed
    beyond threshold comparisons.
    """
    outcomes = []
    for s in CODE.stabilizers():
        v, state = measure_pauli(state, s, rng.random())
        outcomes.append(v)
    return tuple(outcomes), state


def decode_lookup(syndrome) -> PauliString:
    """Minimum-weight correction for a six-entry +-1 syndrome.

    X-type plaquette violations locate a Z correction and vice versa; when
    both point at the same qubit the product is a Y correction.
    """
    syndrome = tuple(syndrome)
    if len(syndrome) != 6 or any(v not in (1, -1) for v in syndrome):
        raise ValueError("syndrome must be six +-1 values")
    corr = PauliString.identity()
    x_hits = frozenset(m for m in range(3) if syndrome[m] == -1)
    z_hits = frozenset(m for m in range(3) if syndrome[3 + m] == -1)
    if x_hits:
        corr = corr * PauliString.from_label("Z", [_PATTERN_TO_QUBIT[x_hits]])
    if z_hits:
        corr = corr * PauliString.from_label("X", [_PATTERN_TO_QUBIT[z_hits]])
    return corr


def _syndrome_branches(state: StateVector, tol: float = 1e-14):
    """All Born branches of the six-stabilizer measurement cascade."""
    branches = [(1.0, (), state)]
    for s in CODE.stabilizers():
        nxt = []
        for prob, syn, st in branches:
            moved = apply_pauli(st.copy(), s)
            p_plus = 0.5 * (1.0 + float(np.vdot(st.amps, moved.amps).real))
            if p_plus > tol:
                amps = (st.amps + moved.amps) / (2.0 * math.sqrt(p_plus))
                nxt.append((prob * p_plus, syn + (1,), StateVector(N_DATA, amps)))
            if 1.0 - p_plus > tol:
                amps = (st.amps - moved.amps) / (2.0 * math.sqrt(1.0 - p_plus))
                nxt.append((prob * (1.0 - p_plus), syn + (-1,), StateVector(N_DATA, amps)))
        branches = nxt
    return branches


def bob_discriminate(final_state: StateVector, alpha: complex, beta: complex) -> float:
    """Success probability of the receiver's perfect correction round.

    Projects the state onto stabilizer eigenspaces, applies the lookup
    correction in each Born branch, and returns the branch-averaged fidelity
    with the intended logical state.  Exact (no sampling).
    """
    target = encode_logical(alpha, beta)
    total = 0.0
    for prob, syn, st in _syndrome_branches(final_state):
        corrected = apply_pauli(st, decode_lookup(syn))
        total += prob * float(np.abs(np.vdot(target.amps, corrected.amps)) ** 2)
    return total


def transversal_logical(kind: str) -> list[GateOp]:
    """Bit-wise implementation of a logical gate as a GateOp sequence."""
    allq = tuple(range(N_DATA))
    if kind == "X_L":
        return [GateOp("LocalX", (q,), math.pi) for q in allq]
    if kind == "Z_L":
        return [GateOp("LocalZ", (q,), math.pi) for q in allq]
    if kind == "H_L":
        # H = X . R_y(pi/2) exactly on each qubit
        return [GateOp("GlobalRot", allq, math.pi / 2, math.pi / 2)] + \
            [GateOp("LocalX", (q,), math.pi) for q in allq]
    if kind == "S_L":
        return [GateOp("AddressedZ", (q,), math.pi / 2) for q in allq]
    raise ValueError(f"unknown logical gate {kind!r}")
