"""Symbolic error-frame executor: the cross-validation oracle.

Errors are tracked as an unsigned Pauli frame conjugated through the
ideal circuit; measurement statistics of the noiseless reference are
taken from a precomputed branch tree per gadget, and the trajectory's
success is decided by residual-logical analysis instead of fidelity
evaluation.  Exactly reproduces the statevector engine's outcomes when
driven by the same RNG stream.
"""

from __future__ import annotations

import numpy as np

from .code import CODE, decode_lookup, encode_logical
from .faultprop import propagate_pauli
from .gadgets import BranchStep, Gadget, GateStep, MeasureStep, embed_data_state
from .pauli import PauliString
from .schedule import Schedule
from .statevec import apply_gate

_THIRD = {frozenset("XY"): "Z", frozenset("YZ"): "X", frozenset("XZ"): "Y"}

_LOGICAL_MATS = {
    (0, 0): np.eye(2, dtype=complex),
    (1, 0): np.array([[0, 1], [1, 0]], dtype=complex),
    (0, 1): np.array([[1, 0], [0, -1]], dtype=complex),
    (1, 1): np.array([[0, -1j], [1j, 0]]),
}


# ----------------------------------------------------------------------
# ideal measurement branch trees
# ----------------------------------------------------------------------

_TREE_CACHE: dict[tuple, dict] = {}

# two unrelated code states; equal trees certify data independence
_PROBE_STATES = ((1.0, 0.0), (0.6, 0.8j))


def _branch_walk(gadget: Gadget, alpha, beta, tol=1e-12):
    """All measurement branches of the noiseless gadget on a code state."""
    state = embed_data_state(encode_logical(alpha, beta), gadget.n_qubits)
    branches = [(1.0, (), state)]
    tree: dict[tuple, float] = {}
    for step in gadget.ops:
        if isinstance(step, GateStep):
            for _, _, st in branches:
                apply_gate(st, step.op)
        elif isinstance(step, MeasureStep):
            nxt = []
            for prob, prefix, st in branches:
                a = st.amps.reshape(-1, 2, 1 << step.qubit)
                p0 = float(np.sum(np.abs(a[:, 0, :]) ** 2))
                tree[prefix] = p0
                if p0 > tol:
                    s0 = st.copy()
                    b0 = s0.amps.reshape(-1, 2, 1 << step.qubit)
                    b0[:, 1, :] = 0.0
                    s0.amps /= np.sqrt(p0)
                    nxt.append((prob * p0, prefix + (1,), s0))
                if 1.0 - p0 > tol:
                    a[:, 0, :] = 0.0
                    st.amps /= np.sqrt(1.0 - p0)
                    nxt.append((prob * (1.0 - p0), prefix + (-1,), st))
            branches = nxt
        elif isinstance(step, BranchStep) and step.kind == "verify_retry":
            # the ideal verification never fails; drop dead branches
            branches = [b for b in branches if b[1][-1] == 1]
    return tree


def ideal_outcome_tree(gadget: Gadget) -> dict:
    """prefix of ideal outcomes -> probability the next readout gives +1.

    Built once per gadget by exact branch enumeration; the construction
    asserts the probabilities do not depend on the encoded data state,
    which is what lets the frame engine drop the reference statevector.
    """
    key = (gadget.name, gadget.plaquette, gadget.stab_type)
    tree = _TREE_CACHE.get(key)
    if tree is None:
        tree = _branch_walk(gadget, *_PROBE_STATES[0])
        other = _branch_walk(gadget, *_PROBE_STATES[1])
        if set(tree) != set(other) or any(
                abs(tree[k] - other[k]) > 1e-9 for k in tree):
            raise AssertionError("measurement statistics depend on the data")
        _TREE_CACHE[key] = tree
    return tree


# ----------------------------------------------------------------------
# the executor
# ----------------------------------------------------------------------

class PauliFrameExecutor:
    """Same interface as the statevector executor, symbolic state."""

    def __init__(self, schedule: Schedule, alpha: complex, beta: complex):
        self.n_qubits = schedule.n_qubits
        self.trees = {stem: ideal_outcome_tree(g)
                      for stem, g in schedule.gadgets.items()}
        self.prefix = {stem: () for stem in self.trees}
        self.frame: dict[int, str] = {}

    def gate(self, op):
        sub = {q: self.frame[q] for q in op.qubits if q in self.frame}
        if not sub:
            return
        moved = propagate_pauli(PauliString(1, sub), op)
        for q in op.qubits:
            self.frame.pop(q, None)
        self.frame.update(moved.factors)

    def pauli(self, p: PauliString):
        frame = self.frame
        for q, s in p.factors.items():
            have = frame.get(q)
            if have is None:
                frame[q] = s
            elif have == s:
                del frame[q]
            else:
                frame[q] = _THIRD[frozenset((have, s))]

    def measure(self, qubit: int, u: float, key=None) -> int:
        stem, _name = key
        p0_ideal = self.trees[stem][self.prefix[stem]]
        flip = self.frame.get(qubit) in ("X", "Y")
        p0 = 1.0 - p0_ideal if flip else p0_ideal
        noisy = 1 if u < p0 else -1
        ideal = -noisy if flip else noisy
        self.prefix[stem] += (ideal,)
        return noisy

    def reset(self, qubit: int, u: float):
        self.frame.pop(qubit, None)

    def restart_block(self, stem: str):
        self.prefix[stem] = ()

    def success(self, alpha: complex, beta: complex) -> float:
        """Residual-logical verdict of the receiver's perfect round."""
        data = PauliString(1, {q: s for q, s in self.frame.items() if q < 7})
        syndrome = tuple(1 if data.commutes(s) else -1
                         for s in CODE.stabilizers())
        residual = decode_lookup(syndrome) * data
        a = 0 if residual.commutes(CODE.logical_z) else 1
        b = 0 if residual.commutes(CODE.logical_x) else 1
        v = np.array([alpha, beta], dtype=complex)
        return float(np.abs(np.conj(v) @ _LOGICAL_MATS[(a, b)] @ v) ** 2)
