"""Symbolic Clifford propagation of Pauli faults through readout gadgets.

Every gate used by the gadgets is a product of exp(-i theta/2 G) factors
with G a Pauli string and theta a multiple of pi/2, so conjugation maps
Paulis to signed Paulis.  Exhaustive single-fault enumeration classifies
each gadget as fault tolerant or not.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .code import CODE
from .gadgets import BranchStep, Gadget, GateStep, MeasureStep
from .pauli import PauliString
from .statevec import GateOp

_QUARTER = math.pi / 2


def _axis_letter(phi: float) -> tuple[str, int]:
    """Pauli letter and sign for sigma_phi = cos(phi) X + sin(phi) Y."""
    k = round(phi / _QUARTER)
    if abs(phi - k * _QUARTER) > 1e-9:
        raise ValueError("rotation axis is not a Pauli axis")
    return [("X", 1), ("Y", 1), ("X", -1), ("Y", -1)][k % 4]


def _primitives(gate: GateOp):
    """(G, theta) factors with U = prod exp(-i theta/2 G) up to phase."""
    kind, th = gate.kind, gate.theta
    if kind == "LocalX":
        return [(PauliString.from_label("X", gate.qubits), th)]
    if kind == "LocalY":
        return [(PauliString.from_label("Y", gate.qubits), th)]
    if kind in ("LocalZ", "AddressedZ"):
        return [(PauliString.from_label("Z", gate.qubits), th)]
    if kind == "GlobalRot":
        letter, sign = _axis_letter(gate.phi)
        return [(PauliString.from_label(letter, (q,)), sign * th) for q in gate.qubits]
    if kind in ("XX", "YY"):
        return [(PauliString.from_label(kind, gate.qubits), th)]
    if kind == "MS":
        letter, sign = _axis_letter(gate.phi)
        # exp(-i theta/4 S^2) = phase * prod_{i<j} exp(-i theta/2 s_i s_j)
        return [(PauliString.from_label(letter * 2, (i, j)), th)
                for i, j in itertools.combinations(gate.qubits, 2)]
    raise ValueError(f"unknown gate kind {kind!r}")


def propagate_pauli(p: PauliString, gate: GateOp) -> PauliString:
    """Conjugate p by the gate unitary: returns gate . p . gate^dagger."""
    for g, th in _primitives(gate):
        if p.commutes(g):
            continue
        k = round(th / _QUARTER)
        if abs(th - k * _QUARTER) > 1e-9:
            raise ValueError("non-Clifford rotation angle")
        k %= 4
        if k == 0:
            continue
        if k == 2:
            p = PauliString(-p.phase, p.factors)
        else:
            q = g * p
            scale = -1j if k == 1 else 1j
            p = PauliString(scale * q.phase, q.factors)
    return p


@dataclass(frozen=True)
class FaultReport:
    boundary: int            # fault inserted before this op index
    pauli: PauliString       # inserted fault
    flags: frozenset
    residual: PauliString    # data-layer Pauli modulo stabilizers
    value_flipped: bool
    verdict: str             # benign | detected | weight2_undetected


_GROUP_CACHE: list = []


def stabilizer_group() -> list:
    """All 64 products of the six stabilizer generators."""
    if not _GROUP_CACHE:
        elems = [PauliString.identity()]
        for gen in CODE.stabilizers():
            elems += [e * gen for e in elems]
        _GROUP_CACHE.extend(elems)
    return _GROUP_CACHE


def reduce_modulo_stabilizers(p: PauliString) -> PauliString:
    """Minimum-weight representative of p times the stabilizer group."""
    best = p.unsigned()
    for s in stabilizer_group():
        cand = (p * s).unsigned()
        if len(cand.factors) < len(best.factors):
            best = cand
    return best


def _type_subgroup(letter: str) -> list:
    gens = CODE.sx if letter == "X" else CODE.sz
    elems = [PauliString.identity()]
    for gen in gens:
        elems += [e * gen for e in elems]
    return elems


_X_SUBGROUP = _type_subgroup("X")
_Z_SUBGROUP = _type_subgroup("Z")


def css_reduced_parts(p: PauliString) -> tuple[PauliString, PauliString]:
    """X- and Z-components reduced modulo the same-type stabilizers.

    The decoder treats both components independently, so a residual is
    dangerous only when one component keeps weight >= 2; a mixed X/Z pair
    on distinct qubits is corrected exactly.
    """
    xpart = PauliString(1, {q: "X" for q, s in p.factors.items() if s in "XY"})
    zpart = PauliString(1, {q: "Z" for q, s in p.factors.items() if s in "ZY"})
    for s in _X_SUBGROUP:
        cand = (xpart * s).unsigned()
        if len(cand.factors) < len(xpart.factors):
            xpart = cand
    for s in _Z_SUBGROUP:
        cand = (zpart * s).unsigned()
        if len(cand.factors) < len(zpart.factors):
            zpart = cand
    return xpart, zpart


def _restrict_data(p: PauliString) -> PauliString:
    return PauliString(1, {q: s for q, s in p.factors.items() if q < 7})


def propagate_fault(gadget: Gadget, boundary: int, pauli: PauliString) -> FaultReport:
    """Insert a Pauli before op index `boundary` and follow it to the end."""
    p = pauli
    flips: dict[str, bool] = {}
    flags: set[str] = set()
    for step in gadget.ops[boundary:]:
        if isinstance(step, GateStep):
            p = propagate_pauli(p, step.op)
        elif isinstance(step, MeasureStep):
            if p.on(step.qubit) in ("X", "Y"):
                flips[step.name] = True
            if step.qubit in p.factors:  # measured ancilla is discarded/reset
                f = dict(p.factors)
                del f[step.qubit]
                p = PauliString(p.phase, f)
        elif step.kind == "verify_retry":
            if flips.get(step.inputs[0]):
                residual = _restrict_data(p)
                return FaultReport(boundary, pauli, frozenset({"retry"}),
                                   reduce_modulo_stabilizers(residual), False,
                                   "detected")
        else:  # check_correction
            f3, f4 = (flips.get(n, False) for n in step.inputs)
            if f3 and f4:
                flags.add("correct")
                p = p * step.correction
            elif f3 != f4:
                flags.add("discard")
    value_inputs = {
        "MultiQubitMS": ("M0",), "TwoQubitMS": ("M0",),
        "DVS": ("M1", "M2", "M3", "M4"), "DVA": ("M1", "M2"),
    }[gadget.name]
    value_flipped = sum(flips.get(n, False) for n in value_inputs) % 2 == 1
    residual = reduce_modulo_stabilizers(_restrict_data(p))
    xpart, zpart = css_reduced_parts(_restrict_data(p))
    if "discard" in flags:
        verdict = "detected"
    elif max(len(xpart.factors), len(zpart.factors)) >= 2:
        verdict = "weight2_undetected"
    else:
        verdict = "benign"
    return FaultReport(boundary, pauli, frozenset(flags), residual,
                       value_flipped, verdict)


def enumerate_single_faults(gadget: Gadget) -> list[FaultReport]:
    """All single-qubit faults at every step boundary, plus all 15 two-qubit
    Pauli faults after each 2-ion MS gate."""
    reports = []
    for boundary in range(len(gadget.ops) + 1):
        for q in range(gadget.n_qubits):
            for letter in "XYZ":
                reports.append(propagate_fault(
                    gadget, boundary, PauliString.from_label(letter, (q,))))
        prev = gadget.ops[boundary - 1] if boundary else None
        if isinstance(prev, GateStep) and prev.op.kind in ("XX", "YY"):
            q1, q2 = prev.op.qubits
            for a, b in itertools.product("IXYZ", repeat=2):
                if (a, b) == ("I", "I") or "I" in (a, b):
                    continue  # weight-1 already inserted above
                fault = PauliString(1, {q1: a, q2: b})
                reports.append(propagate_fault(gadget, boundary, fault))
    return reports


def fault_table(gadget: Gadget) -> str:
    """Human-readable summary of the single-fault enumeration."""
    reports = enumerate_single_faults(gadget)
    tally: dict[str, int] = {}
    for r in reports:
        tally[r.verdict] = tally.get(r.verdict, 0) + 1
    lines = [f"{gadget.name} plaquette={gadget.plaquette + 1} type={gadget.stab_type}",
             "  " + ", ".join(f"{k}: {v}" for k, v in sorted(tally.items()))]
    for r in reports:
        if r.verdict == "weight2_undetected":
            lines.append(f"  boundary {r.boundary:3d}  fault {r.pauli}  "
                         f"residual {r.residual}")
    return "\n".join(lines)


def is_fault_tolerant(gadget: Gadget) -> bool:
    return all(r.verdict != "weight2_undetected"
               for r in enumerate_single_faults(gadget))
