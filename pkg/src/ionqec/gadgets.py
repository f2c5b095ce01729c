"""Syndrome-extraction gadgets as explicit gate/measure/branch sequences.

Four families measure one plaquette stabilizer each:

* MultiQubitMS: Ramsey sequence on one ancilla wrapping two 5-ion MS gates.
* TwoQubitMS:   four sequential ancilla-data conditional couplings.
* DVS:          verified 4-qubit GHZ ancilla, transversal coupling.
* DVA:          unverified GHZ ancilla, coupling, then a decoding circuit
                whose check outcomes signal dangerous propagated errors.

Data qubits are 0..6; gadget ancillas are appended above them.  Z-type
plaquettes reuse the X-type circuits with basis-change rotations on the
data qubits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .code import PLAQUETTES
from .pauli import PauliString
from .statevec import GateOp, StateVector, apply_pauli, measure_z

HALF_PI = math.pi / 2

GADGET_NAMES = ("MultiQubitMS", "TwoQubitMS", "DVS", "DVA")


@dataclass(frozen=True)
class GateStep:
    op: GateOp
    family: str  # noise/duration family: "sq", "ms2", "ms5"


@dataclass(frozen=True)
class MeasureStep:
    qubit: int
    name: str
    counted: bool = True  # verification readouts overlap reconfigurations


@dataclass(frozen=True)
class BranchStep:
    """Classical control point evaluated from earlier measurement names."""
    kind: str          # "verify_retry" | "check_correction"
    inputs: tuple
    correction: PauliString | None = None


@dataclass(frozen=True)
class Gadget:
    name: str
    plaquette: int
    stab_type: str      # "x" | "z"
    data_qubits: tuple
    ancillas: tuple
    n_qubits: int
    ops: tuple

    def stabilizer(self) -> PauliString:
        letter = self.stab_type.upper()
        return PauliString.from_label(letter * 4, self.data_qubits)


def _sq(kind: str, qubit: int, theta: float) -> GateStep:
    return GateStep(GateOp(kind, (qubit,), theta), "sq")


def _z_wrap_pre(data_qubits):
    # Y_j(pi/2) X_j Y_j(-pi/2) = -Z_j turns the X-type circuit into a
    # Z-plaquette readout; the four sign flips cancel
    return [_sq("LocalY", j, -HALF_PI) for j in data_qubits]


def _z_wrap_post(data_qubits):
    return [_sq("LocalY", j, HALF_PI) for j in data_qubits]


def _wrap_if_z(stab_type, data_qubits, core):
    if stab_type == "z":
        return _z_wrap_pre(data_qubits) + core + _z_wrap_post(data_qubits)
    return core


def multiqubit_ms_gadget(plaquette: int, stab_type: str) -> Gadget:
    """5-ion MS readout: the composed unitary between the Ramsey pulses
    equals exp(i pi/4 Z_a S) up to a global phase, so the ancilla
    measurement reveals the eigenvalue deterministically."""
    data = PLAQUETTES[plaquette]
    anc = 7
    crystal = (anc,) + data
    core = [
        _sq("LocalY", anc, HALF_PI),
        GateStep(GateOp("MS", crystal, HALF_PI, 0.0), "ms5"),
        _sq("AddressedZ", anc, -HALF_PI),
        GateStep(GateOp("MS", crystal, -HALF_PI, 0.0), "ms5"),
        _sq("LocalX", anc, -HALF_PI),
    ]
    ops = _wrap_if_z(stab_type, data, core) + [MeasureStep(anc, "M0")]
    return Gadget("MultiQubitMS", plaquette, stab_type, data, (anc,), 8, tuple(ops))


def two_qubit_ms_gadget(plaquette: int, stab_type: str) -> Gadget:
    """Sequential conditional couplings U_x^(a,j) = X_j(-pi/2) XX_{a,j}(pi/2);
    the ancilla Z-measurement projects the data onto (1 +- S)/2."""
    data = PLAQUETTES[plaquette]
    anc = 7
    core = []
    for j in data:
        core.append(GateStep(GateOp("XX", (anc, j), HALF_PI), "ms2"))
        core.append(_sq("LocalX", j, -HALF_PI))
    ops = _wrap_if_z(stab_type, data, core) + [MeasureStep(anc, "M0")]
    return Gadget("TwoQubitMS", plaquette, stab_type, data, (anc,), 8, tuple(ops))


def _ghz_prep(a1, a2, a3, a4):
    return [
        GateStep(GateOp("XX", (a1, a2), HALF_PI), "ms2"),
        GateStep(GateOp("YY", (a2, a3), HALF_PI), "ms2"),
        GateStep(GateOp("XX", (a3, a4), HALF_PI), "ms2"),
    ]


def _ghz_convert(a2, a3, a4):
    return [
        _sq("AddressedZ", a2, HALF_PI),
        _sq("AddressedZ", a3, math.pi),
        _sq("AddressedZ", a4, -HALF_PI),
    ]


def _coupling(pairs):
    ops = []
    for a, j in pairs:
        ops.append(GateStep(GateOp("XX", (a, j), HALF_PI), "ms2"))
        ops.append(_sq("LocalX", j, -HALF_PI))
    return ops


def dvs_gadget(plaquette: int, stab_type: str) -> Gadget:
    """GHZ ancilla prepared and verified against an extra ancilla before the
    transversal coupling; a failed verification discards the attempt."""
    data = PLAQUETTES[plaquette]
    a0, a1, a2, a3, a4 = 7, 8, 9, 10, 11
    ops = _ghz_prep(a1, a2, a3, a4)
    # verification couplings onto a0
    ops += [
        GateStep(GateOp("XX", (a1, a0), HALF_PI), "ms2"),
        _sq("LocalX", a0, -HALF_PI),
        _sq("AddressedZ", a0, -HALF_PI),
        GateStep(GateOp("YY", (a4, a0), HALF_PI), "ms2"),
        _sq("LocalY", a0, -HALF_PI),
        MeasureStep(a0, "M0", counted=False),
        BranchStep("verify_retry", ("M0",)),
    ]
    ops += _ghz_convert(a2, a3, a4)
    coupling = _coupling(zip((a1, a2, a3, a4), data))
    ops += _wrap_if_z(stab_type, data, coupling)
    ops += [MeasureStep(a, f"M{n}") for n, a in enumerate((a1, a2, a3, a4), 1)]
    return Gadget("DVS", plaquette, stab_type, data, (a0, a1, a2, a3, a4), 12,
                  tuple(ops))


def dva_gadget(plaquette: int, stab_type: str) -> Gadget:
    """Unverified GHZ ancilla; the decoding circuit turns the dangerous
    propagated two-qubit error class into the (M3,M4)=(+1,-1) signature."""
    data = PLAQUETTES[plaquette]
    a1, a2, a3, a4 = 7, 8, 9, 10
    letter = "X" if stab_type == "x" else "Z"
    correction = PauliString.from_label(letter * 2, (data[2], data[3]))
    ops = _ghz_prep(a1, a2, a3, a4) + _ghz_convert(a2, a3, a4)
    coupling = _coupling(zip((a1, a2, a3, a4), data))
    ops += _wrap_if_z(stab_type, data, coupling)
    ops += [
        _sq("AddressedZ", a2, HALF_PI),
        _sq("AddressedZ", a4, HALF_PI),
        GateStep(GateOp("XX", (a1, a4), HALF_PI), "ms2"),
        GateStep(GateOp("YY", (a2, a3), HALF_PI), "ms2"),
    ]
    ops += [MeasureStep(a, f"M{n}") for n, a in enumerate((a1, a2, a3, a4), 1)]
    ops += [BranchStep("check_correction", ("M3", "M4"), correction)]
    return Gadget("DVA", plaquette, stab_type, data, (a1, a2, a3, a4), 11,
                  tuple(ops))


def build_gadget(name: str, plaquette: int, stab_type: str) -> Gadget:
    builder = {
        "MultiQubitMS": multiqubit_ms_gadget,
        "TwoQubitMS": two_qubit_ms_gadget,
        "DVS": dvs_gadget,
        "DVA": dva_gadget,
    }.get(name)
    if builder is None:
        raise ValueError(f"unknown gadget {name!r}")
    if stab_type not in ("x", "z"):
        raise ValueError("stabilizer type must be 'x' or 'z'")
    return builder(plaquette, stab_type)


def outcome_rule(gadget: Gadget, outcomes: dict) -> tuple:
    """(stabilizer value or None, flags) from named +-1 measurement results."""
    flags = set()
    if gadget.name in ("MultiQubitMS", "TwoQubitMS"):
        return outcomes["M0"], frozenset()
    if gadget.name == "DVS":
        if outcomes.get("M0") == -1:
            return None, frozenset({"retry"})
        value = outcomes["M1"] * outcomes["M2"] * outcomes["M3"] * outcomes["M4"]
        return value, frozenset()
    # DVA: Bell parity of (M1,M2); (M3,M4) nominal (-1,+1)
    checks = (outcomes["M3"], outcomes["M4"])
    if checks == (1, -1):
        flags.add("correct")
    elif checks != (-1, 1):
        flags.add("discard")
    return -outcomes["M1"] * outcomes["M2"], frozenset(flags)


def op_counts(gadgets) -> dict:
    """Operation tally across gadgets, keyed by family plus 'meas'.

    Verification readouts are tallied separately ('meas_verify'): their
    duration is absorbed by the crystal reconfigurations running in
    parallel, so resource tables do not list them.
    """
    if isinstance(gadgets, Gadget):
        gadgets = [gadgets]
    out = {"sq": 0, "ms2": 0, "ms5": 0, "meas": 0, "meas_verify": 0}
    for g in gadgets:
        for step in g.ops:
            if isinstance(step, GateStep):
                out[step.family] += 1
            elif isinstance(step, MeasureStep):
                out["meas" if step.counted else "meas_verify"] += 1
    return out


# ----------------------------------------------------------------------
# reference noiseless executor
# ----------------------------------------------------------------------

def embed_data_state(data_state: StateVector, n_total: int) -> StateVector:
    """Append ancillas in |0> above the 7 data qubits."""
    full = StateVector.basis(n_total, 0)
    full.amps[:] = 0.0
    full.amps[: data_state.amps.size] = data_state.amps
    return full


def extract_data_state(full: StateVector, outcomes_bits: int) -> StateVector:
    """Slice out the 7-qubit data register after all ancillas collapsed."""
    block = full.amps[outcomes_bits << 7: (outcomes_bits << 7) + (1 << 7)]
    return StateVector(7, block.copy())


def run_ideal(gadget: Gadget, data_state: StateVector, rng):
    """Noiseless execution; returns (value, flags, data_state, outcomes)."""
    from .statevec import apply_gate

    state = embed_data_state(data_state, gadget.n_qubits)
    outcomes: dict[str, int] = {}
    flags: set[str] = set()
    for step in gadget.ops:
        if isinstance(step, GateStep):
            state = apply_gate(state, step.op)
        elif isinstance(step, MeasureStep):
            v, state = measure_z(state, step.qubit, rng.random())
            outcomes[step.name] = v
        elif isinstance(step, BranchStep):
            if step.kind == "verify_retry" and outcomes[step.inputs[0]] == -1:
                return None, frozenset({"retry"}), None, outcomes
    value, rule_flags = outcome_rule(gadget, outcomes)
    flags |= rule_flags
    bits = 0
    for i, a in enumerate(gadget.ancillas):
        if outcomes.get(_name_of(gadget, a)) == -1:
            bits |= 1 << i
    data_after = extract_data_state(state, bits)
    if "correct" in flags:
        corr = next(s.correction for s in gadget.ops
                    if isinstance(s, BranchStep) and s.kind == "check_correction")
        data_after = apply_pauli(data_after, corr)
    return value, frozenset(flags), data_after, outcomes


def _name_of(gadget: Gadget, ancilla: int) -> str:
    for step in gadget.ops:
        if isinstance(step, MeasureStep) and step.qubit == ancilla:
            return step.name
    raise KeyError(ancilla)


def pretty(gadget: Gadget) -> str:
    """Textual circuit listing."""
    lines = [f"{gadget.name} plaquette={gadget.plaquette + 1} "
             f"type={gadget.stab_type} data={gadget.data_qubits}"]
    for i, step in enumerate(gadget.ops):
        if isinstance(step, GateStep):
            g = step.op
            ang = f"{g.theta / math.pi:+.2f}pi"
            lines.append(f"  {i:3d}  {g.kind:<11s} q={g.qubits} theta={ang} [{step.family}]")
        elif isinstance(step, MeasureStep):
            lines.append(f"  {i:3d}  Measure     q=({step.qubit},) -> {step.name}")
        else:
            lines.append(f"  {i:3d}  Branch      {step.kind} on {step.inputs}")
    return "\n".join(lines)
