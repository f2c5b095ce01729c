"""The six QEC protocols as timed schedules over a segmented trap.

A schedule is a flat, immutable list of steps for one full cycle (all six
plaquette stabilizers): gates lifted from the syndrome gadgets, crystal
reconfigurations with their phonon kicks, re-cooling, hiding pulses,
measurements and resets.  Every step carries duration, the ions involved,
the noise channel to sample after it, and an overlap tag marking steps
that run concurrently with neighbouring reconfigurations.

Protocols:

* A1 - shuttling, single species, 5-ion MS mappings, no re-cooling
* A2 - shuttling, two species, 5-ion MS mappings, re-cooled
* A3 - shuttling, two species, sequential 2-ion MS couplings, re-cooled
* A4 - static crystal with spectroscopic hiding, 5-ion MS mappings
* B1 - shuttling, verified-GHZ-ancilla readout (7+5 qubits)
* B2 - shuttling, decoded-GHZ-ancilla readout (7+4 qubits)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .gadgets import BranchStep, Gadget, GateStep, MeasureStep, build_gadget
from .noise import PhononLedger, ledger_update, ms_infidelity, stretched_gate_time
from .params import HardwareParams
from .statevec import GateOp

HALF_PI = math.pi / 2

PROTOCOL_IDS = ("A1", "A2", "A3", "A4", "B1", "B2")

PROTOCOL_GADGETS = {
    "A1": "MultiQubitMS", "A2": "MultiQubitMS", "A3": "TwoQubitMS",
    "A4": "MultiQubitMS", "B1": "DVS", "B2": "DVA",
}

# pulses per spectroscopic decoupling (hide or unhide) operation
HIDE_PULSES = 9

_UNTIMED_KINDS = ("Wait", "Branch")


@dataclass(frozen=True)
class ScheduleStep:
    kind: str                 # Split/Shuttle/Merge/Rotate/Gate/Hide/Unhide/
                              # Measure/Reset/Recool/Wait/Branch
    ions: tuple
    duration_us: float
    zone: str = ""
    op: GateOp | None = None
    family: str = ""          # duration/noise family of a Gate step
    measure_name: str = ""
    counted: bool = True
    branch: BranchStep | None = None
    channel: str = ""         # depolarizing | pair | bitflip | hiding
    active: tuple = ()        # qubits the channel acts on
    ledger_kind: str = ""     # phonon update applied with this step
    overlap: str = ""         # "" | "always" | "optimized"
    group: str = ""           # e.g. "2x", "1z:prep"

    def __post_init__(self):
        if self.kind not in _UNTIMED_KINDS and self.duration_us <= 0:
            raise ValueError(f"{self.kind} step must have positive duration")


@dataclass(frozen=True)
class Schedule:
    protocol: str
    gadget_name: str
    n_qubits: int
    ancillas: tuple
    initial_crystals: tuple
    steps: tuple
    gadgets: dict = field(default_factory=dict)  # group stem -> Gadget


class _Builder:
    def __init__(self, protocol, params: HardwareParams, n_qubits, ancillas,
                 initial_crystals):
        self.protocol = protocol
        self.params = params
        self.n_qubits = n_qubits
        self.ancillas = tuple(ancillas)
        self.initial_crystals = tuple(tuple(c) for c in initial_crystals)
        self.steps: list[ScheduleStep] = []
        self.gadgets: dict[str, Gadget] = {}

    def add(self, **kw):
        self.steps.append(ScheduleStep(**kw))

    def gate(self, op: GateOp, family: str, group: str, channel="", active=()):
        self.add(kind="Gate", ions=tuple(op.qubits),
                 duration_us=self.params.gates[family].duration_us,
                 op=op, family=family, channel=channel, active=tuple(active),
                 group=group, zone="M")

    def composite(self, split_ions, shuttle_ions, merge_ions, group,
                  optimized=False):
        """One split + shuttle + merge reconfiguration."""
        sm = self.params.shuttling["split_merge"]
        sh = self.params.shuttling["shuttle"]
        tag = "optimized" if optimized else ""
        self.add(kind="Split", ions=tuple(split_ions), duration_us=sm.duration_us,
                 ledger_kind="split", overlap=tag, group=group)
        self.add(kind="Shuttle", ions=tuple(shuttle_ions),
                 duration_us=sh.duration_us, ledger_kind="shuttle",
                 overlap=tag, group=group)
        self.add(kind="Merge", ions=tuple(merge_ions), duration_us=sm.duration_us,
                 ledger_kind="merge", overlap=tag, group=group)

    def rotate(self, ions, group):
        # crystal rotations always run concurrently in the optimized cycle
        self.add(kind="Rotate", ions=tuple(ions),
                 duration_us=self.params.shuttling["rotation"].duration_us,
                 ledger_kind="rotate", overlap="optimized", group=group)

    def recool(self, ions, group):
        self.add(kind="Recool", ions=tuple(ions),
                 duration_us=self.params.gates["recool"].duration_us,
                 ledger_kind="recool", group=group)

    def measure(self, qubit, name, group, counted=True, overlap=""):
        self.add(kind="Measure", ions=(qubit,),
                 duration_us=self.params.gates["measurement"].duration_us,
                 measure_name=name, counted=counted, channel="bitflip",
                 active=(qubit,), ledger_kind="measurement_recoil",
                 overlap=overlap, group=group, zone="M")

    def reset(self, ions, group):
        self.add(kind="Reset", ions=tuple(ions),
                 duration_us=self.params.gates["reset"].duration_us, group=group)

    def hide(self, ions, group, undo=False):
        self.add(kind="Unhide" if undo else "Hide", ions=tuple(ions),
                 duration_us=HIDE_PULSES * self.params.gates["sq"].duration_us,
                 channel="hiding", active=tuple(ions), group=group)

    def branch(self, step: BranchStep, group):
        self.add(kind="Branch", ions=(), duration_us=0.0, branch=step,
                 group=group)

    def done(self) -> Schedule:
        return Schedule(self.protocol, PROTOCOL_GADGETS[self.protocol],
                        self.n_qubits, self.ancillas, self.initial_crystals,
                        tuple(self.steps), self.gadgets)


def _pla_order():
    return [(m, t) for m in range(3) for t in "xz"]


def _half_order():
    return [(m, "x") for m in range(3)] + [(m, "z") for m in range(3)]


def _emit_mapping(b: _Builder, gadget: Gadget, group: str, family: str,
                  crystal, before_measure=None):
    """Gadget ops of a 5-ion MS mapping; one depolarizing draw per mapping."""
    ms_seen = 0
    for step in gadget.ops:
        if isinstance(step, GateStep):
            fam = family if step.family == "ms5" else step.family
            channel, active = "", ()
            if step.family == "ms5":
                ms_seen += 1
                if ms_seen == 2:
                    channel, active = "depolarizing", crystal
            b.gate(step.op, fam, group, channel=channel, active=active)
        elif isinstance(step, MeasureStep):
            if before_measure is not None:
                before_measure()
            b.measure(step.qubit, step.name, group)
            b.reset((step.qubit,), group)


# ----------------------------------------------------------------------
# protocol builders
# ----------------------------------------------------------------------

def _build_a1(params):
    anc = 7
    b = _Builder("A1", params, 8, (anc,), ((0, 1, 2, 3), (4, 5, 6), (anc,)))
    for m, t in _pla_order():
        stem = f"{m + 1}{t}"
        if (m, t) == (2, "x"):
            # mirror reordering exposes the third plaquette
            b.rotate((0, 1, 2, 3), stem)
            b.rotate((4, 5, 6), stem)
        g = build_gadget("MultiQubitMS", m, t)
        b.gadgets[stem] = g
        crystal = (anc,) + tuple(g.data_qubits)
        others = tuple(q for q in range(7) if q not in g.data_qubits)
        # the light ancilla travels; the quartet stays in storage
        b.composite((anc,), (anc,), crystal, stem)
        _emit_mapping(
            b, g, stem, "ms5", crystal,
            # isolate the ancilla so readout photons cannot hit the data
            before_measure=lambda c=crystal, s=stem: b.composite(c, (anc,), (anc,), s))
        b.composite(others, others, others, stem)  # storage upkeep
    b.composite(tuple(range(7)), tuple(range(7)), (0, 1, 2, 3), "close")
    b.composite((4, 5, 6), (4, 5, 6), (4, 5, 6), "close")
    return b.done()


def _build_a2(params):
    anc = 7
    b = _Builder("A2", params, 8, (anc,), ((0, 1, 2, 3), (4, 5, 6), (anc,)))
    for m, t in _pla_order():
        stem = f"{m + 1}{t}"
        if (m, t) == (2, "x"):
            b.rotate((0, 1, 2, 3), stem)
            b.rotate((4, 5, 6), stem)
        g = build_gadget("MultiQubitMS", m, t)
        b.gadgets[stem] = g
        crystal = (anc,) + tuple(g.data_qubits)
        b.composite(g.data_qubits, g.data_qubits, crystal, stem)
        b.recool(crystal, stem)
        # two species: the ancilla is measured inside the crystal
        _emit_mapping(b, g, stem, "dual_ms5", crystal)
    return b.done()


def _build_a3(params):
    anc = 7
    b = _Builder("A3", params, 8, (anc,), ((0, 1, 2, 3), (4, 5, 6), (anc,)))
    for m, t in _half_order():
        stem = f"{m + 1}{t}"
        g = build_gadget("TwoQubitMS", m, t)
        b.gadgets[stem] = g
        for j in g.data_qubits:
            b.composite((j,), (j,), (anc, j), stem)
            b.recool((anc, j), stem)
            if t == "z":
                b.gate(GateOp("LocalY", (j,), -HALF_PI), "sq", stem)
            b.gate(GateOp("XX", (anc, j), HALF_PI), "ms2", stem,
                   channel="pair", active=(anc, j))
            b.gate(GateOp("LocalX", (j,), -HALF_PI), "sq", stem)
            if t == "z":
                b.gate(GateOp("LocalY", (j,), HALF_PI), "sq", stem)
            b.composite((j,), (j,), (j,), stem)
        b.composite((anc,), (anc,), (anc,), stem)  # isolate for readout
        b.measure(anc, "M0", stem)
        b.reset((anc,), stem)
        for _ in range(3):
            b.rotate((0, 1, 2, 3), stem)
            b.rotate((4, 5, 6), stem)
    return b.done()


def _build_a4(params):
    anc = 7
    b = _Builder("A4", params, 8, (anc,), (tuple(range(8)),))
    for m, t in _pla_order():
        stem = f"{m + 1}{t}"
        g = build_gadget("MultiQubitMS", m, t)
        b.gadgets[stem] = g
        crystal = (anc,) + tuple(g.data_qubits)
        others = tuple(q for q in range(7) if q not in g.data_qubits)
        b.hide(others, stem)
        b.recool(tuple(range(8)), stem)
        _emit_mapping(b, g, stem, "dual_ms5", crystal)
        b.hide(others, stem, undo=True)
    return b.done()


def _ghz_readout_common(b: _Builder, gadget: Gadget, main: str,
                        coupling_composites, coupling_rotations,
                        optimized_per_coupling, ops):
    """Coupling/decode/measure portion shared by the GHZ-ancilla schemes."""
    pre_measure_done = False
    coupled = False
    for step in ops:
        if isinstance(step, GateStep):
            if step.family == "ms2":
                pair = step.op.qubits
                if set(pair) & set(gadget.data_qubits):  # data coupling gate
                    coupled = True
                    for k in range(coupling_composites):
                        b.composite(pair, pair, pair, main,
                                    optimized=k < optimized_per_coupling)
                    for _ in range(coupling_rotations):
                        b.rotate((0, 1, 2, 3), main)
                elif coupled:
                    # re-pair the ancillas for each decoding gate
                    for _ in range(2):
                        b.composite(pair, pair, pair, main)
                b.recool(pair, main)
                b.gate(step.op, "ms2", main, channel="pair", active=pair)
            else:
                b.gate(step.op, step.family, main)
        elif isinstance(step, MeasureStep):
            if not pre_measure_done:
                pre_measure_done = True
                for k in range(4):
                    b.composite(gadget.ancillas, gadget.ancillas,
                                gadget.ancillas, main, optimized=k < 1)
                if b.protocol == "B1":
                    for _ in range(3):
                        b.rotate((4, 5, 6), main)
            b.measure(step.qubit, step.name, main)
        elif isinstance(step, BranchStep):
            b.branch(step, main)


def _build_b1(params):
    ancs = (7, 8, 9, 10, 11)
    b = _Builder("B1", params, 12, ancs,
                 ((0, 1, 2, 3), (4, 5, 6), ancs))
    for m, t in _half_order():
        stem = f"{m + 1}{t}"
        g = build_gadget("DVS", m, t)
        b.gadgets[stem] = g
        prep, main = f"{stem}:prep", f"{stem}:main"
        # --- preparation and verification (replayed on a failed check) ---
        for k in range(4):
            b.composite(ancs, ancs, ancs, prep, optimized=k < 2)
        for a in ancs:
            b.reset((a,), prep)
        it = iter(g.ops)
        for step in it:
            if isinstance(step, GateStep):
                if step.family == "ms2":
                    b.recool(step.op.qubits, prep)
                    b.gate(step.op, "ms2", prep, channel="pair",
                           active=step.op.qubits)
                else:
                    b.gate(step.op, step.family, prep)
            elif isinstance(step, MeasureStep):
                # readout of the check ancilla overlaps reconfiguration
                b.measure(step.qubit, step.name, prep, counted=False,
                          overlap="always")
            elif isinstance(step, BranchStep):
                for k in range(3):
                    b.composite(ancs, ancs, ancs, prep, optimized=k < 2)
                b.rotate(ancs, prep)
                b.rotate(ancs, prep)
                b.branch(step, prep)
                break
        _ghz_readout_common(b, g, main, coupling_composites=5,
                            coupling_rotations=5, optimized_per_coupling=3,
                            ops=list(it))
    for k in range(4):
        b.composite(tuple(range(7)), tuple(range(7)), tuple(range(7)),
                    "close", optimized=k < 2)
    return b.done()


def _build_b2(params):
    ancs = (7, 8, 9, 10)
    b = _Builder("B2", params, 11, ancs,
                 ((0, 1, 2, 3), (4, 5, 6), ancs))
    for m, t in _half_order():
        stem = f"{m + 1}{t}"
        g = build_gadget("DVA", m, t)
        b.gadgets[stem] = g
        for k in range(3):
            b.composite(ancs, ancs, ancs, stem, optimized=k < 2)
        for a in ancs:
            b.reset((a,), stem)
        _ghz_readout_common(b, g, stem, coupling_composites=5,
                            coupling_rotations=6, optimized_per_coupling=3,
                            ops=list(g.ops))
    for k in range(4):
        b.composite(tuple(range(7)), tuple(range(7)), tuple(range(7)),
                    "close", optimized=k < 2)
    return b.done()


_BUILDERS = {"A1": _build_a1, "A2": _build_a2, "A3": _build_a3,
             "A4": _build_a4, "B1": _build_b1, "B2": _build_b2}


def build_schedule(protocol_id: str, params: HardwareParams) -> Schedule:
    """One full QEC cycle (all six stabilizers) for the named protocol."""
    builder = _BUILDERS.get(protocol_id)
    if builder is None:
        raise ValueError(f"unknown protocol {protocol_id!r}")
    return builder(params)


# ----------------------------------------------------------------------
# accounting
# ----------------------------------------------------------------------

def op_category_counts(schedule: Schedule) -> dict:
    """Operation tallies in resource-table categories.

    Hiding operations expand into their pulse count under "sq"; a
    split+shuttle+merge composite counts once under "reconfig".
    """
    out = {"sq": 0, "ms2": 0, "ms5": 0, "meas": 0, "meas_verify": 0,
           "recool": 0, "reconfig": 0, "rotation": 0, "reset": 0}
    for s in schedule.steps:
        if s.kind == "Gate":
            key = s.family.removeprefix("dual_")
            out[key] += 1
        elif s.kind == "Measure":
            out["meas" if s.counted else "meas_verify"] += 1
        elif s.kind in ("Hide", "Unhide"):
            out["sq"] += HIDE_PULSES
        elif s.kind == "Recool":
            out["recool"] += 1
        elif s.kind == "Split":
            out["reconfig"] += 1
        elif s.kind == "Rotate":
            out["rotation"] += 1
        elif s.kind == "Reset":
            out["reset"] += 1
    return out


def cycle_duration(schedule: Schedule, params: HardwareParams,
                   optimized: bool = False) -> float:
    """Wall-clock time of one cycle in ms.

    Steps tagged "always" run concurrently and never count; steps tagged
    "optimized" count only when the optimization is disabled.
    """
    total = 0.0
    for s in schedule.steps:
        if s.overlap == "always":
            continue
        if optimized and s.overlap == "optimized":
            continue
        total += s.duration_us
    return total / 1000.0


def prep_block_duration_us(schedule: Schedule, stem: str) -> float:
    """Replay cost of one extra ancilla-preparation attempt."""
    group = f"{stem}:prep"
    steps = [s for s in schedule.steps if s.group == group]
    if not steps:
        raise ValueError(f"no preparation block for {stem!r}")
    return sum(s.duration_us for s in steps if s.overlap != "always")


@dataclass(frozen=True)
class MappingRecord:
    group: str
    n_bar: float
    epsilon: float


def mapping_infidelities(schedule: Schedule, params: HardwareParams) -> list:
    """Replay the phonon ledger and evaluate each 5-ion mapping error."""
    ledger = PhononLedger.cold(range(schedule.n_qubits), params.recool_floor)
    records = []
    for s in schedule.steps:
        if s.ledger_kind:
            ledger_update(ledger, s.ledger_kind, params, s.ions)
        if s.channel == "depolarizing":
            t = stretched_gate_time(params, ledger, len(s.active), s.family,
                                    s.active)
            eps = ms_infidelity(params, ledger, len(s.active), t, s.family,
                                s.active)
            records.append(MappingRecord(s.group, ledger.mean_axial(s.active),
                                         eps))
    return records


def crystal_trace(schedule: Schedule) -> list:
    """Replay split/merge bookkeeping; returns the final ion partition.

    Raises if a step references an ion outside the register, so the trace
    doubles as a conservation check.
    """
    crystals = [set(c) for c in schedule.initial_crystals]
    all_ions = {q for c in crystals for q in c}

    def gather(ions):
        ions = set(ions)
        if not ions <= all_ions:
            raise ValueError(f"unknown ions {sorted(ions - all_ions)}")
        for c in crystals:
            c -= ions
        crystals[:] = [c for c in crystals if c]
        crystals.append(ions)

    for s in schedule.steps:
        if s.kind in ("Split", "Merge"):
            gather(s.ions)
    return sorted(tuple(sorted(c)) for c in crystals)


def timeline(schedule: Schedule) -> str:
    """One line per step: start time, kind, ions, zone (stable columns)."""
    lines = ["t_start_us kind ions zone"]
    t = 0.0
    for s in schedule.steps:
        ions = ",".join(str(q) for q in s.ions) or "-"
        lines.append(f"{t:.1f} {s.kind} {ions} {s.zone or '-'}")
        if s.overlap != "always":
            t += s.duration_us
    return "\n".join(lines)
