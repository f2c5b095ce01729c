"""Noisy execution of protocol schedules on per-trajectory state.

The walker in run_cycle consumes one RNG stream in a fixed order (idle
dephasing, gate channels, measurement collapse, readout/reset flips), so
two executors driven with the same seed see identical noise events.  The
statevector executor here is the production backend; the symbolic frame
executor lives in pauliframe and doubles as a cross-validation oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

from .code import bob_discriminate, decode_lookup, encode_logical
from .gadgets import embed_data_state, extract_data_state, outcome_rule
from .noise import (
    PhononLedger,
    _pattern_iid,
    dephasing_probability,
    ledger_update,
    ms_infidelity,
    p_from_fidelity,
    sample_depolarizing,
    sample_pair_depolarizing,
    stretched_gate_time,
)
from .params import HardwareParams
from .pauli import PauliString
from .schedule import Schedule
from .statevec import apply_gate, apply_pauli, measure_z

STEM_INDEX = {"1x": 0, "2x": 1, "3x": 2, "1z": 3, "2z": 4, "3z": 5}

_GATE, _MEASURE, _RESET, _HIDE, _BRANCH, _PLAIN = range(6)

_KIND_CODE = {"Gate": _GATE, "Measure": _MEASURE, "Reset": _RESET,
              "Hide": _HIDE, "Unhide": _HIDE, "Branch": _BRANCH}


@dataclass(frozen=True)
class CycleOutcome:
    syndrome: tuple | None      # (S1x..S3x, S1z..S3z) or None when discarded
    values: dict                # stem -> stabilizer value
    outcomes: dict              # stem -> {measurement name -> +-1}
    restarts: int               # failed ancilla verifications
    discarded: bool


class NoiseClock:
    """Per-qubit idle-time ledger with lazy dephasing flushes.

    Idle time accrues against a global clock; a qubit settles its backlog
    as a single Z draw right before its next operation.  The exponential
    dephasing probability composes exactly over concatenated intervals,
    so the lazy draw is distributionally identical to per-step sampling.
    """

    def __init__(self, params: HardwareParams, n_qubits: int):
        self.t2 = params.t2_s
        self.now = 0.0
        self.mark = [0.0] * n_qubits
        self.busy = [0.0] * n_qubits

    def occupy(self, qubits, dur_s: float):
        for q in qubits:
            self.busy[q] += dur_s


def environmental_wait(clock: NoiseClock, qubits, t_s: float):
    """Storage segment: every qubit idles for t_s."""
    if t_s < 0:
        raise ValueError("wait must be nonnegative")
    clock.now += t_s


def flush_idle(clock: NoiseClock, qubits, rng, executor, lam: float = 1.0):
    for q in qubits:
        idle = clock.now - clock.mark[q] - clock.busy[q]
        clock.mark[q] = clock.now
        clock.busy[q] = 0.0
        if idle <= 0.0:
            continue
        p = min(1.0, dephasing_probability(idle, clock.t2) * lam)
        if rng.random() < p:
            executor.pauli(PauliString.from_label("Z", (q,)))


class StateVectorExecutor:
    """Dense pure-state backend; exclusively owned by one trajectory."""

    def __init__(self, n_qubits: int, alpha: complex, beta: complex):
        self.n_qubits = n_qubits
        self.state = embed_data_state(encode_logical(alpha, beta), n_qubits)

    def gate(self, op):
        self.state = apply_gate(self.state, op)

    def pauli(self, p: PauliString):
        if p.factors or p.phase != 1:
            self.state = apply_pauli(self.state, p)

    def measure(self, qubit: int, u: float, key=None) -> int:
        v, self.state = measure_z(self.state, qubit, u)
        return v

    def reset(self, qubit: int, u: float):
        v, self.state = measure_z(self.state, qubit, u)
        if v == -1:
            self.state = apply_pauli(
                self.state, PauliString.from_label("X", (qubit,)))

    def restart_block(self, stem: str):
        pass

    def success(self, alpha: complex, beta: complex) -> float:
        """Receiver's perfect round: collapse ancillas, decode the data."""
        state = self.state
        bits = 0
        for i, q in enumerate(range(7, self.n_qubits)):
            v, state = measure_z(state, q, 0.5)  # already a basis state
            if v == -1:
                bits |= 1 << i
        return bob_discriminate(extract_data_state(state, bits), alpha, beta)


# ----------------------------------------------------------------------
# schedule compilation
# ----------------------------------------------------------------------

class _Step:
    __slots__ = ("code", "ions", "dur_s", "timed", "op", "family", "stem",
                 "name", "branch", "channel", "active", "ledger_kind",
                 "group")

    def __init__(self, s, timed):
        self.code = _KIND_CODE.get(s.kind, _PLAIN)
        self.ions = s.ions
        self.dur_s = s.duration_us * 1e-6
        # steps tagged as overlapping run concurrently with neighbouring
        # reconfigurations, so they add no wall-clock time of their own;
        # idle qubits dephase during every step of the remaining timeline
        self.timed = timed
        self.op = s.op
        self.family = s.family
        self.stem = s.group.split(":")[0]
        self.name = s.measure_name
        self.branch = s.branch
        self.channel = s.channel
        self.active = s.active
        self.ledger_kind = s.ledger_kind
        self.group = s.group


# keyed by id(); schedules are kept alive so ids cannot be recycled
_COMPILED: dict[int, tuple] = {}


def _compiled(schedule: Schedule):
    entry = _COMPILED.get(id(schedule))
    if entry is None:
        steps = [_Step(s, s.overlap == "") for s in schedule.steps]
        prep_start = {}
        for i, s in enumerate(steps):
            prep_start.setdefault(s.group, i)
        entry = (schedule, steps, prep_start)
        _COMPILED[id(schedule)] = entry
    return entry[1], entry[2]


def _channel_p(params, ledger, family, active, model, cache) -> float:
    key = (family, model, tuple(ledger.axial.get(q, 0.0) for q in active))
    p = cache.get(key)
    if p is None:
        n = len(active)
        t = stretched_gate_time(params, ledger, n, family, active)
        eps = ms_infidelity(params, ledger, n, t, family, active)
        p = p_from_fidelity(1.0 - eps, model)
        cache[key] = p
    return p


# ----------------------------------------------------------------------
# one full QEC cycle
# ----------------------------------------------------------------------

def run_cycle(schedule: Schedule, params: HardwareParams, executor, rng, *,
              noise_model: str = "FiveQubit", lam: float = 1.0,
              ledger: PhononLedger | None = None,
              clock: NoiseClock | None = None,
              max_restarts: int = 4,
              eps_cache: dict | None = None) -> CycleOutcome:
    """Execute one schedule pass, sampling every annotated channel.

    All channel probabilities scale linearly with lam (clamped to [0,1]);
    lam=0 walks the identical step/RNG sequence without inserting errors.
    """
    if ledger is None:
        ledger = PhononLedger.cold(range(schedule.n_qubits), params.recool_floor)
    if clock is None:
        clock = NoiseClock(params, schedule.n_qubits)
    if eps_cache is None:
        eps_cache = {}
    steps, prep_start = _compiled(schedule)
    p_meas = min(1.0, params.gates["measurement"].infidelity * lam)
    p_reset = min(1.0, params.gates["reset"].infidelity * lam)
    p_hide = min(1.0, params.p_hiding() * lam)
    outcomes: dict[str, dict] = {stem: {} for stem in schedule.gadgets}
    attempts: dict[str, int] = {}
    restarts = 0
    for stem in schedule.gadgets:  # fresh readout history for this pass
        executor.restart_block(stem)

    i = 0
    n_steps = len(steps)
    while i < n_steps:
        st = steps[i]
        if st.timed:
            clock.now += st.dur_s
        if st.ledger_kind:
            ledger_update(ledger, st.ledger_kind, params, st.ions)
        code = st.code
        if code == _GATE:
            qs = st.op.qubits
            if st.timed:
                clock.occupy(qs, st.dur_s)
            flush_idle(clock, qs, rng, executor, lam)
            executor.gate(st.op)
            if st.channel == "pair":
                p = min(1.0, lam * _channel_p(params, ledger, st.family,
                                              st.active, "Pair", eps_cache))
                pat = sample_pair_depolarizing(st.active[0], st.active[1], p, rng)
                if pat.factors:
                    executor.pauli(pat)
            elif st.channel == "depolarizing":
                p = min(1.0, lam * _channel_p(params, ledger, st.family,
                                              st.active, noise_model, eps_cache))
                pat = sample_depolarizing(st.active, p, noise_model, rng)
                if pat.factors:
                    executor.pauli(pat)
        elif code == _MEASURE:
            q = st.ions[0]
            if st.timed:
                clock.occupy(st.ions, st.dur_s)
            flush_idle(clock, st.ions, rng, executor, lam)
            o = executor.measure(q, rng.random(), key=(st.stem, st.name))
            if rng.random() < p_meas:
                o = -o
            outcomes[st.stem][st.name] = o
        elif code == _RESET:
            q = st.ions[0]
            flush_idle(clock, st.ions, rng, executor, lam)
            executor.reset(q, rng.random())
            if rng.random() < p_reset:
                executor.pauli(PauliString.from_label("X", (q,)))
        elif code == _HIDE:
            if st.timed:
                clock.occupy(st.ions, st.dur_s)
            flush_idle(clock, st.ions, rng, executor, lam)
            pat = _pattern_iid(st.ions, p_hide, rng)
            if pat.factors:
                executor.pauli(pat)
        elif code == _BRANCH:
            b = st.branch
            if b.kind == "verify_retry":
                if outcomes[st.stem].get("M0") == -1:
                    restarts += 1
                    attempts[st.stem] = attempts.get(st.stem, 0) + 1
                    if attempts[st.stem] > max_restarts:
                        return CycleOutcome(None, {}, outcomes, restarts, True)
                    executor.restart_block(st.stem)
                    i = prep_start[st.group]
                    continue
            else:  # check_correction
                got = outcomes[st.stem]
                if (got.get("M3"), got.get("M4")) == (1, -1):
                    executor.pauli(b.correction)
        i += 1

    values = {}
    syndrome = [0] * 6
    for stem, gadget in schedule.gadgets.items():
        value, _flags = outcome_rule(gadget, outcomes[stem])
        values[stem] = value
        syndrome[STEM_INDEX[stem]] = value
    return CycleOutcome(tuple(syndrome), values, outcomes, restarts, False)


def igor_correct(executor, syndrome) -> PauliString:
    """Zero-duration decode-and-correct frame update after a cycle."""
    corr = decode_lookup(syndrome)
    executor.pauli(corr)
    return corr
