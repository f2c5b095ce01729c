"""Stochastic error channels and the microscopic MS-gate infidelity model.

All channels are sampled as Pauli insertions on pure-state trajectories.
Probabilities derive from hardware parameters; the MS infidelity depends on
the crystal's motional state, which a per-trajectory PhononLedger tracks
through the reconfiguration history.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

from .pauli import PauliString
from .params import HardwareParams, _epsilon_parts, stretched_time_s

log = logging.getLogger(__name__)

NOISE_MODELS = ("IID", "TwoQubit", "FiveQubit")

_XYZ = ("X", "Y", "Z")


# ----------------------------------------------------------------------
# phonon bookkeeping
# ----------------------------------------------------------------------

@dataclass
class PhononLedger:
    axial: dict[int, float] = field(default_factory=dict)
    radial: dict[int, float] = field(default_factory=dict)

    @staticmethod
    def cold(ions, n_bar: float = 0.1) -> "PhononLedger":
        return PhononLedger({i: n_bar for i in ions}, {i: n_bar for i in ions})

    def mean_axial(self, ions) -> float:
        ions = list(ions)
        return sum(self.axial.get(i, 0.0) for i in ions) / len(ions)

    def copy(self) -> "PhononLedger":
        return PhononLedger(dict(self.axial), dict(self.radial))


def ledger_update(ledger: PhononLedger, kind: str, params: HardwareParams,
                  ions=()) -> PhononLedger:
    """Apply the phonon cost of a reconfiguration to the involved ions.

    Kicks are independent, so mean energies add.  A merge first thermalizes:
    the total energy of the merged crystal is redistributed equally, then the
    merge kick is added.  Re-cooling pins the ions at the re-cool floor.
    """
    ions = list(ions)
    if kind == "recool":
        for i in ions:
            ledger.axial[i] = params.recool_floor
            ledger.radial[i] = params.recool_floor
        return ledger
    if kind == "measurement_recoil":
        for i in ions:
            ledger.axial[i] = ledger.axial.get(i, 0.0) + params.measurement_recoil
        return ledger
    spec = {
        "shuttle": params.shuttling["shuttle"],
        "split": params.shuttling["split_merge"],
        "merge": params.shuttling["split_merge"],
        "rotate": params.shuttling["rotation"],
    }[kind]
    if kind == "merge" and ions:
        mean_ax = sum(ledger.axial.get(i, 0.0) for i in ions) / len(ions)
        mean_rad = sum(ledger.radial.get(i, 0.0) for i in ions) / len(ions)
        for i in ions:
            ledger.axial[i] = mean_ax
            ledger.radial[i] = mean_rad
    for i in ions:
        ledger.axial[i] = ledger.axial.get(i, 0.0) + spec.axial
        ledger.radial[i] = ledger.radial.get(i, 0.0) + spec.radial
    return ledger


# ----------------------------------------------------------------------
# channel sampling
# ----------------------------------------------------------------------

def dephasing_probability(idle_time_s: float, t2_s: float) -> float:
    # exact exponential form, valid for idle times comparable to T2
    return 0.5 * (1.0 - math.exp(-idle_time_s / t2_s))


def sample_dephasing(qubits, idle_time_s: float, params: HardwareParams, rng) -> list[int]:
    """Independent Z insertions on idle qubits; returns flipped qubit indices."""
    if idle_time_s < 0:
        raise ValueError("idle time must be nonnegative")
    p = dephasing_probability(idle_time_s, params.t2_s)
    return [q for q in qubits if rng.random() < p]


def _pattern_iid(active, p, rng) -> PauliString:
    out = PauliString.identity()
    for q in active:
        if rng.random() < p:
            out = out * PauliString.from_label(_XYZ[rng.integers(3)], [q])
    return out


def pair_patterns(q1: int, q2: int) -> list[PauliString]:
    """The 15 non-identity Pauli patterns on a qubit pair."""
    pats = []
    for a in range(4):
        for b in range(4):
            if a == b == 0:
                continue
            f = {}
            if a:
                f[q1] = _XYZ[a - 1]
            if b:
                f[q2] = _XYZ[b - 1]
            pats.append(PauliString(1, f))
    return pats


def two_qubit_patterns(active) -> list[PauliString]:
    """Channel patterns for the 5-ion one-and-two-qubit model: all 15
    single-qubit and all 90 two-qubit Paulis on the active set."""
    active = list(active)
    pats = [PauliString.from_label(s, [q]) for q in active for s in _XYZ]
    for i in range(len(active)):
        for j in range(i + 1, len(active)):
            for a in _XYZ:
                for b in _XYZ:
                    pats.append(PauliString(1, {active[i]: a, active[j]: b}))
    return pats


def five_qubit_pattern(active, index: int) -> PauliString:
    """index in [1, 1023] -> base-4 digit pattern over the 5 active qubits."""
    f = {}
    for q in active:
        d = index & 3
        index >>= 2
        if d:
            f[q] = _XYZ[d - 1]
    return PauliString(1, f)


# pattern lists are reused across many draws; build each active set once
_TWO_QUBIT_CACHE: dict[tuple, list] = {}
_PAIR_CACHE: dict[tuple, list] = {}


def sample_depolarizing(active_qubits, p_ms: float, choice: str, rng) -> PauliString:
    """One draw of the selected depolarizing channel; identity if no error."""
    active = list(active_qubits)
    if choice == "IID":
        if len(active) not in (2, 5):
            raise ValueError("IID model defined for 2 or 5 active qubits here")
        return _pattern_iid(active, p_ms, rng)
    if choice == "TwoQubit":
        if len(active) != 5:
            raise ValueError("TwoQubit model needs 5 active qubits")
        if rng.random() >= p_ms:
            return PauliString.identity()
        key = tuple(active)
        if key not in _TWO_QUBIT_CACHE:
            _TWO_QUBIT_CACHE[key] = two_qubit_patterns(active)
        return _TWO_QUBIT_CACHE[key][rng.integers(105)]
    if choice == "FiveQubit":
        if len(active) != 5:
            raise ValueError("FiveQubit model needs 5 active qubits")
        if rng.random() >= p_ms:
            return PauliString.identity()
        return five_qubit_pattern(active, int(rng.integers(1, 1024)))
    raise ValueError(f"unknown noise model {choice!r}")


def sample_pair_depolarizing(q1: int, q2: int, p: float, rng) -> PauliString:
    """Standard two-qubit depolarizing draw after a 2-ion MS gate."""
    if rng.random() >= p:
        return PauliString.identity()
    key = (q1, q2)
    if key not in _PAIR_CACHE:
        _PAIR_CACHE[key] = pair_patterns(q1, q2)
    return _PAIR_CACHE[key][rng.integers(15)]


def p_from_fidelity(fidelity: float, choice: str) -> float:
    """Channel probability reproducing a given MS-gate fidelity."""
    eps = 1.0 - fidelity
    if choice == "IID":
        return eps / 5.0
    if choice == "TwoQubit":
        return 105.0 * eps / 95.0
    if choice == "FiveQubit":
        return 1023.0 * eps / 1008.0
    if choice == "Pair":
        # 3 of the 15 pair patterns stabilize the 2-ion GHZ-type state,
        # giving F = 1 - 12 p / 15 exactly.
        return 15.0 * eps / 12.0
    raise ValueError(f"unknown noise model {choice!r}")


def sample_bitflip(ancillas, p_b: float, rng) -> list[int]:
    return [q for q in ancillas if rng.random() < p_b]


def sample_hiding(qubits, params: HardwareParams, rng) -> PauliString:
    """Depolarizing kick from one hide or unhide pulse group (p_h = 9 eps_1)."""
    return _pattern_iid(list(qubits), params.p_hiding(), rng)


# ----------------------------------------------------------------------
# microscopic MS infidelity
# ----------------------------------------------------------------------

def stretched_gate_time(params: HardwareParams, ledger: PhononLedger,
                        n_ions: int, family: str, ions=None) -> float:
    """Thermally stretched gate duration in seconds."""
    n_bar = ledger.mean_axial(ions) if ions else params.recool_floor
    t0 = params.gates[family].duration_us * 1e-6
    return stretched_time_s(t0, n_bar, n_ions, params.eta)


def ms_infidelity(params: HardwareParams, ledger: PhononLedger, n_ions: int,
                  gate_time_s: float, family: str, ions=None) -> float:
    """Total MS infidelity eps_m + eps_d + eps_In, clamped to [0, 1]."""
    if n_ions < 2:
        raise ValueError("MS gate needs at least 2 ions")
    if gate_time_s <= 0:
        raise ValueError("gate time must be positive")
    n_bar = ledger.mean_axial(ions) if ions else params.recool_floor
    e_m, e_d, e_in_unit = _epsilon_parts(params, n_bar, n_ions, gate_time_s)
    e_in = params.gamma_in.get(family, 0.0) * e_in_unit
    total = e_m + e_d + e_in
    if total > 1.0:
        log.warning("MS infidelity clamped to 1 (family=%s, n_bar=%.2f)", family, n_bar)
        return 1.0
    return max(0.0, total)
