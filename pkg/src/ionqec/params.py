"""Hardware parameter sets for named scenarios.

Every experimental number used by the simulations lives in a scenario file
(durations, infidelities, coherence time, trap constants, shuttling phonon
metrics, calibrated noise rates).  Two files ship with the package:
"current" and "anticipated".
"""

from __future__ import annotations

import copy
import importlib.resources
from dataclasses import dataclass, field

import numpy as np
import yaml

# gate families with their own intensity-noise calibration
GATE_FAMILIES = ("sq", "ms2", "ms5", "dual_ms2", "dual_ms3", "dual_ms5")


@dataclass(frozen=True)
class GateSpec:
    duration_us: float
    infidelity: float | None  # None: row not reported for this scenario


@dataclass(frozen=True)
class ReconfigSpec:
    duration_us: float
    axial: float   # mean phonons added per involved ion
    radial: float


@dataclass
class HardwareParams:
    scenario: str
    t2_s: float
    recool_floor: float
    omega_z: float                  # rad/s, axial CoM
    omega_radial: float             # rad/s
    eta: float                      # Lamb-Dicke, axial
    delta_minus_omega_z: float      # rad/s, sideband detuning offset
    gates: dict[str, GateSpec]      # keys: sq, ms2, ms5, dual_ms2, dual_ms3,
                                    # dual_ms5, measurement, recool, reset
    shuttling: dict[str, ReconfigSpec]  # keys: shuttle, split_merge, rotation
    gamma_in: dict[str, float]      # per MS family, 1/s
    gamma_d: float                  # 1/s, = 1/T2
    xi_c: float | None = None       # dephasing correlation length, unused
    measurement_recoil: float = 0.0  # axial phonons per measurement

    def __post_init__(self):
        if self.t2_s <= 0:
            raise ValueError("T2 must be positive")
        for k, g in self.gates.items():
            if g.duration_us <= 0:
                raise ValueError(f"duration of {k} must be positive")
            if g.infidelity is not None and not (0 <= g.infidelity <= 1):
                raise ValueError(f"infidelity of {k} out of [0,1]")

    # convenience accessors -------------------------------------------------
    def gate(self, name: str) -> GateSpec:
        return self.gates[name]

    def p_bitflip(self) -> float:
        # readout + reset errors both land on the measured ancilla bit
        return self.gates["measurement"].infidelity + self.gates["reset"].infidelity

    def p_hiding(self) -> float:
        return 9.0 * self.gates["sq"].infidelity

    def with_overrides(self, **kw) -> "HardwareParams":
        """Copy with replaced gate infidelities, e.g. reset_infidelity=1e-3."""
        p = copy.deepcopy(self)
        for key, val in kw.items():
            if key.endswith("_infidelity"):
                gname = key[: -len("_infidelity")]
                p.gates[gname] = GateSpec(p.gates[gname].duration_us, val)
            elif key.endswith("_duration_us"):
                gname = key[: -len("_duration_us")]
                p.gates[gname] = GateSpec(val, p.gates[gname].infidelity)
            elif hasattr(p, key):
                setattr(p, key, val)
            else:
                raise KeyError(key)
        p.__post_init__()  # re-validate mutated fields
        return p


def _load_yaml(name_or_path: str) -> dict:
    if name_or_path.endswith((".yaml", ".yml")):
        with open(name_or_path) as fh:
            return yaml.safe_load(fh)
    ref = importlib.resources.files("ionqec") / "scenarios" / f"{name_or_path}.yaml"
    return yaml.safe_load(ref.read_text())


def load_scenario(name_or_path: str) -> HardwareParams:
    """Load a named scenario ("current"/"anticipated") or a YAML path."""
    raw = _load_yaml(name_or_path)
    gates = {k: GateSpec(v["duration_us"], v.get("infidelity")) for k, v in raw["gates"].items()}
    shuttling = {k: ReconfigSpec(v["duration_us"], v["axial"], v["radial"])
                 for k, v in raw["shuttling"].items()}
    trap = raw["trap"]
    return HardwareParams(
        scenario=raw["name"],
        t2_s=float(raw["t2_s"]),
        recool_floor=float(raw["recool_floor"]),
        omega_z=float(trap["omega_z"]),
        omega_radial=float(trap["omega_radial"]),
        eta=float(trap["eta"]),
        delta_minus_omega_z=float(trap["delta_minus_omega_z"]),
        gates=gates,
        shuttling=shuttling,
        gamma_in={k: float(v) for k, v in raw["calibration"]["gamma_in"].items()},
        gamma_d=1.0 / float(raw["t2_s"]),
        xi_c=raw["calibration"].get("xi_c"),
    )


# ----------------------------------------------------------------------
# calibration of the intensity-fluctuation rates
# ----------------------------------------------------------------------

_FAMILY_N = {"ms2": 2, "ms5": 5, "dual_ms2": 2, "dual_ms3": 3, "dual_ms5": 5}


def _epsilon_parts(params: HardwareParams, n_bar: float, n_ions: int, gate_time_s: float):
    """(thermal, dephasing, intensity-per-unit-gamma) infidelity components."""
    wz = params.omega_z
    eta = params.eta
    n = float(n_ions)
    e_spectator = (np.pi * n * params.delta_minus_omega_z /
                   (2.0 * wz * wz * gate_time_s)) * 0.8 * (n_bar + 1.0)
    e_dw = (np.pi ** 2 * n * (n - 1.0) * eta ** 4 / (8.0 * n * n)) * \
        (1.2 * n_bar ** 2 + 1.4 * n_bar)
    e_m = e_spectator + e_dw
    e_d = 2.0 * gate_time_s * n * n / params.t2_s
    # intensity term divided by Gamma_In
    e_in_unit = gate_time_s * eta ** 2 * ((n_bar + 0.5) + (n - 1.0) / 4.0)
    return e_m, e_d, e_in_unit


def stretched_time_s(t0_s: float, n_bar: float, n_ions: int, eta: float) -> float:
    return t0_s * (1.0 + eta ** 2 * (2.0 * n_bar + 1.0) / n_ions)


def calibrate_gamma_in(params: HardwareParams) -> dict[str, float]:
    """Solve eps_m + eps_d + Gamma_In*unit = Table-row infidelity at the
    re-cool floor for each MS gate family.

    Families whose row is blank fall back: dual_ms5 borrows the dual_ms3
    solution.  A family whose row is smaller than the irreducible
    eps_m + eps_d gets Gamma_In = 0 (rate cannot be negative).
    """
    out: dict[str, float] = {}
    n_bar = params.recool_floor
    for fam, n_ions in _FAMILY_N.items():
        g = params.gates[fam]
        if g.infidelity is None:
            continue
        t = stretched_time_s(g.duration_us * 1e-6, n_bar, n_ions, params.eta)
        e_m, e_d, unit = _epsilon_parts(params, n_bar, n_ions, t)
        out[fam] = max(0.0, (g.infidelity - e_m - e_d) / unit)
    if "dual_ms5" not in out and "dual_ms3" in out:
        out["dual_ms5"] = out["dual_ms3"]
    return out


def ca40_lamb_dicke(omega_z: float, wavelength_m: float = 729e-9) -> float:
    """Axial Lamb-Dicke parameter for a Ca-40 ion."""
    hbar = 1.054571817e-34
    m = 39.9626 * 1.66053906660e-27
    k = 2.0 * np.pi / wavelength_m
    return k * np.sqrt(hbar / (2.0 * m * omega_z))
