"""Command-line front end: run experiments, verify the build, list presets.

Presets bundle the protocol, scenario, noise model, state mode and
trajectory budget of a reproduced result figure; explicit flags override
any preset field.  Output is the stable CSV point format, one row per
(series, grid point), plus an unencoded reference series where relevant.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys

import numpy as np
import yaml

from .engine import StateVectorExecutor, run_cycle
from .faultprop import enumerate_single_faults
from .gadgets import build_gadget
from .harness import (
    ExperimentConfig,
    bare_qubit_reference,
    crossings,
    csv_rows,
    lambda_scan,
    run_experiment,
    write_rows,
)
from .params import load_scenario
from .schedule import PROTOCOL_IDS, build_schedule, cycle_duration

SCENARIOS = ("current", "anticipated")

# overrides used by the sequential 2-qubit MS protocols, which assume the
# better qubit reset on current hardware and the starred value later on
_RESET_2Q = {"current": (("reset_infidelity", 1e-3),),
             "anticipated": (("reset_infidelity", 1e-4),)}


@dataclasses.dataclass(frozen=True)
class Preset:
    description: str
    kind: str                 # "time" | "lambda"
    scenario: str
    noise_model: str
    state_mode: str
    series: tuple             # (protocol, cycles) pairs; cycles ignored for lambda
    n_traj: int
    grid: tuple               # time: (tau_min/T2, tau_max/T2, steps); lambda: (lo, hi, steps)
    engine: str = "statevector"
    overrides: tuple = ()
    include_bare: bool = True


PRESETS = {
    "fig11": Preset(
        "hiding-based cycle, multi-qubit MS, current hardware, IID noise",
        "time", "current", "IID", "uniform-random",
        (("A4", 1), ("A4", 0)), 40_000, (0.05, 2.0, 21)),
    "fig12": Preset(
        "single-species shuttling, multi-qubit MS, anticipated hardware",
        "time", "anticipated", "IID", "uniform-random",
        (("A1", 1), ("A1", 0)), 40_000, (0.05, 2.0, 21)),
    "fig14": Preset(
        "two-species shuttling, multi-qubit MS, anticipated hardware",
        "time", "anticipated", "FiveQubit", "uniform-random",
        (("A2", 1), ("A2", 0)), 40_000, (0.05, 2.0, 21)),
    "fig15": Preset(
        "repeated two-species cycles, pairwise-decomposed multi-qubit noise",
        "time", "anticipated", "TwoQubit", "uniform-random",
        (("A2", 2), ("A2", 1), ("A2", 0)), 40_000, (0.05, 2.0, 21)),
    "fig16": Preset(
        "hiding-based cycle, multi-qubit MS, anticipated hardware",
        "time", "anticipated", "FiveQubit", "uniform-random",
        (("A4", 1), ("A4", 0)), 40_000, (0.05, 2.0, 21)),
    "fig18": Preset(
        "error-scale sweep with no environmental wait: 2-qubit MS schemes",
        "lambda", "anticipated", "FiveQubit", "plus-state",
        (("A3", 1), ("B1", 1), ("B2", 1)), 100_000, (0.0, 4.0, 17),
        engine="pauliframe", overrides=_RESET_2Q["anticipated"]),
    "fig19": Preset(
        "2-qubit MS storage protocols on current hardware",
        "time", "current", "FiveQubit", "plus-state",
        (("A3", 1), ("B1", 1), ("A3", 0)), 1_000_000, (0.05, 2.0, 21),
        engine="pauliframe", overrides=_RESET_2Q["current"]),
    "fig20": Preset(
        "2-qubit MS storage protocols on anticipated hardware",
        "time", "anticipated", "FiveQubit", "plus-state",
        (("A3", 1), ("B1", 1), ("A3", 0)), 1_000_000, (0.05, 2.0, 21),
        engine="pauliframe", overrides=_RESET_2Q["anticipated"]),
    "fig21": Preset(
        "repeated fast non-verified cycles extending the logical lifetime",
        "time", "anticipated", "FiveQubit", "plus-state",
        (("A3", 3), ("A3", 2), ("A3", 1), ("A3", 0)), 1_000_000,
        (0.05, 2.0, 21), engine="pauliframe",
        overrides=_RESET_2Q["anticipated"]),
}


# ----------------------------------------------------------------------
# argument handling
# ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ionqec", description="trapped-ion QEC storage simulations")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment and write a CSV")
    run.add_argument("--preset", choices=sorted(PRESETS))
    run.add_argument("--config", help="YAML file with the same keys as the flags")
    run.add_argument("--out", required=True)
    run.add_argument("--seed", type=int)
    run.add_argument("--workers", type=int,
                     default=int(os.environ.get("IONQEC_WORKERS", "1")))
    run.add_argument("--traj", type=int)
    run.add_argument("--tau-min", type=float)
    run.add_argument("--tau-max", type=float)
    run.add_argument("--tau-steps", type=int)
    run.add_argument("--lambda-min", type=float)
    run.add_argument("--lambda-max", type=float)
    run.add_argument("--lambda-steps", type=int)
    run.add_argument("--cycles", type=int)
    run.add_argument("--protocol", choices=PROTOCOL_IDS)
    run.add_argument("--scenario")
    run.add_argument("--noise-model",
                     choices=("IID", "TwoQubit", "FiveQubit"))
    run.add_argument("--state-mode",
                     choices=("uniform-random", "plus-state"))
    run.add_argument("--engine", choices=("statevector", "pauliframe"))

    sub.add_parser("verify", help="run the identity and fault-tolerance suite")
    sub.add_parser("list", help="show protocols, scenarios and presets")
    return parser


def _load_config_file(path: str) -> dict:
    with open(path) as fh:
        raw = yaml.safe_load(fh)
    if not isinstance(raw, dict):
        raise ValueError("config file must hold a mapping")
    return raw


def _resolve(args) -> dict:
    """Merge defaults <- preset <- config file <- explicit flags."""
    settings: dict = {
        "kind": None, "scenario": "current", "noise_model": "FiveQubit",
        "state_mode": "uniform-random", "series": None, "n_traj": 1000,
        "grid": None, "engine": "statevector", "overrides": (),
        "include_bare": True, "seed": 1234,
        "tau_min": None, "tau_max": None, "tau_steps": None,
        "lambda_min": None, "lambda_max": None, "lambda_steps": None,
    }
    if args.preset:
        p = PRESETS[args.preset]
        settings.update(kind=p.kind, scenario=p.scenario,
                        noise_model=p.noise_model, state_mode=p.state_mode,
                        series=p.series, n_traj=p.n_traj, grid=p.grid,
                        engine=p.engine, overrides=p.overrides,
                        include_bare=p.include_bare)
    if args.config:
        file_keys = _load_config_file(args.config)
        allowed = {"protocol", "scenario", "noise_model", "state_mode",
                   "cycles", "traj", "seed", "tau_min", "tau_max",
                   "tau_steps", "lambda_min", "lambda_max", "lambda_steps",
                   "engine"}
        bad = set(file_keys) - allowed
        if bad:
            raise ValueError(f"unknown config keys: {sorted(bad)}")
        for key, val in file_keys.items():
            if key == "traj":
                settings["n_traj"] = int(val)
            elif key == "protocol":
                settings["series"] = ((str(val), file_keys.get("cycles", 1)),)
            elif key == "cycles":
                pass  # folded into the series above
            else:
                settings[key] = val
    flag_fields = ("scenario", "noise_model", "state_mode", "engine", "seed")
    for key in flag_fields:
        val = getattr(args, key)
        if val is not None:
            settings[key] = val
    if args.traj is not None:
        settings["n_traj"] = args.traj
    if args.protocol is not None:
        settings["series"] = ((args.protocol,
                               args.cycles if args.cycles is not None else 1),)
    for key in ("tau_min", "tau_max", "tau_steps",
                "lambda_min", "lambda_max", "lambda_steps"):
        val = getattr(args, key)
        if val is not None:
            settings[key] = val
    if settings["series"] is None:
        raise ValueError("need --preset, --config or --protocol")
    if settings["kind"] is None:
        settings["kind"] = "lambda" if any(
            settings[k] is not None for k in
            ("lambda_min", "lambda_max", "lambda_steps")) else "time"
    return settings


def _grids(settings, params):
    """Tau or lambda grid after merging preset defaults and flags."""
    if settings["kind"] == "time":
        lo_frac, hi_frac, steps = settings["grid"] or (0.05, 2.0, 11)
        lo = settings["tau_min"] if settings["tau_min"] is not None \
            else lo_frac * params.t2_s
        hi = settings["tau_max"] if settings["tau_max"] is not None \
            else hi_frac * params.t2_s
        n = settings["tau_steps"] or steps
        return tuple(float(t) for t in np.linspace(lo, hi, n))
    lo_d, hi_d, steps = settings["grid"] or (0.0, 4.0, 9)
    lo = settings["lambda_min"] if settings["lambda_min"] is not None else lo_d
    hi = settings["lambda_max"] if settings["lambda_max"] is not None else hi_d
    n = settings["lambda_steps"] or steps
    return tuple(float(v) for v in np.linspace(lo, hi, n))


# ----------------------------------------------------------------------
# run
# ----------------------------------------------------------------------

def _bare_rows(settings, params, taus) -> list:
    rows = []
    for tau in taus:
        p = bare_qubit_reference(tau, params, settings["state_mode"])
        rows.append(["bare", settings["scenario"], settings["noise_model"],
                     settings["state_mode"], repr(float(tau)), 0, repr(0.0),
                     0, repr(p), repr(p), repr(p), repr(0.0), repr(0.0)])
    return rows


def _series_points(rows_by_series):
    return {key: ([float(r[4]) for r in rows], [float(r[8]) for r in rows])
            for key, rows in rows_by_series.items()}


def _print_summary(settings, rows_by_series):
    points = _series_points(rows_by_series)
    for (protocol, cycles), (xs, ys) in points.items():
        print(f"{protocol} cycles={cycles}: {len(xs)} points, "
              f"P_B {min(ys):.4f}..{max(ys):.4f}")
    baselines = {k: v for k, v in points.items() if k[1] == 0 and k[0] != "bare"}
    bare = points.get(("bare", 0))
    for key, (xs, ys) in points.items():
        protocol, cycles = key
        if cycles == 0 or protocol == "bare":
            continue
        base = baselines.get((protocol, 0)) or next(iter(baselines.values()), None)
        if base and base[0] == xs:
            for x in crossings(xs, ys, base[1]):
                print(f"break-even vs no-correction for {protocol} "
                      f"cycles={cycles}: tau = {x:.6g} s")
        if bare and bare[0] == xs:
            for x in crossings(xs, ys, bare[1]):
                print(f"break-even vs bare qubit for {protocol} "
                      f"cycles={cycles}: tau = {x:.6g} s")


def cmd_run(args) -> int:
    settings = _resolve(args)
    params = load_scenario(settings["scenario"])
    grid = _grids(settings, params)
    rows_by_series: dict[tuple, list] = {}
    for protocol, cycles in settings["series"]:
        cfg = ExperimentConfig(
            protocol=protocol, scenario=settings["scenario"],
            taus=grid if settings["kind"] == "time" else (0.0,),
            n_traj=settings["n_traj"], seed=settings["seed"],
            noise_model=settings["noise_model"],
            state_mode=settings["state_mode"], cycles=cycles,
            engine=settings["engine"], overrides=tuple(settings["overrides"]))
        if settings["kind"] == "time":
            result = run_experiment(cfg, workers=args.workers)
        else:
            result = lambda_scan(cfg, grid, workers=args.workers)
        rows_by_series[(protocol, cycles)] = csv_rows(cfg, result)
    all_rows = [r for rows in rows_by_series.values() for r in rows]
    if settings["include_bare"] and settings["kind"] == "time":
        bare = _bare_rows(settings, params, grid)
        rows_by_series[("bare", 0)] = bare
        all_rows.extend(bare)
    write_rows(args.out, all_rows)
    print(f"wrote {len(all_rows)} points to {args.out}")
    _print_summary(settings, rows_by_series)
    return 0


# ----------------------------------------------------------------------
# verify
# ----------------------------------------------------------------------

# design wall-clock budgets per cycle in ms, by (protocol, scenario)
_CYCLE_BUDGET_MS = {
    ("A1", "current"): 6.7, ("A1", "anticipated"): 1.7,
    ("A2", "current"): 6.8, ("A2", "anticipated"): 1.4,
    ("A3", "current"): 23.6, ("A3", "anticipated"): 7.2,
    ("A4", "current"): 6.3, ("A4", "anticipated"): 1.1,
    ("B1", "current"): 71.2, ("B1", "anticipated"): 22.4,
    ("B2", "current"): 71.0, ("B2", "anticipated"): 22.2,
}

# readout gadgets checked for single-fault containment; True = must be FT
_FT_EXPECTATIONS = {"TwoQubitMS": False, "DVS": True, "DVA": True}


def _count_dangerous(gadget) -> int:
    return sum(1 for r in enumerate_single_faults(gadget)
               if r.verdict == "weight2_undetected")


def verification_report(gadget_overrides: dict | None = None) -> list:
    """(check name, passed, detail) for the full identity/FT suite."""
    report = []
    current = load_scenario("current")
    for protocol in PROTOCOL_IDS:
        sched = build_schedule(protocol, current)
        ex = StateVectorExecutor(sched.n_qubits, 0.6, 0.8)
        out = run_cycle(sched, current, ex, np.random.default_rng(0), lam=0.0)
        ok = out.syndrome == (1, 1, 1, 1, 1, 1) and \
            abs(ex.success(0.6, 0.8) - 1.0) < 1e-9
        report.append((f"noiseless cycle identity {protocol}", ok,
                       f"syndrome {out.syndrome}"))
    for name, must_be_ft in _FT_EXPECTATIONS.items():
        gadget = (gadget_overrides or {}).get(name) or build_gadget(name, 0, "x")
        dangerous = _count_dangerous(gadget)
        ok = (dangerous == 0) if must_be_ft else (dangerous > 0)
        report.append((f"single-fault containment {name}", ok,
                       f"{dangerous} undetected weight-2 faults"))
    for (protocol, scenario), budget in _CYCLE_BUDGET_MS.items():
        params = load_scenario(scenario)
        got = cycle_duration(build_schedule(protocol, params), params)
        ok = abs(got - budget) <= 0.15 * budget
        report.append((f"cycle budget {protocol}/{scenario}", ok,
                       f"{got:.2f} ms vs {budget} ms"))
    return report


def cmd_verify() -> int:
    report = verification_report()
    failures = 0
    for name, ok, detail in report:
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
        failures += 0 if ok else 1
    print(f"{len(report) - failures}/{len(report)} checks passed")
    return 0 if failures == 0 else 1


def cmd_list() -> int:
    print("protocols:")
    for protocol in PROTOCOL_IDS:
        print(f"  {protocol}")
    print("scenarios:")
    for scenario in SCENARIOS:
        print(f"  {scenario}")
    print("presets:")
    for name in sorted(PRESETS):
        print(f"  {name}: {PRESETS[name].description}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list":
        return cmd_list()
    if args.command == "verify":
        return cmd_verify()
    try:
        return cmd_run(args)
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
