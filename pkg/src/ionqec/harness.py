"""Monte Carlo storage experiments: sender, correction cycles, receiver.

A trajectory stores a random (or fixed) logical state for a time tau,
optionally interleaving error-correction cycles, then scores the
receiver's discrimination probability.  Experiments aggregate many
trajectories per point, each seeded independently from the master seed
so results are identical for any worker split.
"""

from __future__ import annotations

import concurrent.futures
import csv
import dataclasses
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .engine import (
    NoiseClock,
    StateVectorExecutor,
    environmental_wait,
    flush_idle,
    igor_correct,
    run_cycle,
)
from .noise import PhononLedger, dephasing_probability
from .params import HardwareParams, load_scenario
from .pauliframe import PauliFrameExecutor
from .schedule import Schedule, build_schedule, cycle_duration

CSV_COLUMNS = ["protocol", "scenario", "noise_model", "state_mode", "tau_s",
               "cycles", "lambda", "n_traj", "p_b_mean", "ci_low", "ci_high",
               "mean_restarts", "discard_rate"]

DATA_QUBITS = tuple(range(7))


# ----------------------------------------------------------------------
# logical state sampling
# ----------------------------------------------------------------------

def state_from_angles(phi1: float, phi2: float, phi3: float):
    """Amplitudes of U|0> for the three-angle single-qubit unitary
    cos(phi1) (cos(phi2) I + i sin(phi2) Z) +
    i sin(phi1) (cos(phi3) Y + sin(phi3) X)."""
    alpha = math.cos(phi1) * complex(math.cos(phi2), math.sin(phi2))
    beta = 1j * math.sin(phi1) * complex(math.sin(phi3), math.cos(phi3))
    return alpha, beta


def sample_random_state(rng):
    """Haar-like random logical state: three uniform angles on [0, 2pi)."""
    phi = rng.random(3) * 2.0 * math.pi
    return state_from_angles(phi[0], phi[1], phi[2])


_PLUS = (2.0 ** -0.5, 2.0 ** -0.5)


def _sample_state(mode: str, rng):
    if mode == "uniform-random":
        return sample_random_state(rng)
    if mode == "plus-state":
        return _PLUS
    raise ValueError(f"unknown state mode {mode!r}")


# ----------------------------------------------------------------------
# scalar helpers
# ----------------------------------------------------------------------

def integrity(p: float) -> float:
    """Map a discrimination probability onto [-1, 1]; 0.5 scores zero."""
    return 2.0 * p - 1.0


def wilson_interval(p: float, n: int, z: float = 1.96):
    """Wilson score interval for a binomial proportion."""
    if n <= 0:
        raise ValueError("n must be positive")
    zz = z * z / n
    center = (p + zz / 2.0) / (1.0 + zz)
    half = z * math.sqrt(p * (1.0 - p) / n + zz / (4.0 * n)) / (1.0 + zz)
    return max(0.0, center - half), min(1.0, center + half)


def crossings(xs, ya, yb):
    """x positions where the two sampled curves intersect (linear pieces)."""
    out = []
    d = [a - b for a, b in zip(ya, yb)]
    for i in range(len(d) - 1):
        if d[i] == 0.0:
            out.append(float(xs[i]))
        elif d[i] * d[i + 1] < 0.0:
            frac = d[i] / (d[i] - d[i + 1])
            out.append(float(xs[i]) + frac * (float(xs[i + 1]) - float(xs[i])))
    if d and d[-1] == 0.0:
        out.append(float(xs[-1]))
    return out


# ----------------------------------------------------------------------
# unencoded reference qubit
# ----------------------------------------------------------------------

_Z_MOMENT: dict[str, float] = {"plus-state": 0.0}


def _z_squared_moment(mode: str) -> float:
    m = _Z_MOMENT.get(mode)
    if m is None:
        # second moment of <Z> under the state sampler, fixed-seed estimate
        phi = np.random.default_rng(20240517).random(1_000_000) * 2.0 * math.pi
        m = float(np.mean(np.cos(2.0 * phi) ** 2))
        _Z_MOMENT[mode] = m
    return m


def bare_qubit_reference(tau_s: float, params: HardwareParams,
                         mode: str = "uniform-random") -> float:
    """Discrimination probability of a single stored physical qubit.

    Dephasing for a time tau leaves the state intact with 1-p and applies
    Z with p, so the average success is (1-p) + p E[<Z>^2] over the state
    ensemble.
    """
    p = dephasing_probability(tau_s, params.t2_s)
    return (1.0 - p) + p * _z_squared_moment(mode)


# ----------------------------------------------------------------------
# experiment configuration
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentConfig:
    protocol: str
    scenario: str
    taus: tuple                      # storage times in seconds, one point each
    n_traj: int
    seed: int
    noise_model: str = "FiveQubit"
    state_mode: str = "uniform-random"
    cycles: int = 1                  # correction cycles per trajectory
    lam: float = 1.0                 # error-channel scale factor
    engine: str = "statevector"      # or "pauliframe"
    max_restarts: int = 4
    discard_value: float = 0.5       # score credited to discarded runs
    overrides: tuple = ()            # ((param_name, value), ...) pairs


@dataclass(frozen=True)
class TrajectoryResult:
    success: float | None
    restarts: int
    discarded: bool


@dataclass(frozen=True)
class ExperimentPoint:
    tau_s: float
    cycles: int
    lam: float
    n_traj: int
    p_b_mean: float
    ci_low: float
    ci_high: float
    mean_restarts: float
    discard_rate: float


@dataclass(frozen=True)
class ExperimentResult:
    points: tuple


@lru_cache(maxsize=None)
def _prepared(protocol: str, scenario: str, overrides: tuple):
    params = load_scenario(scenario)
    if overrides:
        kw = {}
        for key, val in overrides:
            # dict-valued parameters travel as tuples of pairs to stay hashable
            if isinstance(val, tuple) and val and isinstance(val[0], tuple):
                val = dict(val)
            kw[key] = val
        params = params.with_overrides(**kw)
    schedule = build_schedule(protocol, params)
    return schedule, params


def _make_executor(config: ExperimentConfig, schedule: Schedule, alpha, beta):
    if config.engine == "pauliframe":
        return PauliFrameExecutor(schedule, alpha, beta)
    if config.engine == "statevector":
        n = 7 if config.cycles == 0 else schedule.n_qubits
        return StateVectorExecutor(n, alpha, beta)
    raise ValueError(f"unknown engine {config.engine!r}")


def _is_fault_tolerant(schedule: Schedule) -> bool:
    # both GHZ-ancilla readouts repeat the syndrome; the plain mappings do not
    return any(g.name in ("DVS", "DVA") for g in schedule.gadgets.values())


# ----------------------------------------------------------------------
# one trajectory
# ----------------------------------------------------------------------

def run_trajectory(config: ExperimentConfig, tau_s: float,
                   rng) -> TrajectoryResult:
    """Store a sampled state for tau_s with the configured cycle count.

    The sender encodes perfectly; the storage time is split into equal
    idle segments around the correction cycles.  Fault-tolerant protocols
    read the syndrome twice and break ties with a third pass.
    A trajectory whose cycle exhausts the retry budget is discarded.
    """
    schedule, params = _prepared(config.protocol, config.scenario,
                                 config.overrides)
    alpha, beta = _sample_state(config.state_mode, rng)
    ex = _make_executor(config, schedule, alpha, beta)
    n = getattr(ex, "n_qubits", schedule.n_qubits)
    clock = NoiseClock(params, n)
    ledger = PhononLedger.cold(range(n), params.recool_floor)
    eps_cache: dict = {}
    ft = _is_fault_tolerant(schedule)
    wait = tau_s / (config.cycles + 1)
    restarts = 0

    environmental_wait(clock, DATA_QUBITS, wait)
    for _ in range(config.cycles):
        passes_needed = 2 if ft else 1
        outs = []
        for _ in range(passes_needed):
            out = run_cycle(schedule, params, ex, rng,
                            noise_model=config.noise_model, lam=config.lam,
                            ledger=ledger, clock=clock,
                            max_restarts=config.max_restarts,
                            eps_cache=eps_cache)
            restarts += out.restarts
            if out.discarded:
                return TrajectoryResult(None, restarts, True)
            outs.append(out)
        if ft and outs[0].syndrome != outs[1].syndrome:
            out = run_cycle(schedule, params, ex, rng,
                            noise_model=config.noise_model, lam=config.lam,
                            ledger=ledger, clock=clock,
                            max_restarts=config.max_restarts,
                            eps_cache=eps_cache)
            restarts += out.restarts
            if out.discarded:
                return TrajectoryResult(None, restarts, True)
        igor_correct(ex, out.syndrome)
        environmental_wait(clock, DATA_QUBITS, wait)

    flush_idle(clock, DATA_QUBITS, rng, ex, config.lam)
    return TrajectoryResult(ex.success(alpha, beta), restarts, False)


# ----------------------------------------------------------------------
# aggregation
# ----------------------------------------------------------------------

def _trajectory_rng(seed: int, point_index: int, traj_index: int):
    return np.random.default_rng((seed, point_index, traj_index))


def _run_chunk(config: ExperimentConfig, point_index: int, tau_s: float,
               j_start: int, j_stop: int):
    rows = []
    for j in range(j_start, j_stop):
        got = run_trajectory(config, tau_s, _trajectory_rng(config.seed,
                                                            point_index, j))
        value = config.discard_value if got.discarded else got.success
        rows.append((value, got.restarts, got.discarded))
    return rows


def _aggregate(config: ExperimentConfig, tau_s: float, lam: float, rows):
    # fsum keeps the mean order-independent; clamp the residual float
    # excess so noiseless points cannot report probabilities above 1
    p = min(1.0, max(0.0, math.fsum(r[0] for r in rows) / len(rows)))
    lo, hi = wilson_interval(p, len(rows))
    cycles_per_traj = max(1, config.cycles)
    return ExperimentPoint(
        tau_s=tau_s, cycles=config.cycles, lam=lam, n_traj=len(rows),
        p_b_mean=p, ci_low=lo, ci_high=hi,
        mean_restarts=sum(r[1] for r in rows) / (len(rows) * cycles_per_traj),
        discard_rate=sum(1 for r in rows if r[2]) / len(rows))


def _validate(config: ExperimentConfig, check_tau: bool = True):
    if config.n_traj < 1:
        raise ValueError("need at least one trajectory")
    if not config.taus:
        raise ValueError("need at least one storage time")
    if check_tau and config.cycles > 0:
        schedule, params = _prepared(config.protocol, config.scenario,
                                     config.overrides)
        floor = cycle_duration(schedule, params,
                               optimized=True) * 1e-3 * config.cycles
        for tau in config.taus:
            if tau < floor:
                raise ValueError(
                    f"storage time {tau} s cannot contain {config.cycles} "
                    f"cycle(s) of {floor / config.cycles} s")


def _point_rows(config: ExperimentConfig, point_index: int, tau_s: float,
                workers: int):
    if workers <= 1 or config.n_traj < 2 * workers:
        return _run_chunk(config, point_index, tau_s, 0, config.n_traj)
    bounds = np.linspace(0, config.n_traj, workers + 1).astype(int)
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_run_chunk, config, point_index, tau_s,
                               int(a), int(b))
                   for a, b in zip(bounds, bounds[1:])]
        rows = []
        for f in futures:
            rows.extend(f.result())
    return rows


def run_experiment(config: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    """One point per storage time; per-trajectory seeding keeps the result
    independent of the worker count."""
    _validate(config)
    points = []
    for ti, tau in enumerate(config.taus):
        rows = _point_rows(config, ti, float(tau), workers)
        points.append(_aggregate(config, float(tau), config.lam, rows))
    return ExperimentResult(tuple(points))


def lambda_scan(config: ExperimentConfig, lambdas,
                workers: int = 1) -> ExperimentResult:
    """Sweep the channel scale factor over a single zero-wait cycle.

    No environmental storage surrounds the cycle; the recorded tau_s is
    the wall-clock duration of the cycle itself.
    """
    _validate(config, check_tau=False)
    schedule, params = _prepared(config.protocol, config.scenario,
                                 config.overrides)
    dur_s = cycle_duration(schedule, params, optimized=True) * 1e-3
    points = []
    for li, lam in enumerate(lambdas):
        cfg = dataclasses.replace(config, lam=float(lam), cycles=1)
        rows = _point_rows(cfg, li, 0.0, workers)
        point = _aggregate(cfg, dur_s, float(lam), rows)
        points.append(point)
    return ExperimentResult(tuple(points))


# ----------------------------------------------------------------------
# CSV interface
# ----------------------------------------------------------------------

def _fmt(v) -> str:
    return repr(float(v)) if isinstance(v, float) else str(v)


def csv_rows(config: ExperimentConfig, result: ExperimentResult) -> list:
    """One formatted row per point, in the external column order."""
    return [[config.protocol, config.scenario, config.noise_model,
             config.state_mode, _fmt(p.tau_s), p.cycles, _fmt(p.lam),
             p.n_traj, _fmt(p.p_b_mean), _fmt(p.ci_low), _fmt(p.ci_high),
             _fmt(p.mean_restarts), _fmt(p.discard_rate)]
            for p in result.points]


def write_rows(path, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_COLUMNS)
        w.writerows(rows)


def write_csv(path, config: ExperimentConfig, result: ExperimentResult):
    """Write one row per point using the stable external column set."""
    write_rows(path, csv_rows(config, result))


def read_csv(path):
    """Rows of the external CSV as dicts; schema is validated."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_COLUMNS:
            raise ValueError(f"unexpected columns: {reader.fieldnames}")
        return list(reader)
