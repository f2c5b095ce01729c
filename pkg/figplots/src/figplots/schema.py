"""CSV contract shared with the simulation CLI.

The simulator emits one row per (series, grid point) with the exact
column set below.  This module owns the read side of that contract:
anything that does not match is rejected before plotting starts.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

CSV_COLUMNS = ["protocol", "scenario", "noise_model", "state_mode", "tau_s",
               "cycles", "lambda", "n_traj", "p_b_mean", "ci_low", "ci_high",
               "mean_restarts", "discard_rate"]

_FLOAT_FIELDS = ("tau_s", "lambda", "p_b_mean", "ci_low", "ci_high",
                 "mean_restarts", "discard_rate")
_INT_FIELDS = ("cycles", "n_traj")


class SchemaError(ValueError):
    """Input CSV does not satisfy the simulator's point format."""


@dataclass(frozen=True)
class Point:
    protocol: str
    scenario: str
    noise_model: str
    state_mode: str
    tau_s: float
    cycles: int
    lam: float
    n_traj: int
    p_b_mean: float
    ci_low: float
    ci_high: float
    mean_restarts: float
    discard_rate: float


def read_points(path: str) -> list[Point]:
    """Parse and validate one simulator CSV; raises SchemaError."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_COLUMNS:
            raise SchemaError(
                f"{path}: expected columns {CSV_COLUMNS}, "
                f"got {reader.fieldnames}")
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    points = []
    for i, row in enumerate(rows, start=2):
        try:
            points.append(Point(
                protocol=row["protocol"], scenario=row["scenario"],
                noise_model=row["noise_model"], state_mode=row["state_mode"],
                tau_s=float(row["tau_s"]), cycles=int(row["cycles"]),
                lam=float(row["lambda"]), n_traj=int(row["n_traj"]),
                p_b_mean=float(row["p_b_mean"]), ci_low=float(row["ci_low"]),
                ci_high=float(row["ci_high"]),
                mean_restarts=float(row["mean_restarts"]),
                discard_rate=float(row["discard_rate"])))
        except (TypeError, ValueError) as exc:
            raise SchemaError(f"{path}:{i}: bad value ({exc})") from exc
    return points


def series(points: list[Point], *keys: str) -> dict[tuple, list[Point]]:
    """Group points by the named Point attributes, x-sorted within a group."""
    groups: dict[tuple, list[Point]] = {}
    for p in points:
        groups.setdefault(tuple(getattr(p, k) for k in keys), []).append(p)
    for pts in groups.values():
        pts.sort(key=lambda p: (p.tau_s, p.lam))
    return groups
