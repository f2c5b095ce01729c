"""Render storage-experiment curves from simulator CSVs.

Each figure id maps to one layout: success probability against storage
time or against the error-scale factor, with shaded confidence bands,
a grey unencoded-qubit reference where present, and annotated series
crossings.  Output is deterministic for identical input: fixed styling,
a fixed SVG hash salt, and no embedded timestamps.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .schema import Point, SchemaError, read_points, series  # noqa: E402

matplotlib.rcParams["svg.hashsalt"] = "figplots"

# fixed palette: unencoded reference grey, no-correction red, corrected blues
GREY = "#888888"
RED = "#c0392b"
BLUES = ["#1f77b4", "#3b9bd4", "#67b7e8", "#9bd1f2"]

FIGURE_IDS = ("fig14", "fig18", "fig21")


@dataclass(frozen=True)
class PlotSpec:
    csv_paths: tuple
    figure_id: str
    x_range: tuple | None = None
    y_range: tuple | None = None
    group_keys: tuple = ("protocol", "cycles")

    def __post_init__(self):
        if self.figure_id not in FIGURE_IDS:
            raise ValueError(f"unknown figure id {self.figure_id!r}")
        if not self.csv_paths:
            raise SchemaError("no input CSVs")


def _crossings(xs, ya, yb) -> list[float]:
    """x positions where linear interpolants of ya and yb intersect."""
    out = []
    for i in range(len(xs) - 1):
        d0, d1 = ya[i] - yb[i], ya[i + 1] - yb[i + 1]
        if d0 == 0.0:
            out.append(xs[i])
        elif d0 * d1 < 0.0:
            out.append(xs[i] + (xs[i + 1] - xs[i]) * d0 / (d0 - d1))
    if len(xs) and ya[-1] == yb[-1]:
        out.append(xs[-1])
    return out


def _band(ax, xs, pts, color, gid):
    poly = ax.fill_between(xs, [p.ci_low for p in pts],
                           [p.ci_high for p in pts],
                           color=color, alpha=0.25, linewidth=0)
    poly.set_gid(gid)


def _line(ax, xs, pts, color, label, gid, **kw):
    (ln,) = ax.plot(xs, [p.p_b_mean for p in pts], color=color,
                    label=label, **kw)
    ln.set_gid(gid)
    return ln


def _annotate_crossings(ax, xs, ya, yb, tag, unit):
    for k, x in enumerate(_crossings(xs, ya, yb)):
        y = _interp(x, xs, ya)
        mark = ax.plot([x], [y], marker="o", color="black", ms=5)[0]
        mark.set_gid(f"crossing-{tag}-{k}")
        note = ax.annotate(f"{x:.3g} {unit}".strip(), (x, y),
                           textcoords="offset points", xytext=(6, 6),
                           fontsize=8)
        note.set_gid(f"crossing-label-{tag}-{k}")


def _interp(x, xs, ys):
    for i in range(len(xs) - 1):
        if xs[i] <= x <= xs[i + 1]:
            f = 0.0 if xs[i + 1] == xs[i] else (x - xs[i]) / (xs[i + 1] - xs[i])
            return ys[i] + f * (ys[i + 1] - ys[i])
    return ys[-1]


def _load(spec: PlotSpec) -> dict[tuple, list[Point]]:
    points: list[Point] = []
    for path in spec.csv_paths:
        points.extend(read_points(path))
    return series(points, *spec.group_keys)


def _finish(fig, ax, spec, out_path, xlabel):
    ax.set_xlabel(xlabel)
    ax.set_ylabel("success probability $P_B$")
    if spec.x_range:
        ax.set_xlim(*spec.x_range)
    if spec.y_range:
        ax.set_ylim(*spec.y_range)
    ax.legend(loc="lower left", fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.savefig(out_path, format="svg", metadata={"Date": None})
    plt.close(fig)


def _plot_storage(spec: PlotSpec, out_path: str):
    """Corrected vs uncorrected vs bare storage curves over tau."""
    groups = _load(spec)
    fig, ax = plt.subplots(figsize=(5.4, 3.6), constrained_layout=True)
    bare = corrected = idle = None
    blue = 0
    for (protocol, cycles), pts in sorted(groups.items(), reverse=True):
        xs = [p.tau_s for p in pts]
        if protocol == "bare":
            bare = (xs, [p.p_b_mean for p in pts])
            _line(ax, xs, pts, GREY, "bare qubit", "series-bare",
                  linestyle=":")
        elif cycles == 0:
            idle = (xs, [p.p_b_mean for p in pts])
            _band(ax, xs, pts, RED, f"band-{protocol}-0")
            _line(ax, xs, pts, RED, f"{protocol}, no correction",
                  f"series-{protocol}-idle")
        else:
            color = BLUES[blue % len(BLUES)]
            blue += 1
            _band(ax, xs, pts, color, f"band-{protocol}-{cycles}")
            _line(ax, xs, pts, color, f"{protocol}, {cycles} cycle(s)",
                  f"series-{protocol}-{cycles}")
            if corrected is None or cycles == 1:
                corrected = (xs, [p.p_b_mean for p in pts])
    if corrected and idle and corrected[0] == idle[0]:
        _annotate_crossings(ax, corrected[0], corrected[1], idle[1],
                            "vs-idle", "s")
    if corrected and bare and corrected[0] == bare[0]:
        _annotate_crossings(ax, corrected[0], corrected[1], bare[1],
                            "vs-bare", "s")
    if spec.figure_id == "fig21":
        _envelope(ax, groups)
    _finish(fig, ax, spec, out_path, "storage time $\\tau$ (s)")


def _envelope(ax, groups):
    """Grey dashed upper envelope over the corrected multi-cycle series."""
    corrected = {k: v for k, v in groups.items()
                 if k[0] != "bare" and k[1] > 0}
    if not corrected:
        return
    first = next(iter(corrected.values()))
    xs = [p.tau_s for p in first]
    env = []
    for i in range(len(xs)):
        env.append(max(pts[i].p_b_mean for pts in corrected.values()
                       if len(pts) == len(xs)))
    (ln,) = ax.plot(xs, env, color=GREY, linestyle="--", linewidth=1.6,
                    label="best cycle count")
    ln.set_gid("envelope")


def _plot_lambda(spec: PlotSpec, out_path: str):
    """Error-scale sweep: one curve per protocol, crossings annotated."""
    groups = _load(spec)
    fig, ax = plt.subplots(figsize=(5.4, 3.6), constrained_layout=True)
    curves = {}
    palette = {"A3": RED, "B1": BLUES[0], "B2": BLUES[2]}
    for (protocol, _cycles), pts in sorted(groups.items()):
        xs = [p.lam for p in pts]
        color = palette.get(protocol, GREY)
        _band(ax, xs, pts, color, f"band-{protocol}")
        _line(ax, xs, pts, color, protocol, f"series-{protocol}")
        curves[protocol] = (xs, [p.p_b_mean for p in pts])
    if "A3" in curves:
        xs, ya = curves["A3"]
        for other in ("B1", "B2"):
            if other in curves and curves[other][0] == xs:
                _annotate_crossings(ax, xs, ya, curves[other][1],
                                    f"A3-{other}", "")
    _finish(fig, ax, spec, out_path, "error scale factor $\\lambda$")


def plot_figure(spec: PlotSpec, out_path: str) -> str:
    if spec.figure_id == "fig18":
        _plot_lambda(spec, out_path)
    else:
        _plot_storage(spec, out_path)
    return out_path
