"""One entry point per figure id: --csv (repeatable) and --out."""

from __future__ import annotations

import argparse
import sys

from .figures import PlotSpec, plot_figure
from .schema import SchemaError


def _run(figure_id: str, argv) -> int:
    parser = argparse.ArgumentParser(
        prog=f"figplot-{figure_id}",
        description=f"render {figure_id} from simulator CSV output")
    parser.add_argument("--csv", action="append", required=True,
                        help="input CSV (repeat for multiple files)")
    parser.add_argument("--out", required=True, help="output SVG path")
    args = parser.parse_args(argv)
    try:
        spec = PlotSpec(csv_paths=tuple(args.csv), figure_id=figure_id)
        plot_figure(spec, args.out)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out}")
    return 0


def main_fig14(argv=None) -> int:
    return _run("fig14", argv)


def main_fig18(argv=None) -> int:
    return _run("fig18", argv)


def main_fig21(argv=None) -> int:
    return _run("fig21", argv)
