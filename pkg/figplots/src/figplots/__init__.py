"""Offline rendering of storage-experiment CSVs into publication curves."""

from .figures import FIGURE_IDS, PlotSpec, plot_figure
from .schema import CSV_COLUMNS, Point, SchemaError, read_points

__all__ = ["CSV_COLUMNS", "FIGURE_IDS", "PlotSpec", "Point", "SchemaError",
           "plot_figure", "read_points"]
