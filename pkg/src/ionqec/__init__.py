"""Trapped-ion QEC simulation laboratory for the 7-qubit color code."""

__version__ = "0.1.0"
