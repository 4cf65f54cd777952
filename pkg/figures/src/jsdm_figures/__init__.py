"""Figure rendering for the simulator's experiment CSVs."""

from .render import KINDS, FigureSpec, SchemaError, collect_series, read_rows, render

__all__ = ["KINDS", "FigureSpec", "SchemaError", "collect_series",
           "read_rows", "render"]
