"""Figure rendering for fdwpcn CSV output."""

from .render import FigureSpec, SchemaError, build_figure, read_table, render

__all__ = ["FigureSpec", "SchemaError", "build_figure", "read_table",
           "render"]
