"""Figure rendering for motirr CLI CSV outputs."""

from .render import FigureSpec, SchemaError, parse_csv, render

__version__ = "0.1.0"

__all__ = ["FigureSpec", "SchemaError", "parse_csv", "render"]
