"""Figure rendering for ptkrotor experiment tables."""

from .render import FigureSpec, SchemaError, Table, build_figure, load_table, render

__version__ = "0.1.0"
