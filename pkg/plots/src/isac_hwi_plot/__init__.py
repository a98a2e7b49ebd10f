"""Presentation-only rendering of isac-hwi scenario CSVs into figures."""

__version__ = "0.1.0"

from .render import (FIGURE_KINDS, REQUIRED_COLUMNS, FigureSpec, SchemaError,
                     load_table, render)
