"""Render walkshuffle figure CSVs into images.

This package consumes only the versioned ``figure-<id>.v1`` CSV schema
(metadata lines starting with '#', then ``x,y,series`` rows) and never
recomputes any quantity: every plotted value comes from the CSV verbatim.
"""

__version__ = "0.1.0"

from .render import FigureSpec, SchemaError, load_figure_csv, render

__all__ = ["FigureSpec", "SchemaError", "load_figure_csv", "render"]
