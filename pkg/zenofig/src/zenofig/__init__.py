"""Render correlation figures from exported sweep tables.

Consumes only the documented CSV schema of the simulation toolkit's sweep
export (one row per evaluated point, exact header match required) and emits
static images: short-time line overlays for the free-evolution presets and
overlaid measured-vs-free surfaces over the (tau, lambda*T) plane.
"""

from .core import (
    CSV_SCHEMA,
    FIGURE_IDS,
    FigureSpec,
    NoDataError,
    SchemaError,
    load_rows,
    render,
)

__all__ = [
    "CSV_SCHEMA",
    "FIGURE_IDS",
    "FigureSpec",
    "NoDataError",
    "SchemaError",
    "load_rows",
    "render",
]

__version__ = "0.1.0"
