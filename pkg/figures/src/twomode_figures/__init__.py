"""Figure renderers for twomode CLI outputs (file-contract coupled only)."""

__version__ = "0.1.0"

from .io import SchemaError, read_points, read_table
from .render import FigureSpec, render
