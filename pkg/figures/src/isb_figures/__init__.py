"""isb-figures: figure reproduction from irisbench sweep result CSVs."""

from .plots import FigureFamily, FigureSpec, render
from .schema import EmptySelectionError, SchemaError

__version__ = "0.1.0"
