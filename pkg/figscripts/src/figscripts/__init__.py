"""Figure panels regenerated from atomchain CSV outputs; no physics here."""

from .csvdata import SCHEMAS, SchemaError, load_columns
from .panels import PANELS, FigureSpec, render

__version__ = "0.1.0"
