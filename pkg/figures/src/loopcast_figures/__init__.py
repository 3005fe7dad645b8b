"""Offline figure rendering for loopcast experiment CSVs."""

from .io import SchemaError, read_csv
from .plots import (error_curves, panel_grid, quality_scatter,
                    sampler_comparison, save, tau_curves, temporal_curves)

__version__ = "0.1.0"
