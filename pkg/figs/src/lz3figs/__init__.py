"""Rendering of sweep CSVs into line plots and heatmaps."""

from .csvio import AxisInfo, SweepTableFile, TableFormatError, read_table
from .render import FigureJob, RenderResult, deduce_kind, render

__all__ = [
    "AxisInfo",
    "FigureJob",
    "RenderResult",
    "SweepTableFile",
    "TableFormatError",
    "deduce_kind",
    "read_table",
    "render",
]
