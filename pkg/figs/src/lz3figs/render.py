"""Figure rendering for sweep CSVs: multi-curve line plots and heatmaps.

The figure kind is deduced from the CSV metadata: an axis with an explicit
value list (or a single axis) gives a curves plot, two generated axes give
a heatmap.  Rendering never recomputes anything; identical input produces
an identical image.
"""

from __future__ import annotations

from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .csvio import SweepTableFile, TableFormatError, read_table

AXIS_LABELS = {
    "delta": "$\\Delta/\\Omega_{23}$",
    "omega12": "$\\Omega_{12}/\\Omega_{23}$",
    "omega13": "$\\Omega_{13}/\\Omega_{23}$",
    "gamma2": "$\\Gamma/\\Omega_{23}$",
}

OBSERVABLE_LABELS = {
    "p3_final": "final population of $|3\\rangle$",
    "min_gap": "$G/\\Omega_{23}$",
    "margin": "$G/\\sqrt{\\kappa}$",
    "ica_p3": "composed crossing estimate of $P_3$",
    "norm_loss": "population lost to external states",
}

FIGSIZE = (6.0, 4.5)
DPI = 150


@dataclass
class FigureJob:
    csv_path: str
    out_path: str
    kind: str | None = None  # curves | heatmap; deduced from metadata if None


@dataclass
class RenderResult:
    out_path: str
    kind: str
    legend_entries: int


def deduce_kind(table: SweepTableFile) -> str:
    if len(table.axes) == 1 or any(a.values is not None for a in table.axes):
        return "curves"
    return "heatmap"


def _observable(table: SweepTableFile) -> str:
    observables = table.observables
    if not observables:
        raise TableFormatError("metadata lists no observables")
    return observables[0]


def _render_curves(table: SweepTableFile, ax) -> int:
    observable = _observable(table)
    values = table.column(observable)
    if len(table.axes) == 1:
        x_axis = table.axes[0]
        ax.plot(x_axis.grid(), values)
        n_legend = 0
    else:
        curve_axis, x_axis = table.axes
        if curve_axis.values is None:
            curve_axis, x_axis = x_axis, curve_axis
        if curve_axis.values is None:
            raise TableFormatError("curves layout needs an explicit-value axis")
        grid = values.reshape(curve_axis.count, x_axis.count)
        order = list(range(curve_axis.count))
        if table.axes[0] is x_axis:  # explicit axis stored innermost
            grid = values.reshape(x_axis.count, curve_axis.count).T
        for i in order:
            ax.plot(x_axis.grid(), grid[i],
                    label=f"{AXIS_LABELS.get(curve_axis.name, curve_axis.name)} = "
                          f"{curve_axis.values[i]:g}")
        ax.legend(fontsize="small")
        n_legend = curve_axis.count
    if x_axis.scale == "log10":
        ax.set_xscale("log")
    ax.set_xlabel(AXIS_LABELS.get(x_axis.name, x_axis.name))
    ax.set_ylabel(OBSERVABLE_LABELS.get(observable, observable))
    return n_legend


def _render_heatmap(table: SweepTableFile, fig, ax):
    observable = _observable(table)
    x_axis, y_axis = table.axes  # axis1 on x, axis2 on y; rows are axis1-major
    grid = table.column(observable).reshape(x_axis.count, y_axis.count).T
    mesh = ax.pcolormesh(
        x_axis.grid(), y_axis.grid(), grid, shading="nearest",
        cmap="viridis", vmin=np.nanmin(grid), vmax=np.nanmax(grid),
    )
    if x_axis.scale == "log10":
        ax.set_xscale("log")
    if y_axis.scale == "log10":
        ax.set_yscale("log")
    ax.set_xlabel(AXIS_LABELS.get(x_axis.name, x_axis.name))
    ax.set_ylabel(AXIS_LABELS.get(y_axis.name, y_axis.name))
    fig.colorbar(mesh, ax=ax, label=OBSERVABLE_LABELS.get(observable, observable))


def render(job: FigureJob) -> RenderResult:
    """Render one CSV to one image; raises before writing on any mismatch."""
    table = read_table(job.csv_path)
    kind = deduce_kind(table)
    if job.kind is not None and job.kind != kind:
        raise TableFormatError(
            f"requested kind {job.kind!r} but metadata describes a {kind} table"
        )
    fig, ax = plt.subplots(figsize=FIGSIZE, dpi=DPI)
    try:
        legend_entries = 0
        if kind == "curves":
            legend_entries = _render_curves(table, ax)
        else:
            _render_heatmap(table, fig, ax)
        title = table.metadata.get("preset", "")
        if title:
            ax.set_title(title)
        fig.tight_layout()
        fig.savefig(job.out_path)
    finally:
        plt.close(fig)
    return RenderResult(out_path=job.out_path, kind=kind, legend_entries=legend_entries)
