"""Declarative parameter sweeps with deterministic tabular output.

A sweep walks one or two parameter axes around a base parameter set and
evaluates the requested observables at every grid point.  Row order is
lexicographic over the axis indices (outer axis major) regardless of how
many workers execute the grid, and a failing point flags its row instead of
aborting the sweep.  Figure presets encode the standard map layouts used
throughout this package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from multiprocessing import get_context

import numpy as np

from ._version import __version__
from .ica import ica_predict
from .model import SystemParams
from .propagate import StateVector, propagate_nonhermitian
from .spectrum import DEFAULT_SCAN_POINTS, min_gap

AXIS_PARAMETERS = ("delta", "omega12", "omega13", "gamma2")
OBSERVABLES = ("p3_final", "min_gap", "margin", "ica_p3", "norm_loss")

PRESET_NAMES = (
    "fig2a",
    "fig2b",
    "fig2c",
    "fig2d",
    "fig3a",
    "fig3b",
    "fig3c",
    "fig4a",
    "fig4b",
    "fig4c",
    "fig5a",
    "fig5b",
    "fig5c",
)

_BASE_FIELDS = (
    "kappa",
    "horizon",
    "delta",
    "omega12",
    "omega23",
    "omega13",
    "phi12",
    "phi23",
    "phi13",
    "gamma1",
    "gamma2",
    "gamma3",
)


@dataclass
class SweepAxis:
    """One swept parameter: a generated range or an explicit value list."""

    name: str
    minimum: float = 0.0
    maximum: float = 1.0
    count: int = 2
    scale: str = "linear"
    values: tuple = None  # explicit grid; overrides the range generator

    def __post_init__(self):
        if self.name not in AXIS_PARAMETERS:
            raise ValueError(f"axis parameter must be one of {AXIS_PARAMETERS}, got {self.name!r}")
        if self.scale not in ("linear", "log10"):
            raise ValueError(f"axis scale must be 'linear' or 'log10', got {self.scale!r}")
        if self.values is not None:
            self.values = tuple(float(v) for v in self.values)
            if len(self.values) < 2:
                raise ValueError("an explicit axis needs at least 2 values")
            self.count = len(self.values)
            self.minimum = min(self.values)
            self.maximum = max(self.values)
            return
        if self.count < 2:
            raise ValueError(f"axis count must be >= 2, got {self.count}")
        if self.scale == "log10" and self.minimum <= 0.0:
            raise ValueError("log10 axis requires minimum > 0")

    def grid(self) -> np.ndarray:
        if self.values is not None:
            return np.array(self.values, dtype=float)
        if self.scale == "log10":
            return np.logspace(math.log10(self.minimum), math.log10(self.maximum), self.count)
        return np.linspace(self.minimum, self.maximum, self.count)


@dataclass
class SweepSpec:
    """A declarative sweep: axes, base parameters, observables, solver knobs."""

    axes: list
    base: SystemParams
    observables: tuple
    tol: float = 1e-10
    scan_points: int = DEFAULT_SCAN_POINTS
    label: str = ""

    def __post_init__(self):
        if not 1 <= len(self.axes) <= 2:
            raise ValueError("a sweep takes 1 or 2 axes")
        names = [axis.name for axis in self.axes]
        if len(set(names)) != len(names):
            raise ValueError(f"axis parameter names must be distinct, got {names}")
        self.observables = tuple(self.observables)
        for obs in self.observables:
            if obs not in OBSERVABLES:
                raise ValueError(f"unknown observable {obs!r}; choose from {OBSERVABLES}")
        if not self.observables:
            raise ValueError("at least one observable is required")

    def shape(self) -> tuple:
        return tuple(axis.count for axis in self.axes)

    def n_points(self) -> int:
        n = 1
        for axis in self.axes:
            n *= axis.count
        return n


@dataclass
class SweepTable:
    """Sweep output: column names, one row per grid point, and metadata
    sufficient to rebuild the spec that produced it."""

    columns: list
    rows: np.ndarray
    metadata: dict

    def to_csv(self) -> str:
        lines = [f"# {key}={value}" for key, value in self.metadata.items()]
        lines.append(",".join(self.columns))
        for row in self.rows:
            lines.append(",".join(repr(float(v)) for v in row))
        return "\n".join(lines) + "\n"


def _point_values(spec: SweepSpec, index: int):
    grids = [axis.grid() for axis in spec.axes]
    if len(grids) == 1:
        return (grids[0][index],)
    inner = spec.axes[1].count
    return (grids[0][index // inner], grids[1][index % inner])


def _evaluate_point(spec: SweepSpec, index: int):
    values = _point_values(spec, index)
    out = list(values)
    try:
        params = replace(spec.base, **{axis.name: float(v) for axis, v in zip(spec.axes, values)})
        results = {}
        if "p3_final" in spec.observables or "norm_loss" in spec.observables:
            prop = propagate_nonhermitian(params, StateVector.basis(1), spec.tol, n_samples=0)
            pops = prop.final_state.populations()
            results["p3_final"] = float(pops[2])
            results["norm_loss"] = float(1.0 - pops.sum())
        if "min_gap" in spec.observables or "margin" in spec.observables:
            gap = min_gap(params, spec.scan_points)
            results["min_gap"] = gap.gap
            results["margin"] = gap.margin
        if "ica_p3" in spec.observables:
            results["ica_p3"] = ica_predict(params).p3
        out.extend(results[obs] for obs in spec.observables)
        out.append(0.0)
    except Exception:
        out.extend([float("nan")] * len(spec.observables))
        out.append(1.0)
    return out


def _evaluate_chunk(args):
    spec, start, stop = args
    return start, [_evaluate_point(spec, i) for i in range(start, stop)]


def _metadata(spec: SweepSpec) -> dict:
    meta = {"version": __version__, "preset": spec.label, "naxes": str(len(spec.axes))}
    for i, axis in enumerate(spec.axes, start=1):
        meta[f"axis{i}_name"] = axis.name
        meta[f"axis{i}_min"] = repr(axis.minimum)
        meta[f"axis{i}_max"] = repr(axis.maximum)
        meta[f"axis{i}_count"] = str(axis.count)
        meta[f"axis{i}_scale"] = axis.scale
        if axis.values is not None:
            meta[f"axis{i}_values"] = ",".join(repr(v) for v in axis.values)
    meta["observables"] = ",".join(spec.observables)
    meta["tol"] = repr(spec.tol)
    meta["scan_points"] = str(spec.scan_points)
    for name in _BASE_FIELDS:
        meta[f"base_{name}"] = repr(getattr(spec.base, name))
    return meta


def spec_from_metadata(metadata: dict) -> SweepSpec:
    """Rebuild a runnable SweepSpec from a table's metadata block."""
    axes = []
    for i in range(1, int(metadata["naxes"]) + 1):
        values = metadata.get(f"axis{i}_values")
        axes.append(
            SweepAxis(
                name=metadata[f"axis{i}_name"],
                minimum=float(metadata[f"axis{i}_min"]),
                maximum=float(metadata[f"axis{i}_max"]),
                count=int(metadata[f"axis{i}_count"]),
                scale=metadata[f"axis{i}_scale"],
                values=tuple(float(v) for v in values.split(",")) if values else None,
            )
        )
    base = SystemParams(**{name: float(metadata[f"base_{name}"]) for name in _BASE_FIELDS})
    return SweepSpec(
        axes=axes,
        base=base,
        observables=tuple(metadata["observables"].split(",")),
        tol=float(metadata["tol"]),
        scan_points=int(metadata["scan_points"]),
        label=metadata.get("preset", ""),
    )


def run_sweep(spec: SweepSpec, workers: int = 1) -> SweepTable:
    """Evaluate the grid; identical output for any worker count.

    Points are independent; with workers > 1 they are evaluated by a process
    pool in contiguous chunks and written back into their grid slots.
    """
    n = spec.n_points()
    columns = [axis.name for axis in spec.axes] + list(spec.observables) + ["failed"]
    rows = np.empty((n, len(columns)), dtype=float)
    workers = max(1, int(workers))
    if workers == 1:
        for i in range(n):
            rows[i, :] = _evaluate_point(spec, i)
    else:
        chunk = max(1, -(-n // (workers * 4)))
        tasks = [(spec, start, min(start + chunk, n)) for start in range(0, n, chunk)]
        with get_context("fork").Pool(workers) as pool:
            for start, chunk_rows in pool.imap_unordered(_evaluate_chunk, tasks):
                for offset, row in enumerate(chunk_rows):
                    rows[start + offset, :] = row
    return SweepTable(columns=columns, rows=rows, metadata=_metadata(spec))


def figure_preset(name: str, axis_points: int = None) -> SweepSpec:
    """Sweep spec for one of the standard figure layouts.

    fig2a-d: transfer efficiency (a, c) or minimum gap (b, d) against the
    detuning for four omega12 values, with omega13 = 0 (a, b) or 0.5 (c, d).
    fig3a-c: (omega13, delta) maps of the efficiency at kappa = 0.1 (a) and
    kappa = 1 (b), and of the minimum gap (c).
    fig4a-c: the fig3a map with middle-level decay 0.001 / 0.005 / 0.025.
    fig5a-c: (delta, log10 gamma2) maps at omega13 = 0 / 0.2 / 0.5.

    All presets use omega23 = 1 as the unit and kappa * T = 100.
    ``axis_points`` overrides the per-axis resolution of generated (not
    explicit-value) axes, for quick reduced-resolution runs.
    """
    if name not in PRESET_NAMES:
        raise KeyError(f"unknown figure preset {name!r}; choose from {PRESET_NAMES}")

    def axis(param, lo, hi, count, scale="linear"):
        if axis_points is not None:
            count = max(2, int(axis_points))
        return SweepAxis(param, lo, hi, count, scale)

    def base(**overrides):
        defaults = dict(kappa=0.1, horizon=1000.0, omega12=1.0, omega23=1.0)
        defaults.update(overrides)
        return SystemParams(**defaults)

    omega12_curves = SweepAxis("omega12", values=(1.0, 0.5, 0.1, 0.0))
    tol = 1e-6

    if name.startswith("fig2"):
        omega13 = 0.0 if name in ("fig2a", "fig2b") else 0.5
        observable = "p3_final" if name in ("fig2a", "fig2c") else "min_gap"
        return SweepSpec(
            axes=[omega12_curves, axis("delta", -5.0, 5.0, 201)],
            base=base(omega13=omega13),
            observables=(observable,),
            tol=tol,
            label=name,
        )
    if name.startswith("fig3") or name.startswith("fig4"):
        kappa, horizon = (1.0, 100.0) if name == "fig3b" else (0.1, 1000.0)
        gamma2 = {"fig4a": 0.001, "fig4b": 0.005, "fig4c": 0.025}.get(name, 0.0)
        observable = "min_gap" if name == "fig3c" else "p3_final"
        return SweepSpec(
            axes=[axis("omega13", 0.0, 1.0, 101), axis("delta", -3.0, 3.0, 101)],
            base=base(kappa=kappa, horizon=horizon, gamma2=gamma2),
            observables=(observable,),
            tol=tol,
            label=name,
        )
    omega13 = {"fig5a": 0.0, "fig5b": 0.2, "fig5c": 0.5}[name]
    return SweepSpec(
        axes=[axis("delta", -3.0, 3.0, 101), axis("gamma2", 1e-4, 1.0, 101, "log10")],
        base=base(omega13=omega13),
        observables=("p3_final",),
        tol=tol,
        label=name,
    )
