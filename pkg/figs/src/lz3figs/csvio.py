"""Reader for the sweep CSV dialect.

Files carry ``# key=value`` metadata lines, then a comma-separated header,
then numeric rows (LF line endings, UTF-8, ``repr`` floats).  The metadata
block describes the sweep axes (name, range, count, scale, optional
explicit value list) and the observables, which is everything the renderer
needs to lay a figure out.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class TableFormatError(ValueError):
    pass


@dataclass
class AxisInfo:
    name: str
    minimum: float
    maximum: float
    count: int
    scale: str
    values: tuple | None

    def grid(self) -> np.ndarray:
        if self.values is not None:
            return np.array(self.values, dtype=float)
        if self.scale == "log10":
            return np.logspace(np.log10(self.minimum), np.log10(self.maximum), self.count)
        return np.linspace(self.minimum, self.maximum, self.count)


@dataclass
class SweepTableFile:
    metadata: dict
    columns: list
    rows: np.ndarray
    axes: list

    @property
    def observables(self) -> list:
        return [c for c in self.metadata.get("observables", "").split(",") if c]

    def column(self, name: str) -> np.ndarray:
        if name not in self.columns:
            raise TableFormatError(f"column {name!r} missing from {self.columns}")
        return self.rows[:, self.columns.index(name)]


def _parse_axis(meta: dict, i: int) -> AxisInfo:
    try:
        values = meta.get(f"axis{i}_values")
        return AxisInfo(
            name=meta[f"axis{i}_name"],
            minimum=float(meta[f"axis{i}_min"]),
            maximum=float(meta[f"axis{i}_max"]),
            count=int(meta[f"axis{i}_count"]),
            scale=meta[f"axis{i}_scale"],
            values=tuple(float(v) for v in values.split(",")) if values else None,
        )
    except KeyError as exc:
        raise TableFormatError(f"metadata is missing axis key {exc}") from exc


def read_table(path: str) -> SweepTableFile:
    metadata = {}
    columns = None
    rows = []
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                key, sep, value = line.lstrip("# ").partition("=")
                if sep:
                    metadata[key.strip()] = value.strip()
                continue
            if columns is None:
                columns = line.split(",")
                continue
            parts = line.split(",")
            if len(parts) != len(columns):
                raise TableFormatError(
                    f"{path}: row has {len(parts)} fields, header has {len(columns)}"
                )
            rows.append([float(v) for v in parts])
    if columns is None:
        raise TableFormatError(f"{path}: no header row found")
    if not rows:
        raise TableFormatError(f"{path}: table has no data rows")
    if "naxes" not in metadata:
        raise TableFormatError(f"{path}: metadata lacks the naxes key")
    naxes = int(metadata["naxes"])
    axes = [_parse_axis(metadata, i) for i in range(1, naxes + 1)]
    table = SweepTableFile(metadata, columns, np.array(rows, dtype=float), axes)
    expected = int(np.prod([a.count for a in axes]))
    if table.rows.shape[0] != expected:
        raise TableFormatError(
            f"{path}: {table.rows.shape[0]} rows but axes describe {expected} points"
        )
    for axis in axes:
        if axis.name not in columns:
            raise TableFormatError(f"{path}: axis column {axis.name!r} missing")
    return table
