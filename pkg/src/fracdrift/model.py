"""Regression through the origin with fBm-increment noise.

    Y_i = a * tau_i + (B_{tau_i} - B_{tau_{i-1}}),   i = 1..n,  B_{tau_0} = 0
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import GridMismatch, NonIncreasingGrid, ValidationError
from .fbm import GaussianPath
from .sampling import Scheme, TimeGrid


@dataclass(frozen=True, eq=False)
class ObservationSeries:
    grid: TimeGrid
    y: np.ndarray
    drift_true: float | None = None

    def __post_init__(self):
        y = np.ascontiguousarray(self.y, dtype=np.float64)
        if y.shape != (self.grid.n,):
            raise ValidationError(
                f"y has shape {y.shape}, expected ({self.grid.n},)")
        object.__setattr__(self, "y", y)

    @property
    def taus(self) -> np.ndarray:
        return self.grid.taus

    @property
    def n(self) -> int:
        return self.grid.n


def simulate(a: float, grid: TimeGrid, path: GaussianPath) -> ObservationSeries:
    if len(path.values) != grid.n or not np.array_equal(path.times, grid.taus):
        raise GridMismatch("path was not sampled on this grid")
    increments = np.diff(path.values, prepend=0.0)
    return ObservationSeries(grid, a * grid.taus + increments, drift_true=a)


def write_series_csv(obs: ObservationSeries, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "tau", "y"])
        for i, (tau, y) in enumerate(zip(obs.taus, obs.y), start=1):
            w.writerow([i, repr(float(tau)), repr(float(y))])


def read_series_csv(path, drift_true=None, scheme=Scheme.EXTERNAL) -> ObservationSeries:
    """Load (tau, y) pairs; an ``index`` column is accepted but not required.

    Raises ``ValidationError`` naming the offending data row (1-based, header
    excluded) for missing columns, unparsable numbers or non-increasing times.
    """
    taus, ys = [], []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        cols = reader.fieldnames or []
        if "tau" not in cols or "y" not in cols:
            raise ValidationError(f"{path}: expected columns 'tau' and 'y', got {cols}")
        for row_no, row in enumerate(reader, start=1):
            try:
                taus.append(float(row["tau"]))
                ys.append(float(row["y"]))
            except (TypeError, ValueError):
                raise ValidationError(f"{path}: row {row_no}: cannot parse {row}") from None
    if not taus:
        raise ValidationError(f"{path}: no data rows")
    try:
        grid = TimeGrid(scheme, np.array(taus))
    except NonIncreasingGrid as exc:
        row = "" if exc.index is None else f"row {exc.index + 1}: "
        raise NonIncreasingGrid(f"{path}: {row}{exc}", index=exc.index) from None
    return ObservationSeries(grid, np.array(ys), drift_true=drift_true)
