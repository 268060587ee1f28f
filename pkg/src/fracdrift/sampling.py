"""Observation-time grids on [0, ~1]: deterministic, jittered and renewal."""
from __future__ import annotations

import csv
import enum
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGrid, ValidationError, ZeroSize
from .fbm import check_times


class Scheme(str, enum.Enum):
    DETERMINISTIC = "deterministic"
    JITTERED = "jittered"
    RENEWAL = "renewal"
    # times read from a file, no generating mechanism known
    EXTERNAL = "external"


@dataclass(frozen=True, eq=False)
class TimeGrid:
    """Strictly increasing times tau_1..tau_n; tau_0 = 0 is implicit.

    ``increments`` holds the i.i.d. gaps for renewal grids (needed by the
    renewal decomposition) and is ``None`` otherwise.
    """

    scheme: Scheme
    taus: np.ndarray
    increments: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        object.__setattr__(self, "taus", check_times(self.taus))

    @property
    def n(self) -> int:
        return len(self.taus)

    tau0 = 0.0


def _check_n(n) -> int:
    if int(n) != n:
        raise ValidationError(f"grid size must be an integer, got {n!r}")
    if n < 1:
        raise ZeroSize(f"grid size must be >= 1, got {n}")
    return int(n)


def deterministic_grid(n: int) -> TimeGrid:
    n = _check_n(n)
    return TimeGrid(Scheme.DETERMINISTIC, np.arange(1, n + 1, dtype=np.float64) / n)


def jittered_grid_from_offsets(offsets) -> TimeGrid:
    """tau_i = i/n + offsets[i-1]; every offset must lie in [-1/(2n), 1/(2n)]."""
    nu = np.asarray(offsets, dtype=np.float64)
    n = _check_n(len(nu))
    if np.any(np.abs(nu) > 0.5 / n):
        raise ValidationError(f"jitter offsets must lie within +-1/(2n) = {0.5 / n}")
    return TimeGrid(Scheme.JITTERED, np.arange(1, n + 1, dtype=np.float64) / n + nu)


def jittered_grid(n: int, rng) -> TimeGrid:
    """Regular grid i/n with i.i.d. Uniform[-1/(2n), 1/(2n)] offsets.

    A tie between neighbours has probability zero; if one occurs the offending
    offsets are redrawn once and a second tie is an error.
    """
    n = _check_n(n)
    half = 0.5 / n
    base = np.arange(1, n + 1, dtype=np.float64) / n
    nu = rng.uniform(-half, half, size=n)
    taus = base + nu
    bad = np.flatnonzero(np.diff(np.concatenate(([0.0], taus))) <= 0.0)
    if bad.size:
        nu[bad] = rng.uniform(-half, half, size=bad.size)
        taus = base + nu
        if np.any(np.diff(np.concatenate(([0.0], taus))) <= 0.0):
            raise DegenerateGrid(f"jittered grid of size {n} has a tie after redraw")
    return TimeGrid(Scheme.JITTERED, taus)


def renewal_grid_from_increments(increments) -> TimeGrid:
    t = np.array(increments, dtype=np.float64)
    _check_n(len(t))
    if np.any(t <= 0.0):
        raise ValidationError("renewal increments must be positive")
    return TimeGrid(Scheme.RENEWAL, np.cumsum(t), increments=t)


def renewal_grid(n: int, rng) -> TimeGrid:
    """Cumulative sums of n i.i.d. Exponential(rate=n) gaps.

    Exactly n times are produced, so tau_n ~ Gamma(n, n) has mean 1 and may
    exceed 1; nothing is truncated.
    """
    n = _check_n(n)
    t = rng.exponential(scale=1.0 / n, size=n)
    zero = t <= 0.0
    while np.any(zero):  # exponential draws of exactly 0.0 are possible in float
        t[zero] = rng.exponential(scale=1.0 / n, size=int(zero.sum()))
        zero = t <= 0.0
    return TimeGrid(Scheme.RENEWAL, np.cumsum(t), increments=t)


def make_grid(scheme, n: int, rng=None) -> TimeGrid:
    scheme = Scheme(scheme)
    if scheme is Scheme.DETERMINISTIC:
        return deterministic_grid(n)
    if scheme is Scheme.JITTERED:
        return jittered_grid(n, rng)
    if scheme is Scheme.RENEWAL:
        return renewal_grid(n, rng)
    raise ValidationError(f"cannot generate a grid for scheme {scheme.value!r}")


def write_grid_csv(grid: TimeGrid, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "tau"])
        for i, tau in enumerate(grid.taus, start=1):
            w.writerow([i, repr(float(tau))])


def read_grid_csv(path, scheme=Scheme.EXTERNAL) -> TimeGrid:
    with open(path, newline="") as fh:
        taus = [float(row["tau"]) for row in csv.DictReader(fh)]
    return TimeGrid(scheme, np.array(taus))
