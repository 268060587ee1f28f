"""Least-squares drift estimate and its numerator/denominator split.

With ``D = mean(tau^2)`` and ``A = mean(tau * (Y - a tau))`` the estimation
error factors as ``a_hat - a = A / D``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import kernels
from .errors import DegenerateDenominator, EmptySeries
from .model import ObservationSeries
from .sampling import TimeGrid


@dataclass(frozen=True)
class EstimateDiagnostics:
    a_hat: float
    d_n: float
    n: int
    a_n: float | None = None  # only when the true drift is known


def _sum_sq(taus) -> float:
    return kernels.accurate_dot(taus, taus)


def d_n(grid: TimeGrid) -> float:
    if grid.n == 0:
        raise EmptySeries("empty grid")
    return _sum_sq(grid.taus) / grid.n


def estimate(obs: ObservationSeries) -> EstimateDiagnostics:
    n = obs.n
    if n == 0:
        raise EmptySeries("no observations")
    taus = obs.taus
    sxx = _sum_sq(taus)
    if sxx == 0.0:
        raise DegenerateDenominator("sum of squared times is zero")
    sxy = kernels.accurate_dot(taus, obs.y)
    a_n = None
    if obs.drift_true is not None:
        resid = obs.y - obs.drift_true * taus
        a_n = kernels.accurate_dot(taus, np.ascontiguousarray(resid)) / n
    return EstimateDiagnostics(a_hat=sxy / sxx, d_n=sxx / n, n=n, a_n=a_n)
