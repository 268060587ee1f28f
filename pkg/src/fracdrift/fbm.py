"""Fractional Brownian motion: covariance and exact sampling on arbitrary grids.

Sampling is by dense Cholesky factorisation of the covariance matrix, which
is exact for any strictly increasing set of positive times (circulant
embedding would need an equispaced grid).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import kernels
from .errors import FactorizationFailure, InvalidModel, NonIncreasingGrid

#: Added to the diagonal once if the first factorisation attempt fails.
CHOLESKY_JITTER = 1e-12


@dataclass(frozen=True)
class HurstModel:
    """Hurst exponent and scale of a fractional Brownian motion."""

    hurst: float
    sigma: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.hurst < 1.0:
            raise InvalidModel(f"hurst must lie in (0, 1), got {self.hurst}")
        if not self.sigma > 0.0:
            raise InvalidModel(f"sigma must be positive, got {self.sigma}")


@dataclass(frozen=True)
class GaussianPath:
    """fBm values on a grid; the value at the implicit time 0 is 0."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if len(self.times) != len(self.values):
            raise ValueError("times and values must have the same length")


def covariance(model: HurstModel, t: float, s: float) -> float:
    """E[B_t B_s] = sigma^2 / 2 * (|t|^2H + |s|^2H - |t - s|^2H)."""
    if t < 0 or s < 0:
        raise ValueError("times must be non-negative")
    two_h = 2.0 * model.hurst
    if t == s:
        return model.sigma**2 * t**two_h
    return 0.5 * model.sigma**2 * (t**two_h + s**two_h - abs(t - s) ** two_h)


def check_times(times) -> np.ndarray:
    """Return ``times`` as a float array, or raise if it is not a valid grid.

    A valid grid is non-empty and strictly increasing from the implicit
    origin, i.e. ``0 < times[0] < times[1] < ...``.
    """
    times = np.ascontiguousarray(times, dtype=np.float64)
    if times.ndim != 1 or times.size == 0:
        raise NonIncreasingGrid("grid must be a non-empty 1-d sequence")
    if not np.all(np.isfinite(times)):
        raise NonIncreasingGrid("grid contains non-finite times")
    if times[0] <= 0.0:
        raise NonIncreasingGrid(f"first time must be > 0, got {times[0]}", index=0)
    bad = np.flatnonzero(np.diff(times) <= 0.0)
    if bad.size:
        k = int(bad[0]) + 1
        raise NonIncreasingGrid(
            f"times not strictly increasing at index {k}: "
            f"{times[k - 1]!r} then {times[k]!r}", index=k)
    return times


def covariance_matrix(model: HurstModel, times) -> np.ndarray:
    times = check_times(times)
    return kernels.covariance_fill(times, 2.0 * model.hurst, model.sigma**2)


def cholesky_factor(model: HurstModel, times) -> np.ndarray:
    """Lower-triangular L with L @ L.T equal to the covariance matrix.

    On a failed factorisation the diagonal is shifted by ``CHOLESKY_JITTER``
    and the factorisation retried once.
    """
    cov = covariance_matrix(model, times)
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        pass
    cov[np.diag_indices_from(cov)] += CHOLESKY_JITTER
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as exc:
        raise FactorizationFailure(
            f"covariance of {len(cov)} times is not positive definite even "
            f"after jitter {CHOLESKY_JITTER:g}; near-duplicate times?") from exc


def sample_path(model: HurstModel, times, rng=None, *, normals=None,
                factor=None) -> GaussianPath:
    """Draw one exact fBm path on ``times``.

    The values are ``L @ z`` with ``L`` the Cholesky factor and ``z`` standard
    normals taken from ``rng`` (or given directly as ``normals``).  A
    precomputed ``factor`` may be passed to skip the factorisation when many
    paths share a grid.
    """
    times = check_times(times)
    L = cholesky_factor(model, times) if factor is None else factor
    if normals is None:
        if rng is None:
            raise ValueError("either rng or normals is required")
        z = rng.standard_normal(len(times))
    else:
        z = np.asarray(normals, dtype=np.float64)
        if z.shape != times.shape:
            raise ValueError("normals must match the grid length")
    return GaussianPath(times=times, values=L @ z)


def sample_paths(model: HurstModel, times, size: int, rng) -> np.ndarray:
    """``size`` independent paths on one grid, as a (size, len(times)) array."""
    times = check_times(times)
    L = cholesky_factor(model, times)
    z = rng.standard_normal((len(times), size))
    return (L @ z).T
