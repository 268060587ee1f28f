"""Seeded Monte Carlo experiments for the drift estimator.

Every replicate draws from its own child stream, keyed by the master seed and
the replicate's coordinates (``(r,)`` for a fixed-size table, ``(N, r)`` for
sweeps over N), so results do not depend on how replicates are scheduled
across workers.  Keys do not involve the Hurst exponent, so runs that differ
only in H share grids and normal draws.
"""
from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from .errors import DegenerateVariance, ReplicateFailure, ValidationError
from .estimator import estimate
from .fbm import GaussianPath, HurstModel, cholesky_factor, sample_path
from .model import simulate
from .sampling import Scheme, make_grid

HIST_BINS = 30
HIST_HALF_WIDTH_SD = 4.0


@dataclass(frozen=True)
class ExperimentConfig:
    scheme: Scheme = Scheme.JITTERED
    a_true: float = 2.0
    hurst: float = 0.75
    n: int = 300
    m: int = 1000
    seed: int = 0
    sigma: float = 1.0
    rate_check_ns: tuple[int, ...] | None = None
    zero_noise: bool = False  # test hook: replace the fBm path by zeros

    def __post_init__(self):
        try:
            object.__setattr__(self, "scheme", Scheme(self.scheme))
        except ValueError:
            raise ValidationError(f"unknown scheme {self.scheme!r}") from None
        if self.scheme is Scheme.EXTERNAL:
            raise ValidationError("scheme 'external' cannot be simulated")
        for name in ("n", "m", "seed"):
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v:
                raise ValidationError(f"{name} must be an integer, got {v!r}")
            object.__setattr__(self, name, int(v))
        if self.n < 1:
            raise ValidationError(f"n must be >= 1, got {self.n}")
        if self.m < 1:
            raise ValidationError(f"m must be >= 1, got {self.m}")
        if not 0 <= self.seed < 2**64:
            raise ValidationError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if not 0.0 < self.hurst < 1.0:
            raise ValidationError(f"hurst must lie in (0, 1), got {self.hurst}")
        if not self.sigma > 0.0:
            raise ValidationError(f"sigma must be positive, got {self.sigma}")
        if not math.isfinite(self.a_true):
            raise ValidationError("a_true must be finite")
        if self.rate_check_ns is not None:
            ns = tuple(int(k) for k in self.rate_check_ns)
            if any(k < 1 for k in ns):
                raise ValidationError("rate-check sizes must be >= 1")
            object.__setattr__(self, "rate_check_ns", ns)

    @property
    def model(self) -> HurstModel:
        return HurstModel(self.hurst, self.sigma)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["scheme"] = self.scheme.value
        d["rate_check_ns"] = None if self.rate_check_ns is None else list(self.rate_check_ns)
        return d


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    n: int                      # N at which ``estimates`` were taken
    estimates: np.ndarray
    mean: float
    sd: float
    kurtosis_raw: float
    kurtosis_gap: float
    hist_edges: np.ndarray
    hist_counts: np.ndarray
    trace: list[tuple[int, float, float]] | None = None
    rate: list[tuple[int, float]] | None = None
    rate_fit: tuple[float, float] | None = None
    extra: dict = field(default_factory=dict)


def replicate_rng(seed: int, *key: int) -> np.random.Generator:
    """Child generator for one replicate, a pure function of (seed, key)."""
    ss = np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def default_workers() -> int:
    return os.cpu_count() or 1


# --------------------------------------------------------------------------
# statistics
# --------------------------------------------------------------------------

def sample_kurtosis(samples) -> float:
    """Plain moment ratio m4 / m2**2 (central moments, no bias correction)."""
    x = np.asarray(samples, dtype=np.float64)
    if x.size < 4:
        raise DegenerateVariance(f"need at least 4 samples, got {x.size}")
    d = x - x.mean()
    m2 = np.mean(d * d)
    if not m2 > 0.0:
        raise DegenerateVariance("samples have zero variance")
    return float(np.mean(d**4) / m2**2)


def kurtosis_gap(samples) -> float:
    """Gaussian kurtosis minus sample kurtosis, 3 - m4/m2**2."""
    return 3.0 - sample_kurtosis(samples)


def histogram(samples, mean: float, sd: float):
    """30 equal bins on mean +- 4 sd; values beyond the range go to the end
    bins so that counts always sum to the sample size."""
    x = np.asarray(samples, dtype=np.float64)
    half = HIST_HALF_WIDTH_SD * sd if sd > 0 else 0.5
    lo, hi = mean - half, mean + half
    edges = np.linspace(lo, hi, HIST_BINS + 1)
    counts, _ = np.histogram(np.clip(x, lo, hi), bins=edges)
    return edges, counts


def summarize(config, n, estimates, **kw) -> ExperimentReport:
    est = np.asarray(estimates, dtype=np.float64)
    mean = float(np.mean(est))
    sd = float(np.std(est, ddof=1)) if est.size > 1 else math.nan
    try:
        k = sample_kurtosis(est)
    except DegenerateVariance:
        k = math.nan
    edges, counts = histogram(est, mean, sd if math.isfinite(sd) else 0.0)
    return ExperimentReport(config, n, est, mean, sd, k, 3.0 - k, edges, counts, **kw)


# --------------------------------------------------------------------------
# replicates
# --------------------------------------------------------------------------

def one_replicate(config: ExperimentConfig, n: int, rng, factor=None):
    """grid -> fBm path on the grid -> observations -> estimate."""
    grid = make_grid(config.scheme, n, rng)
    if config.zero_noise:
        path = GaussianPath(grid.taus, np.zeros(n))
    else:
        path = sample_path(config.model, grid.taus, rng, factor=factor)
    return estimate(simulate(config.a_true, grid, path))


def _map(fn, keys, workers):
    def guarded(key):
        try:
            return fn(key)
        except Exception as exc:  # noqa: BLE001 - re-raised with the key attached
            raise ReplicateFailure(key, exc) from exc

    # one BLAS thread per replicate keeps LAPACK results independent of workers
    with threadpool_limits(limits=1):
        if workers <= 1:
            return [guarded(k) for k in keys]
        with ThreadPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(guarded, keys))


def _factor_for(config, n):
    if config.scheme is Scheme.DETERMINISTIC and not config.zero_noise:
        return cholesky_factor(config.model, np.arange(1, n + 1) / n)
    return None


def _run_at(config, n, key_prefix, workers):
    factor = _factor_for(config, n)
    keys = [(*key_prefix, r) for r in range(config.m)]
    return _map(lambda key: one_replicate(config, n, replicate_rng(config.seed, *key), factor),
                keys, workers)


def run_table(config: ExperimentConfig, workers: int | None = None) -> ExperimentReport:
    """m independent replicates at size ``config.n``; replicate r uses key (r,)."""
    workers = default_workers() if workers is None else workers
    diags = _run_at(config, config.n, (), workers)
    return summarize(config, config.n, [d.a_hat for d in diags])


def run_convergence_trace(config: ExperimentConfig,
                          workers: int | None = None) -> ExperimentReport:
    """Mean and SD of the estimate for every N in 1..config.n.

    Each (N, r) pair is simulated afresh from key (N, r).
    """
    workers = default_workers() if workers is None else workers
    trace, last = [], None
    for n in range(1, config.n + 1):
        est = np.array([d.a_hat for d in _run_at(config, n, (n,), workers)])
        sd = float(np.std(est, ddof=1)) if est.size > 1 else math.nan
        trace.append((n, float(np.mean(est)), sd))
        last = est
    return summarize(config, config.n, last, trace=trace)


MIN_RATE_SIZES = 3
MIN_RATE_REPLICATES = 2000


def run_rate_check(config: ExperimentConfig,
                   workers: int | None = None) -> ExperimentReport:
    """Empirical E[A_N^2] over ``config.rate_check_ns`` and its log-log slope."""
    ns = sorted(set(config.rate_check_ns or ()))
    if len(ns) < MIN_RATE_SIZES:
        raise ValidationError(f"rate check needs >= {MIN_RATE_SIZES} distinct N, got {ns}")
    if config.m < MIN_RATE_REPLICATES:
        raise ValidationError(f"rate check needs m >= {MIN_RATE_REPLICATES}, got {config.m}")
    workers = default_workers() if workers is None else workers
    rate, last = [], None
    for n in ns:
        diags = _run_at(config, n, (n,), workers)
        a_n = np.array([d.a_n for d in diags])
        rate.append((n, float(np.mean(a_n * a_n))))
        last = [d.a_hat for d in diags]
    slope, intercept = np.polyfit(np.log([r[0] for r in rate]),
                                  np.log([r[1] for r in rate]), 1)
    return summarize(config, ns[-1], last, rate=rate,
                     rate_fit=(float(slope), float(intercept)))


# --------------------------------------------------------------------------
# CSV output
# --------------------------------------------------------------------------

def _f(x) -> str:
    return repr(float(x))


def _write(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


SUMMARY_HEADER = ["scheme", "H", "a", "N", "M", "seed", "mean", "sd", "kurt_raw", "kurt_gap"]


def summary_row(report: ExperimentReport) -> list:
    c = report.config
    return [c.scheme.value, _f(c.hurst), _f(c.a_true), report.n, c.m, c.seed,
            _f(report.mean), _f(report.sd), _f(report.kurtosis_raw), _f(report.kurtosis_gap)]


def write_report(report: ExperimentReport, out_dir) -> list[Path]:
    """Write every CSV the report has data for; returns the paths written."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    def put(name, header, rows):
        _write(out / name, header, rows)
        written.append(out / name)

    put("estimates.csv", ["replicate", "a_hat"],
        [(r, _f(v)) for r, v in enumerate(report.estimates)])
    put("summary.csv", SUMMARY_HEADER, [summary_row(report)])
    e, c = report.hist_edges, report.hist_counts
    put("hist.csv", ["bin_left", "bin_right", "count"],
        [(_f(e[k]), _f(e[k + 1]), int(c[k])) for k in range(len(c))])
    if report.trace is not None:
        put("trace.csv", ["N", "mean", "sd"],
            [(n, _f(mu), _f(sd)) for n, mu, sd in report.trace])
    if report.rate is not None:
        put("rate.csv", ["N", "mean_sq_an"], [(n, _f(v)) for n, v in report.rate])
        put("rate_fit.csv", ["slope", "intercept"], [[_f(v) for v in report.rate_fit]])
    return written
