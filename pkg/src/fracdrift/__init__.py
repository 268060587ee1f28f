"""Least-squares drift estimation for a regression with fractional Brownian
motion increment noise observed at random (jittered or renewal) times."""

__version__ = "0.1.0"

from ._kernels import BACKEND
from .errors import *  # noqa: F401,F403
from .estimator import EstimateDiagnostics, d_n, estimate
from .fbm import (GaussianPath, HurstModel, cholesky_factor, covariance,
                  covariance_matrix, sample_path, sample_paths)
from .model import ObservationSeries, read_series_csv, simulate, write_series_csv
from .montecarlo import (ExperimentConfig, ExperimentReport, kurtosis_gap,
                         run_convergence_trace, run_rate_check, run_table)
from .renewal import (DecompositionReport, DensityKind, beta_integral, decompose,
                      gamma_integral, joint_density)
from .sampling import (Scheme, TimeGrid, deterministic_grid, jittered_grid,
                       jittered_grid_from_offsets, make_grid, renewal_grid,
                       renewal_grid_from_increments)
