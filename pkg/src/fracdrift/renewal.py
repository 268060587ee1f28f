"""Closed-form machinery for renewal sampling with Exponential(n) gaps.

Covers three things:

* the split of the mean squared time ``D = mean(tau^2)`` into its expectation
  ``R`` and three zero-mean fluctuation terms ``T``, ``Q``, ``U`` built from
  the i.i.d. gaps ``t_i`` (``decompose``), together with their exact moments;
* the joint densities of consecutive / separated renewal times
  (``joint_density``);
* the two integral identities used to evaluate moments against those
  densities (``beta_integral``, ``gamma_integral``).

Writing ``w_ij = n - max(i, j) + 1``, ``D = (1/n) sum_ij w_ij t_i t_j`` and

    R = E[D]
    T = (1/n) sum_i w_ii (t_i^2 - E t_i^2)
    Q = (1/n) sum_{i != j} w_ij (t_i E t_j + E t_i t_j - 2 E t_i E t_j)
    U = (1/n) sum_{i != j} w_ij (t_i - E t_i)(t_j - E t_j)

with ``E t = 1/n`` and ``E t^2 = 2/n^2``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._kernels import kernels
from .errors import DomainError, InvalidIndices, ValidationError, WrongScheme
from .sampling import Scheme, TimeGrid


@dataclass(frozen=True)
class DecompositionReport:
    r_n: float
    t_n: float
    q_n: float
    u_n: float
    d_n_reconstructed: float
    n: int


def r_n_exact(n: int) -> Fraction:
    """E[D] = n(n+1)/n^3 + n(n-1)(n+1)/(3 n^3), as an exact rational."""
    n = Fraction(n)
    return n * (n + 1) / n**3 + n * (n - 1) * (n + 1) / (3 * n**3)


def decompose(grid: TimeGrid) -> DecompositionReport:
    if grid.scheme is not Scheme.RENEWAL or grid.increments is None:
        raise WrongScheme(f"decomposition needs a renewal grid, got {grid.scheme.value}")
    t = np.ascontiguousarray(grid.increments)
    r = float(r_n_exact(len(t)))
    t_n, q_n, u_n = kernels.renewal_terms(t)
    return DecompositionReport(r, t_n, q_n, u_n, r + t_n + q_n + u_n, len(t))


def q_n_weighted(increments) -> float:
    """Q as a weighted sum of centred X_i = n t_i ~ Exp(1).

    Q = sum_i (n t_i - 1) (n - i + 1)(n + i - 2) / n^3
    """
    t = np.asarray(increments, dtype=np.float64)
    n = len(t)
    i = np.arange(1, n + 1, dtype=np.float64)
    return float(np.sum((n * t - 1.0) * (n - i + 1.0) * (n + i - 2.0)) / n**3)


def d_n_brute_force(increments) -> tuple[float, float, float, float]:
    """O(n^2) evaluation of (R, T, Q, U) straight from the double sums."""
    t = np.asarray(increments, dtype=np.float64)
    n = len(t)
    idx = np.arange(1, n + 1)
    w = n - np.maximum.outer(idx, idx) + 1.0
    et, et2 = 1.0 / n, 2.0 / n**2
    off = ~np.eye(n, dtype=bool)
    r = float(r_n_exact(n))
    tt = np.sum(np.diag(w) * (t * t - et2)) / n
    q = np.sum((np.add.outer(t * et, et * t) - 2 * et * et) * w * off) / n
    u = np.sum(np.outer(t - et, t - et) * w * off) / n
    return r, float(tt), float(q), float(u)


# Exact second moments of the fluctuation terms.  T uses E t^4 = 4!/n^4.

def t_n_variance(n: int) -> float:
    """Var T = (1/n^2) sum_i (n-i+1)^2 Var(t^2) = 20/n^6 * sum_k k^2."""
    return 20.0 * n * (n + 1) * (2 * n + 1) / (6.0 * n**6)


def q_n_variance(n: int) -> float:
    i = np.arange(1, n + 1, dtype=np.float64)
    a = (n - i + 1.0) * (n + i - 2.0) / n**3
    return float(np.sum(a * a))


def u_n_variance(n: int) -> float:
    """Var U = (4/n^2) sum_{i<j} w_ij^2 Var(t)^2, Var(t) = 1/n^2."""
    j = np.arange(1, n + 1, dtype=np.float64)
    pairs = (j - 1.0) * (n - j + 1.0) ** 2  # for each j, (j-1) partners i < j
    return float(4.0 * np.sum(pairs) / n**6)


# --------------------------------------------------------------------------
# joint densities of renewal times
# --------------------------------------------------------------------------

class DensityKind(str, enum.Enum):
    """Rows of the joint-density table, named by their variables."""

    TAU_I_GAP_NEXT = "tau_i,t_i+1"              # (a, b) = (tau_i, t_{i+1})
    TAU_I_TAU_NEXT = "tau_i,tau_i+1"            # (a, b) = (tau_i, tau_{i+1})
    TAU_PREV_GAP_GAP = "tau_i-1,t_i,t_i+1"      # (a, b, c)
    TAU_PREV_TAU_TAU = "tau_i-1,tau_i,tau_i+1"  # (a, b, c)
    TAU_J_J1_I_I1 = "tau_j,tau_j+1,tau_i,tau_i+1"  # (a, b, c, d)

    @property
    def dim(self) -> int:
        return {self.TAU_I_GAP_NEXT: 2, self.TAU_I_TAU_NEXT: 2,
                self.TAU_PREV_GAP_GAP: 3, self.TAU_PREV_TAU_TAU: 3,
                self.TAU_J_J1_I_I1: 4}[self]


def _check_density_args(kind, n, i, j):
    if n < 1:
        raise InvalidIndices(f"n must be >= 1, got {n}")
    if kind in (DensityKind.TAU_I_GAP_NEXT, DensityKind.TAU_I_TAU_NEXT):
        if i < 1:
            raise InvalidIndices(f"row {kind.value} needs i >= 1, got {i}")
    elif kind in (DensityKind.TAU_PREV_GAP_GAP, DensityKind.TAU_PREV_TAU_TAU):
        if i < 2:
            raise InvalidIndices(f"row {kind.value} needs i >= 2 (Gamma(i-1) pole), got {i}")
    else:
        if j is None or j < 1 or i - j < 2:
            raise InvalidIndices(
                f"row {kind.value} needs j >= 1 and i - j >= 2, got i={i}, j={j}")


def density_function(kind, n: int, i: int, j: int | None = None):
    """Return ``f(*point)`` for one table row with the constants folded in.

    The normalising constant is computed through ``lgamma`` so that large
    indices do not overflow; ``f`` returns 0 outside the row's support.
    """
    kind = DensityKind(kind)
    _check_density_args(kind, n, i, j)
    exp, log = math.exp, math.log
    log_n = log(n)

    if kind is DensityKind.TAU_I_GAP_NEXT:
        c0, k = (i + 1) * log_n - math.lgamma(i), i - 1

        def f(a, b):
            if a < 0 or b < 0 or (k and a == 0):
                return 0.0
            return exp(c0 + (k * log(a) if k else 0.0) - n * (a + b))
    elif kind is DensityKind.TAU_I_TAU_NEXT:
        c0, k = (i + 1) * log_n - math.lgamma(i), i - 1

        def f(a, b):
            if not 0 <= a <= b or (k and a == 0):
                return 0.0
            return exp(c0 + (k * log(a) if k else 0.0) - n * b)
    elif kind is DensityKind.TAU_PREV_GAP_GAP:
        c0, k = (i + 1) * log_n - math.lgamma(i - 1), i - 2

        def f(a, b, c):
            if a < 0 or b < 0 or c < 0 or (k and a == 0):
                return 0.0
            return exp(c0 + (k * log(a) if k else 0.0) - n * (a + b + c))
    elif kind is DensityKind.TAU_PREV_TAU_TAU:
        c0, k = (i + 1) * log_n - math.lgamma(i - 1), i - 2

        def f(a, b, c):
            if not 0 <= a <= b <= c or (k and a == 0):
                return 0.0
            return exp(c0 + (k * log(a) if k else 0.0) - n * c)
    else:
        c0 = (i + 1) * log_n - math.lgamma(j) - math.lgamma(i - j - 1)
        k1, k2 = j - 1, i - j - 2

        def f(a, b, c, d):
            if not 0 <= a <= b <= c <= d or (k1 and a == 0) or (k2 and c == b):
                return 0.0
            return exp(c0 + (k1 * log(a) if k1 else 0.0)
                       + (k2 * log(c - b) if k2 else 0.0) - n * d)
    f.dim = kind.dim
    return f


def joint_density(kind, n: int, i: int, j: int | None, point) -> float:
    """Closed-form joint density of renewal times with Exp(n) gaps.

    ``kind`` picks the row (see ``DensityKind``); ``i`` is the later index and
    ``j`` the earlier one for the four-variable row.  Points outside the
    support give 0.
    """
    f = density_function(kind, n, i, j)
    point = tuple(float(v) for v in point)
    if len(point) != f.dim:
        raise ValidationError(f"row {DensityKind(kind).value} takes {f.dim} "
                              f"coordinates, got {len(point)}")
    return f(*point)


# --------------------------------------------------------------------------
# integral identities
# --------------------------------------------------------------------------

def beta_integral(a: float, b: float, c: float) -> float:
    """int_0^a (a - x)^b x^c dx = G(b+1) G(c+1) / G(b+c+2) * a^(b+c+1)."""
    if not (a > 0 and b > -1 and c > -1):
        raise DomainError(f"need a > 0, b > -1, c > -1; got a={a}, b={b}, c={c}")
    log_val = (math.lgamma(b + 1) + math.lgamma(c + 1) - math.lgamma(b + c + 2)
               + (b + c + 1) * math.log(a))
    return math.exp(log_val)


def gamma_integral(a: float, b: float) -> float:
    """int_0^inf x^a e^(-b x) dx = b^(-a-1) G(a+1)."""
    if not (a > -1 and b > 0):
        raise DomainError(f"need a > -1, b > 0; got a={a}, b={b}")
    return math.exp(math.lgamma(a + 1) - (a + 1) * math.log(b))


__all__ = [
    "DecompositionReport", "DensityKind", "beta_integral", "d_n_brute_force",
    "decompose", "density_function", "gamma_integral", "joint_density",
    "q_n_variance", "q_n_weighted", "r_n_exact",
    "t_n_variance", "u_n_variance",
]
