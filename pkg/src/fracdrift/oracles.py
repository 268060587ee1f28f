"""Quadrature cross-checks for the renewal closed forms.

Everything here integrates numerically with QUADPACK's adaptive
Gauss-Kronrod routine (``scipy.integrate.quad``) and never calls a Gamma
function, so it stays independent of the closed forms it checks.  Half-line
integrals are mapped to [0, 1) with x = u / (1 - u).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .renewal import DensityKind, beta_integral, density_function, gamma_integral

QUAD_TOL = 1e-12
DENSITY_TOL = 1e-6
IDENTITY_RTOL = 1e-10


def _quad(f, lo, hi, tol=QUAD_TOL, relative_only=False):
    # Identity values can be ~1e-8, so an absolute floor would cap their
    # relative accuracy; those callers ask for a purely relative target.
    # A 1e-12 request sits near double-precision roundoff, so QUADPACK may
    # warn that it cannot certify it; the callers compare results themselves.
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        return quad(f, lo, hi, epsabs=0.0 if relative_only else tol, epsrel=tol, limit=200)[0]


def integrate_half_line(f, tol=QUAD_TOL, relative_only=False) -> float:
    """int_0^inf f(x) dx via the substitution x = u / (1 - u)."""

    def g(u):
        if u >= 1.0:
            return 0.0
        v = 1.0 - u
        return f(u / v) / (v * v)

    return _quad(g, 0.0, 1.0, tol, relative_only)


def density_mass(kind, n: int, i: int, j: int | None = None, tol=QUAD_TOL) -> float:
    """Total mass of one density row, by nested adaptive quadrature.

    Ordered rows (tau_a <= tau_b <= ...) are integrated over their simplex
    with the outermost variable on the half line; product rows over the
    orthant.
    """
    kind = DensityKind(kind)
    f = density_function(kind, n, i, j)

    if kind is DensityKind.TAU_I_GAP_NEXT:
        return integrate_half_line(
            lambda b: integrate_half_line(lambda a: f(a, b), tol), tol)
    if kind is DensityKind.TAU_I_TAU_NEXT:
        return integrate_half_line(
            lambda b: _quad(lambda a: f(a, b), 0.0, b, tol), tol)
    if kind is DensityKind.TAU_PREV_GAP_GAP:
        return integrate_half_line(
            lambda c: integrate_half_line(
                lambda b: integrate_half_line(lambda a: f(a, b, c), tol), tol), tol)
    if kind is DensityKind.TAU_PREV_TAU_TAU:
        return integrate_half_line(
            lambda c: _quad(
                lambda b: _quad(lambda a: f(a, b, c), 0.0, b, tol), 0.0, c, tol), tol)
    return integrate_half_line(
        lambda d: _quad(
            lambda c: _quad(
                lambda b: _quad(lambda a: f(a, b, c, d), 0.0, b, tol),
                0.0, c, tol),
            0.0, d, tol),
        tol)


def beta_integral_quad(a: float, b: float, c: float) -> float:
    """int_0^a (a - x)^b x^c dx, split at a/2 so each piece has one endpoint
    singularity for QUADPACK's extrapolation to deal with."""
    f = lambda x: (a - x) ** b * x**c
    return (_quad(f, 0.0, 0.5 * a, relative_only=True)
            + _quad(f, 0.5 * a, a, relative_only=True))


def gamma_integral_quad(a: float, b: float) -> float:
    """int_0^inf x^a e^(-b x) dx, with the possible singularity at 0 isolated."""
    f = lambda x: x**a * math.exp(-b * x)
    head = _quad(f, 0.0, 1.0, relative_only=True)
    return head + integrate_half_line(lambda x: f(x + 1.0), relative_only=True)


@dataclass(frozen=True)
class DensityCheck:
    kind: DensityKind
    n: int
    i: int
    j: int | None
    mass: float

    @property
    def abs_err(self) -> float:
        return abs(self.mass - 1.0)

    @property
    def passed(self) -> bool:
        return self.abs_err < DENSITY_TOL


@dataclass(frozen=True)
class IdentityCheck:
    identity: str
    params: tuple
    closed_form: float
    quadrature: float

    @property
    def rel_err(self) -> float:
        return abs(self.closed_form - self.quadrature) / abs(self.quadrature)

    @property
    def passed(self) -> bool:
        return self.rel_err < IDENTITY_RTOL


def density_cases(max_index: int, max_n: int):
    """Every (kind, n, i, j) with indices <= max_index and 1 <= n <= max_n."""
    for n in range(1, max_n + 1):
        for i in range(1, max_index + 1):
            yield DensityKind.TAU_I_GAP_NEXT, n, i, None
            yield DensityKind.TAU_I_TAU_NEXT, n, i, None
        for i in range(2, max_index + 1):
            yield DensityKind.TAU_PREV_GAP_GAP, n, i, None
            yield DensityKind.TAU_PREV_TAU_TAU, n, i, None
        for i in range(3, max_index + 1):
            for j in range(1, i - 1):
                yield DensityKind.TAU_J_J1_I_I1, n, i, j


def check_densities(max_index: int = 5, max_n: int = 5) -> list[DensityCheck]:
    return [DensityCheck(kind, n, i, j, density_mass(kind, n, i, j))
            for kind, n, i, j in density_cases(max_index, max_n)]


def identity_sweep(points: int, rng) -> list[IdentityCheck]:
    """Random parameters inside both identities' domains, ``points`` each.

    Exponents are kept >= -0.5 so QUADPACK can reach the 1e-10 target on the
    endpoint singularities.
    """
    out = []
    for _ in range(points):
        a = float(rng.uniform(0.1, 5.0))
        b = float(rng.uniform(-0.5, 4.0))
        c = float(rng.uniform(-0.5, 4.0))
        out.append(IdentityCheck("beta", (a, b, c), beta_integral(a, b, c),
                                 beta_integral_quad(a, b, c)))
    for _ in range(points):
        a = float(rng.uniform(-0.5, 6.0))
        b = float(rng.uniform(0.2, 5.0))
        out.append(IdentityCheck("gamma", (a, b), gamma_integral(a, b),
                                 gamma_integral_quad(a, b)))
    return out


def sweep_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)
