import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from fracdrift.errors import DomainError, InvalidIndices, WrongScheme
from fracdrift.estimator import d_n
from fracdrift.montecarlo import replicate_rng
from fracdrift.oracles import (beta_integral_quad, density_cases, density_mass,
                               gamma_integral_quad, identity_sweep, sweep_rng)
from fracdrift.renewal import (DensityKind, beta_integral, d_n_brute_force, decompose,
                               density_function, gamma_integral, joint_density,
                               q_n_variance, q_n_weighted, r_n_exact, t_n_variance,
                               u_n_variance)
from fracdrift.sampling import deterministic_grid, jittered_grid, renewal_grid, \
    renewal_grid_from_increments


def test_r_n_examples():
    assert r_n_exact(2) == 1
    assert r_n_exact(1) == 2
    # large-N limit is 1/3
    assert abs(float(r_n_exact(10**6)) - 1 / 3) < 1e-5


def test_r_n_matches_expected_d_n():
    # E[tau_i^2] = i(i+1)/n^2 for a Gamma(i, n) time
    for n in (1, 2, 5, 17):
        mean = sum(Fraction(i * (i + 1), n * n) for i in range(1, n + 1)) / n
        assert r_n_exact(n) == mean


def test_decompose_small_grid_by_hand():
    g = renewal_grid_from_increments([0.25, 0.75])
    rep = decompose(g)
    r, t, q, u = d_n_brute_force([0.25, 0.75])
    assert rep.r_n == r == 1.0
    assert (rep.t_n, rep.q_n, rep.u_n) == pytest.approx((t, q, u), abs=1e-15)
    assert rep.d_n_reconstructed == pytest.approx((0.25**2 + 1.0) / 2, rel=1e-14)


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 120))
def test_decomposition_identity(seed, n):
    g = renewal_grid(n, np.random.default_rng(seed))
    rep = decompose(g)
    assert rep.d_n_reconstructed == pytest.approx(d_n(g), rel=1e-12)
    bf = d_n_brute_force(g.increments)
    assert (rep.t_n, rep.q_n, rep.u_n) == pytest.approx(bf[1:], rel=1e-10, abs=1e-13)


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 2000))
def test_q_rewrite(seed, n):
    g = renewal_grid(n, np.random.default_rng(seed))
    assert decompose(g).q_n == pytest.approx(q_n_weighted(g.increments), abs=1e-12)


def test_decompose_rejects_other_schemes():
    with pytest.raises(WrongScheme):
        decompose(deterministic_grid(5))
    with pytest.raises(WrongScheme):
        decompose(jittered_grid(5, np.random.default_rng(0)))


def test_variance_closed_forms_exact_at_small_n():
    # n = 1: T = t^2 - 2 with t ~ Exp(1): Var = 24 - 4 = 20
    assert t_n_variance(1) == pytest.approx(20.0)
    # n = 1: Q = 0 (weight (1)(0)), U = 0 (no pairs)
    assert q_n_variance(1) == 0.0
    assert u_n_variance(1) == 0.0
    # n = 2, brute force: U = (2/2) * w_12 * (t1 - 1/2)(t2 - 1/2), w_12 = 1
    assert u_n_variance(2) == pytest.approx((1 / 4) ** 2)


@pytest.fixture(scope="module")
def moments_1000():
    n, m = 1000, 5000
    rows = np.array([
        [getattr(decompose(renewal_grid(n, replicate_rng(31, r))), k)
         for k in ("t_n", "q_n", "u_n")]
        for r in range(m)])
    return n, rows


def test_fluctuation_terms_have_zero_mean(moments_1000):
    _, rows = moments_1000
    se = rows.std(axis=0, ddof=1) / math.sqrt(len(rows))
    assert np.all(np.abs(rows.mean(axis=0)) < 4 * se)


def test_fluctuation_variances(moments_1000):
    n, rows = moments_1000
    var = rows.var(axis=0, ddof=1)
    assert var[0] == pytest.approx(t_n_variance(n), rel=0.10)
    assert var[1] == pytest.approx(q_n_variance(n), rel=0.10)
    assert var[2] == pytest.approx(u_n_variance(n), rel=0.10)


def test_t_variance_is_ten_times_the_third_moment_formula(moments_1000):
    # a formula built on E t^4 = 3!/n^4 understates Var T by a factor of 10
    n, rows = moments_1000
    short = (2 / 6) * n * (n + 1) * (2 * n + 1) / n**6
    assert rows[:, 0].var(ddof=1) / short == pytest.approx(10.0, rel=0.10)


def test_u_variance_decays_like_inverse_square():
    ns = [250, 500, 1000]
    var = [np.var([decompose(renewal_grid(n, replicate_rng(5, n, r))).u_n
                   for r in range(2000)], ddof=1) for n in ns]
    slope = np.polyfit(np.log(ns), np.log(var), 1)[0]
    assert -2.5 <= slope <= -1.5


# ---------------------------------------------------------------- densities

def test_density_example():
    val = joint_density(DensityKind.TAU_I_TAU_NEXT, 2, 1, None, (0.5, 1.0))
    assert val == pytest.approx(4 * math.exp(-2), rel=1e-14)
    assert val == pytest.approx(0.541341, abs=5e-7)


@pytest.mark.parametrize("kind,i,j,point", [
    (DensityKind.TAU_I_GAP_NEXT, 1, None, (-0.1, 1.0)),
    (DensityKind.TAU_I_GAP_NEXT, 3, None, (0.5, -1.0)),
    (DensityKind.TAU_I_TAU_NEXT, 2, None, (1.0, 0.5)),
    (DensityKind.TAU_PREV_GAP_GAP, 2, None, (0.1, -0.2, 0.3)),
    (DensityKind.TAU_PREV_TAU_TAU, 3, None, (0.1, 0.4, 0.3)),
    (DensityKind.TAU_J_J1_I_I1, 4, 1, (0.1, 0.3, 0.2, 0.5)),
    (DensityKind.TAU_J_J1_I_I1, 4, 2, (0.1, 0.2, 0.3, 0.25)),
])
def test_density_zero_outside_support(kind, i, j, point):
    assert joint_density(kind, 3, i, j, point) == 0.0


@pytest.mark.parametrize("kind,n,i,j", [
    (DensityKind.TAU_I_GAP_NEXT, 2, 0, None),
    (DensityKind.TAU_I_TAU_NEXT, 0, 1, None),
    (DensityKind.TAU_PREV_GAP_GAP, 2, 1, None),
    (DensityKind.TAU_PREV_TAU_TAU, 2, 1, None),
    (DensityKind.TAU_J_J1_I_I1, 2, 3, 2),
    (DensityKind.TAU_J_J1_I_I1, 2, 3, None),
    (DensityKind.TAU_J_J1_I_I1, 2, 3, 0),
])
def test_density_invalid_indices(kind, n, i, j):
    with pytest.raises(InvalidIndices):
        density_function(kind, n, i, j)


def test_density_large_index_does_not_overflow():
    # the constant n^(i+1)/Gamma(i) overflows a double for i near 170
    v = joint_density(DensityKind.TAU_I_TAU_NEXT, 200, 200, None, (1.0, 1.005))
    assert math.isfinite(v) and v > 0


def test_density_normalizes_two_point_example():
    f = density_function(DensityKind.TAU_I_TAU_NEXT, 3, 1, None)
    # independent oracle: plain nested quad on the unmapped half line
    mass = quad(lambda b: quad(lambda a: f(a, b), 0, b, epsabs=1e-13)[0], 0, np.inf,
                epsabs=1e-13)[0]
    assert abs(mass - 1) < 1e-8
    assert abs(density_mass(DensityKind.TAU_I_TAU_NEXT, 3, 1) - 1) < 1e-8


@pytest.mark.parametrize("kind,n,i,j", [
    c for c in density_cases(max_index=4, max_n=3) if c[0].dim <= 3 or c[1] == 2])
def test_density_normalization_subset(kind, n, i, j):
    assert abs(density_mass(kind, n, i, j) - 1) < 1e-6


@settings(max_examples=200, deadline=None)
@given(kind=st.sampled_from(list(DensityKind)), n=st.integers(1, 6),
       i=st.integers(3, 8), pts=st.lists(st.floats(0, 5), min_size=4, max_size=4))
def test_density_nonnegative_on_support(kind, n, i, pts):
    f = density_function(kind, n, i, 1 if kind is DensityKind.TAU_J_J1_I_I1 else None)
    pts = sorted(pts)[: kind.dim]
    assert f(*pts) >= 0.0


# ---------------------------------------------------------------- identities

def test_beta_integral_examples():
    assert beta_integral(1, 0, 0) == pytest.approx(1.0, rel=1e-15)
    assert beta_integral(2, 0, 1) == pytest.approx(2.0, rel=1e-15)
    expected = math.gamma(2.5) * math.gamma(2) / math.gamma(4.5)
    assert beta_integral(1, 1.5, 1) == pytest.approx(expected, rel=1e-14)
    assert beta_integral(1, 1.5, 1) == pytest.approx(0.1142857, abs=5e-8)
    assert beta_integral_quad(1, 1.5, 1) == pytest.approx(expected, rel=1e-12)


def test_gamma_integral_examples():
    assert gamma_integral(0, 1) == pytest.approx(1.0, rel=1e-15)
    assert gamma_integral(2, 3) == pytest.approx(2 / 27, rel=1e-14)
    assert gamma_integral_quad(2, 3) == pytest.approx(2 / 27, rel=1e-12)
    assert gamma_integral(1, 2) == pytest.approx(0.25, rel=1e-15)


@pytest.mark.parametrize("args", [(0, 1, 1), (-1, 0, 0), (1, -1, 0), (1, 0, -1.5)])
def test_beta_domain(args):
    with pytest.raises(DomainError):
        beta_integral(*args)


@pytest.mark.parametrize("args", [(-1, 1), (0, 0), (1, -2)])
def test_gamma_domain(args):
    with pytest.raises(DomainError):
        gamma_integral(*args)


def test_identity_sweep_small():
    checks = identity_sweep(10, sweep_rng(3))
    assert len(checks) == 20
    assert all(c.passed for c in checks), [c for c in checks if not c.passed]
