import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate as sint
from scipy import special

from robustwpt import numerics
from robustwpt.exceptions import (DomainError, QuadratureError, RootFindingError,
                                  SingularJacobianError)
from robustwpt.nominal import Exponential
from robustwpt.worstcase import _symmetrized_equations, xi_prime


# --- exponential integral ----------------------------------------------------

def test_e1_at_one():
    ref = sint.quad(lambda t: math.exp(-t) / t, 1, np.inf, epsabs=1e-13)[0]
    assert abs(numerics.exp_integral_e1(1.0) - ref) < 1e-12
    assert abs(numerics.exp_integral_e1(1.0) - 0.2193839) < 1e-7


def test_e1_decreasing_and_small_argument():
    assert numerics.exp_integral_e1(2.0) < numerics.exp_integral_e1(1.0)
    x = 1e-8
    assert abs(numerics.exp_integral_e1(x) - (-numerics.EULER_GAMMA - math.log(x))) < 1e-6


@pytest.mark.parametrize("x", np.geomspace(1e-6, 50, 60))
def test_e1_relative_error(x):
    ref = special.exp1(x)
    assert abs(numerics.exp_integral_e1(x) - ref) <= 1e-12 * ref


def test_e1_switch_point_is_continuous():
    s = numerics.E1_SWITCH
    lo, hi = numerics.exp_integral_e1(np.nextafter(s, 0)), numerics.exp_integral_e1(s)
    assert abs(lo - hi) < 1e-14


def test_e1_bounds_on_log_grid():
    x = np.geomspace(1e-6, 50, 400)
    e1 = numerics.exp_integral_e1(x)
    upper = np.exp(-x) / x
    assert np.all(upper * x / (x + 1) < e1)
    assert np.all(e1 < upper)


def test_e1_scaled_and_log_forms():
    x = np.array([0.3, 2.0, 40.0])
    assert np.allclose(numerics.exp_scaled_e1(x), special.exp1(x) * np.exp(x), rtol=1e-13)
    big = 800.0  # e^x overflows, the scaled value does not
    assert abs(numerics.exp_scaled_e1(big) * big - 1) < 2e-3
    # exp(-5000) underflows, but E1 ~ -gamma - ln x stays representable
    assert abs(numerics.exp_integral_e1_at_log(-5000.0) - (5000.0 - numerics.EULER_GAMMA)) < 1e-9
    assert numerics.exp_integral_e1_at_log(math.log(2.0)) == pytest.approx(special.exp1(2.0),
                                                                           rel=1e-13)


@pytest.mark.parametrize("bad", [0.0, -1.0, math.inf, math.nan])
def test_e1_domain(bad):
    with pytest.raises(DomainError):
        numerics.exp_integral_e1(bad)


# --- Lambert W and Wright omega ---------------------------------------------

def test_lambert_w_examples():
    assert numerics.lambert_w("principal", 0.0) == 0.0
    assert numerics.lambert_w("principal", math.e) == pytest.approx(1.0, abs=1e-15)
    assert abs(numerics.lambert_w("principal", 1.0) - 0.5671433) < 1e-7
    assert numerics.lambert_w("minus_one", -math.exp(-1.0)) == pytest.approx(-1.0, abs=1e-7)


def test_lambert_w_matches_scipy():
    for x in (-0.3, -0.1, 0.5, 10.0, 1e6):
        assert numerics.lambert_w("principal", x) == pytest.approx(special.lambertw(x, 0).real,
                                                                   rel=1e-14)
    for x in (-0.35, -0.2, -1e-3, -1e-12):
        assert numerics.lambert_w("minus_one", x) == pytest.approx(special.lambertw(x, -1).real,
                                                                   rel=1e-13)


@pytest.mark.parametrize("branch,x", [("principal", -0.5), ("minus_one", 0.1),
                                      ("minus_one", -0.5), ("other", 1.0),
                                      ("principal", math.inf)])
def test_lambert_w_domain(branch, x):
    with pytest.raises(DomainError):
        numerics.lambert_w(branch, x)


@settings(max_examples=300, deadline=None)
@given(st.floats(min_value=-1 / math.e, max_value=1e8))
def test_lambert_w_principal_residual(x):
    w = numerics.lambert_w("principal", x)
    assert w >= -1.0
    assert abs(w * math.exp(w) - x) <= 1e-13 * max(1.0, abs(x))


@settings(max_examples=300, deadline=None)
@given(st.floats(min_value=-1 / math.e, max_value=-1e-300))
def test_lambert_w_minus_one_residual(x):
    w = numerics.lambert_w("minus_one", x)
    assert w <= -1.0
    assert abs(w * math.exp(w) - x) <= 1e-13 * max(1.0, abs(x))


def test_wright_omega_examples():
    assert numerics.wright_omega(1.0) == pytest.approx(1.0, abs=1e-15)
    assert abs(numerics.wright_omega(2.0) - numerics.lambert_w("principal", math.e**2)) < 1e-12
    w = numerics.wright_omega(1000.0)
    assert abs(w + math.log(w) - 1000.0) < 1e-9
    assert 993.0 < w < 993.2


def test_wright_omega_far_arguments():
    c = np.array([-800.0, -50.0, 1e5, 1e300])
    w = numerics.wright_omega(c)
    assert np.all(w >= 0) and np.all(np.isfinite(w))
    assert w[1] == pytest.approx(math.exp(-50.0), rel=1e-14)
    lw = numerics.log_wright_omega(c)
    assert np.allclose(lw, c - w, rtol=0, atol=0)
    assert lw[0] == pytest.approx(-800.0, rel=1e-15)


@settings(max_examples=300, deadline=None)
@given(st.floats(min_value=-700, max_value=1e12))
def test_wright_omega_residual(c):
    w = numerics.wright_omega(c)
    assert w > 0
    assert abs(w + math.log(w) - c) <= 1e-12 * max(1.0, abs(c))


def test_wright_omega_vectorised_matches_scalar():
    c = np.linspace(-20, 20, 41)
    assert np.array_equal(numerics.wright_omega(c), [numerics.wright_omega(v) for v in c])


def test_wright_omega_rejects_nonfinite():
    with pytest.raises(DomainError):
        numerics.wright_omega(math.nan)


# --- quadrature -----------------------------------------------------------

def test_integrate_examples():
    r = numerics.integrate(lambda x: np.exp(-x), 0.0)
    assert abs(r.value - 1) < 1e-10 and r.abs_error_estimate <= 1e-9 and r.evaluations >= 1
    assert abs(numerics.integrate(lambda x: x * np.exp(-x), 0.0).value - 1) < 1e-10
    v = numerics.integrate(lambda x: np.exp(-x) / (x + 1), 0.0).value
    assert abs(v - math.e * numerics.exp_integral_e1(1.0)) < 1e-9
    assert abs(v - 0.596347) < 1e-6


def test_integrate_finite_with_kink():
    r = numerics.integrate(lambda x: np.abs(x - 0.3), 0.0, 1.0, 1e-12, points=[0.3])
    assert r.value == pytest.approx(0.3**2 / 2 + 0.7**2 / 2, abs=1e-13)


def test_integrate_error_estimate_respects_tol():
    for tol in (1e-6, 1e-9, 1e-12):
        r = numerics.integrate(lambda x: np.cos(3 * x) ** 2, 0.0, 4.0, tol)
        exact = 2.0 + math.sin(24.0) / 12.0
        assert r.abs_error_estimate <= tol
        assert abs(r.value - exact) <= 10 * tol + 1e-15


def test_integrate_budget_exhausted():
    with pytest.raises(QuadratureError):
        numerics.integrate(lambda x: np.sin(1.0 / x), 1e-9, 1.0, 1e-14, max_intervals=20)


def test_integrate_domain():
    with pytest.raises(DomainError):
        numerics.integrate(np.exp, 1.0, 0.0)
    with pytest.raises(DomainError):
        numerics.integrate(np.exp, 0.0, 1.0, tol=0.0)
    assert numerics.integrate(np.exp, 2.0, 2.0).value == 0.0


@settings(max_examples=40, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0.2, 4.0), st.floats(0.1, 5.0))
def test_integrate_linearity(a, b, k, w):
    f = lambda x: np.exp(-k * x) * np.cos(w * x)  # noqa: E731
    g = lambda x: 1.0 / (1.0 + x * x)  # noqa: E731
    If, Ig = numerics.integrate(f, 0.0), numerics.integrate(g, 0.0)
    Ih = numerics.integrate(lambda x: a * f(x) + b * g(x), 0.0)
    bound = abs(a) * If.abs_error_estimate + abs(b) * Ig.abs_error_estimate + Ih.abs_error_estimate
    assert abs(Ih.value - a * If.value - b * Ig.value) <= bound + 1e-14


def test_cumulative_integral():
    xs = np.linspace(0, 3, 31)
    c = numerics.cumulative_integral(lambda x: np.exp(-x), xs, 1e-12)
    assert np.allclose(c, 1 - np.exp(-xs), atol=1e-12)
    with pytest.raises(DomainError):
        numerics.cumulative_integral(np.exp, [1.0, 0.0])


# --- root finding -----------------------------------------------------------

def test_solve_scalar_sqrt2():
    r = numerics.solve_scalar(lambda x: x * x - 2, (0.0, 2.0), 1e-14)
    assert abs(r.root - math.sqrt(2)) < 1e-12
    assert r.bracket[0] <= r.root <= r.bracket[1]


def test_solve_scalar_expands_bracket():
    r = numerics.solve_scalar(lambda x: x - math.log(x) - 2, (1.0, 1.5), 1e-13, lower=1.0)
    assert abs(r.root - 3.1461932206) < 1e-6


def test_solve_scalar_xi_peak():
    r = numerics.solve_scalar(lambda s: xi_prime(s, 1.0), (0.1, 2.0), 1e-12, lower=1e-6)
    assert abs(r.root - 0.46) < 0.01


def test_solve_scalar_no_sign_change():
    with pytest.raises(RootFindingError):
        numerics.solve_scalar(lambda x: x * x + 1, (0.0, 1.0), max_expand=10)


@settings(max_examples=100, deadline=None)
@given(st.floats(-50, 50), st.floats(0.1, 10))
def test_solve_scalar_root_inside_bracket(c, scale):
    # atan never saturates in floating point, so the bracket always has a direction
    r = numerics.solve_scalar(lambda x: math.atan((x - c) / scale), (-1.0, 1.0), 1e-12)
    assert abs(math.atan((r.root - c) / scale)) <= 1e-12
    lo, hi = r.bracket
    assert lo <= r.root <= hi


def test_solve_2d_polynomial_system():
    rx, ry = numerics.solve_2d(lambda x, y: (x + y - 3, x * y - 2), (0.5, 0.5), 1e-12)
    sol = (rx.root, ry.root)
    assert min(abs(sol[0] - 1) + abs(sol[1] - 2), abs(sol[0] - 2) + abs(sol[1] - 1)) < 1e-10


def test_solve_2d_keeps_first_positive():
    seen = []

    def G(s, m):
        seen.append(s)
        return (s * s - 4.0, m - s)

    rs, rm = numerics.solve_2d(G, (0.1, 0.0), 1e-12)
    assert rs.root == pytest.approx(2.0, abs=1e-10)
    assert min(seen) > 0


def test_solve_2d_singular_jacobian():
    with pytest.raises(SingularJacobianError) as info:
        numerics.solve_2d(lambda x, y: (1.0 + 0 * x, 1.0 + 0 * y), (1.0, 1.0))
    assert "jacobian" in info.value.diagnostics


def test_solve_2d_symmetrized_system_small_and_moderate_radius():
    E = Exponential(1.0)
    rs, rm = numerics.solve_2d(_symmetrized_equations(E, 0.1), (1.5, 0.0), 1e-10)
    assert abs(rs.residual) < 1e-8 and abs(rm.residual) < 1e-8
    rs, rm = numerics.solve_2d(_symmetrized_equations(E, 1e-6), (100.0, 0.0), 1e-10)
    s, mu = rs.root, rm.root
    mean = numerics.integrate(lambda x: x * np.exp(-x) / numerics.wright_omega(2 * (x + mu) / s),
                              0.0, tol=1e-12).value
    assert abs(mean - 1.0) < 1e-2
