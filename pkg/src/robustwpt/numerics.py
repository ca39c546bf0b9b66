"""Special functions, quadrature and root finding used by every solver.

Everything here is a pure function of its inputs.  Array-valued special
functions accept scalars or numpy arrays and return the same shape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .exceptions import (
    ConvergenceError,
    DomainError,
    QuadratureError,
    RootFindingError,
    SingularJacobianError,
)

EULER_GAMMA = 0.57721566490153286060651209008240243
_EPS = np.finfo(float).eps
_INV_E = math.exp(-1.0)

# Switch point between the power series and the continued fraction for E1.
E1_SWITCH = 1.0

DEFAULT_QUAD_TOL = 1e-9
DEFAULT_ROOT_TOL = 1e-10
DEFAULT_SYSTEM_TOL = 1e-8


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error_estimate: float
    evaluations: int


@dataclass(frozen=True)
class RootResult:
    root: float
    residual: float
    iterations: int
    bracket: Optional[Tuple[float, float]] = None


# ---------------------------------------------------------------------------
# Exponential integral


def _e1_series_tail(x):
    # sum_{k>=1} (-1)^{k+1} x^k / (k k!), accurate for 0 <= x <= 1
    term = np.array(x, dtype=float, copy=True)
    total = term.copy()
    for k in range(2, 30):
        term = -term * x / k
        total = total + term / k
    return total


def _e1_scaled_cf(x):
    # e^x E1(x) by modified Lentz evaluation of the continued fraction, x >= 1
    tiny = 1e-300
    b = x + 1.0
    c = np.full_like(x, 1.0 / tiny)
    d = 1.0 / b
    h = d.copy()
    for i in range(1, 500):
        an = -float(i * i)
        b = b + 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        delta = c * d
        h = h * delta
        if np.all(np.abs(delta - 1.0) < 1e-16):
            break
    return h


def _check_e1_arg(x):
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)) or np.any(x <= 0):
        raise DomainError("E1 is defined here only for finite x > 0")
    return x


def _maybe_scalar(values, like):
    return float(values) if np.ndim(like) == 0 else values


def exp_integral_e1(x):
    """Exponential integral E1(x) = int_x^inf e^{-t}/t dt for x > 0."""
    xa = _check_e1_arg(x)
    out = np.empty_like(xa)
    small = xa < E1_SWITCH
    if np.any(small):
        xs = xa[small]
        out[small] = -EULER_GAMMA - np.log(xs) + _e1_series_tail(xs)
    if np.any(~small):
        xl = xa[~small]
        out[~small] = _e1_scaled_cf(xl) * np.exp(-xl)
    return _maybe_scalar(out, x)


def exp_scaled_e1(x):
    """e^x * E1(x), finite for arguments where e^x alone would overflow."""
    xa = _check_e1_arg(x)
    out = np.empty_like(xa)
    small = xa < E1_SWITCH
    if np.any(small):
        xs = xa[small]
        out[small] = np.exp(xs) * (-EULER_GAMMA - np.log(xs) + _e1_series_tail(xs))
    if np.any(~small):
        out[~small] = _e1_scaled_cf(xa[~small])
    return _maybe_scalar(out, x)


def exp_integral_e1_at_log(log_x: float) -> float:
    """E1(exp(log_x)); stays accurate when exp(log_x) underflows."""
    if not math.isfinite(log_x):
        raise DomainError("log argument must be finite")
    if log_x < math.log(E1_SWITCH):
        x = math.exp(log_x)
        return -EULER_GAMMA - log_x + float(_e1_series_tail(np.float64(x)))
    return float(exp_integral_e1(math.exp(log_x)))


# ---------------------------------------------------------------------------
# Lambert W and Wright omega


def lambert_w(branch: str, x: float) -> float:
    """Real Lambert W: the w on ``branch`` ('principal' or 'minus_one') with w e^w = x."""
    x = float(x)
    if not math.isfinite(x):
        raise DomainError("lambert_w needs a finite argument")
    if branch not in ("principal", "minus_one"):
        raise DomainError(f"unknown branch {branch!r}")
    # distance from the branch point, tolerant of rounding in -1/e
    p2 = 2.0 * (math.e * x + 1.0)
    if p2 < -1e-14:
        raise DomainError("lambert_w needs x >= -1/e")
    if branch == "minus_one" and x >= 0:
        raise DomainError("minus_one branch needs -1/e <= x < 0")
    if x == 0.0:
        return 0.0
    p = math.sqrt(max(p2, 0.0))
    if p < 1e-7:
        return -1.0 + p if branch == "principal" else -1.0 - p

    if branch == "principal":
        if x < -0.25:
            w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p**3
        elif x < 3.0:
            w = math.log1p(x) * (1.0 - math.log1p(math.log1p(x)) / (2.0 + math.log1p(x)))
        else:
            l1 = math.log(x)
            l2 = math.log(l1)
            w = l1 - l2 + l2 / l1
    else:
        if x < -0.25:
            w = -1.0 - p - p * p / 3.0 - 11.0 / 72.0 * p**3
        else:
            l1 = math.log(-x)
            l2 = math.log(-l1)
            w = l1 - l2 + l2 / l1

    for _ in range(100):
        ew = math.exp(w)
        f = w * ew - x
        wp1 = w + 1.0
        if wp1 == 0.0:
            break
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        if denom == 0.0:
            break
        dw = f / denom
        w_new = w - dw
        if branch == "principal" and w_new < -1.0:
            w_new = 0.5 * (w - 1.0)
        if branch == "minus_one" and w_new > -1.0:
            w_new = 0.5 * (w - 1.0)
        if abs(w_new - w) <= 4.0 * _EPS * max(1.0, abs(w_new)):
            w = w_new
            break
        w = w_new
    return w


def wright_omega(c):
    """Wright omega function: the positive omega with omega + ln(omega) = c.

    Equal to W0(exp(c)) but never forms exp(c), so it is usable for
    arguments far beyond the floating-point exponent range.
    """
    ca = np.asarray(c, dtype=float)
    if not np.all(np.isfinite(ca)):
        raise DomainError("wright_omega needs finite arguments")
    # Winitzki-type starting value, uniform over the real line
    ell = np.logaddexp(0.0, ca)
    with np.errstate(divide="ignore"):
        w0 = ell * (1.0 - np.log1p(ell) / (2.0 + ell))
        y = np.where(ca < -30.0, ca, np.log(w0))
    # Newton on y = ln(omega): e^y + y - c = 0, convex and increasing in y
    for _ in range(8):
        ey = np.exp(y)
        step = (ey + y - ca) / (ey + 1.0)
        y = y - step
        if np.all(np.abs(step) <= 2.0 * _EPS * np.maximum(1.0, np.abs(y))):
            break
    out = np.exp(y)
    return _maybe_scalar(out, c)


def log_wright_omega(c):
    """ln(wright_omega(c)) computed as c - omega, finite even where omega underflows."""
    ca = np.asarray(c, dtype=float)
    return _maybe_scalar(ca - np.asarray(wright_omega(ca)), c)


# ---------------------------------------------------------------------------
# Quadrature

_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KW = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GW = np.zeros(15)
_GW[[1, 3, 5]] = _WG[:3]
_GW[[9, 11, 13]] = _WG[2::-1]
_GW[7] = _WG[3]


def _gk15(func, lo, hi):
    """Gauss-Kronrod 7/15 on each interval [lo_i, hi_i]; one vectorised call."""
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    pts = mid[:, None] + half[:, None] * _NODES[None, :]
    vals = np.asarray(func(pts.ravel()), dtype=float).reshape(pts.shape)
    if not np.all(np.isfinite(vals)):
        raise QuadratureError("integrand returned a non-finite value",
                              {"x": pts[~np.isfinite(vals)][:5].tolist()})
    kron = half * (vals @ _KW)
    gauss = half * (vals @ _GW)
    absint = np.abs(half) * (np.abs(vals) @ _KW)
    err = np.maximum(np.abs(kron - gauss), 50.0 * _EPS * absint)
    return kron, err, pts.size


def _adaptive(func, edges, tol, rtol, max_intervals):
    lo = np.asarray(edges[:-1], dtype=float)
    hi = np.asarray(edges[1:], dtype=float)
    val, err, evals = _gk15(func, lo, hi)
    while True:
        total = err.sum()
        target = max(tol, rtol * abs(val.sum()))
        if total <= target:
            break
        n = lo.size
        if n >= max_intervals:
            raise QuadratureError(
                f"error estimate {total:.3g} above tolerance {target:.3g} "
                f"after {n} subintervals", {"value": float(val.sum()), "error": float(total)})
        width_ok = (hi - lo) > 64.0 * _EPS * np.maximum(np.abs(lo), np.abs(hi))
        pick = (err > target / n) & (err >= 0.25 * err.max()) & width_ok
        if not np.any(pick):
            raise QuadratureError(
                f"error estimate {total:.3g} stalled at roundoff above {target:.3g}",
                {"value": float(val.sum()), "error": float(total)})
        plo, phi = lo[pick], hi[pick]
        pmid = 0.5 * (plo + phi)
        new_lo = np.concatenate([plo, pmid])
        new_hi = np.concatenate([pmid, phi])
        nv, ne, k = _gk15(func, new_lo, new_hi)
        evals += k
        keep = ~pick
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        val = np.concatenate([val[keep], nv])
        err = np.concatenate([err[keep], ne])
    return float(np.sum(np.sort(val))), float(err.sum()), evals


def integrate(
    f: Callable,
    a: float,
    b: float = math.inf,
    tol: float = DEFAULT_QUAD_TOL,
    *,
    points: Sequence[float] = (),
    scale: float = 1.0,
    rtol: float = 0.0,
    max_intervals: int = 20000,
) -> QuadratureResult:
    """Adaptive Gauss-Kronrod quadrature of a vectorised ``f`` over [a, b].

    ``b`` may be ``inf``; the half line is mapped onto [0, 1) with
    x = a + scale * t / (1 - t).  ``points`` are interior breakpoints where
    the integrand changes character (kinks, narrow peaks).  The reported
    error estimate is at most ``max(tol, rtol * |value|)``.
    """
    if tol <= 0:
        raise DomainError("tol must be positive")
    if not math.isfinite(a) or math.isnan(b) or b < a:
        raise DomainError("need finite a <= b")
    if b == a:
        return QuadratureResult(0.0, 0.0, 1)
    inner = sorted({float(p) for p in points if a < p < b})
    if math.isinf(b):
        if scale <= 0:
            raise DomainError("scale must be positive")

        def mapped(t):
            one_minus = 1.0 - t
            x = a + scale * t / one_minus
            return f(x) * (scale / (one_minus * one_minus))

        edges = [0.0] + [(p - a) / (scale + p - a) for p in inner] + [1.0]
        value, err, evals = _adaptive(mapped, edges, tol, rtol, max_intervals)
    else:
        edges = [a] + inner + [b]
        value, err, evals = _adaptive(f, edges, tol, rtol, max_intervals)
    return QuadratureResult(value, err, evals)


def cumulative_integral(f: Callable, xs, tol: float = DEFAULT_QUAD_TOL) -> np.ndarray:
    """Running integrals int_{xs[0]}^{xs[i]} f for an ascending grid ``xs``."""
    xs = np.asarray(xs, dtype=float)
    if xs.ndim != 1 or xs.size == 0:
        raise DomainError("xs must be a non-empty 1-d grid")
    if np.any(np.diff(xs) < 0):
        raise DomainError("xs must be ascending")
    if xs.size == 1:
        return np.zeros(1)
    lo, hi = xs[:-1], xs[1:]
    vals, errs, _ = _gk15(f, lo, hi)
    budget = tol / lo.size
    for i in np.nonzero(errs > budget)[0]:
        vals[i] = integrate(f, lo[i], hi[i], budget).value
    return np.concatenate([[0.0], np.cumsum(vals)])


# ---------------------------------------------------------------------------
# Root finding


def solve_scalar(
    g: Callable[[float], float],
    bracket_hint: Tuple[float, float],
    tol: float = DEFAULT_ROOT_TOL,
    *,
    lower: float = -math.inf,
    upper: float = math.inf,
    max_expand: int = 80,
    max_iter: int = 300,
) -> RootResult:
    """Root of a continuous scalar function by a bracketed secant/bisection hybrid.

    The hint is expanded by doubling its width (clipped to [lower, upper])
    until it straddles a sign change.  Iteration stops once |g| <= tol or
    the bracket has collapsed to adjacent floating-point numbers.
    """
    a, b = float(bracket_hint[0]), float(bracket_hint[1])
    if a > b:
        a, b = b, a
    a, b = max(a, lower), min(b, upper)
    if not a < b:
        raise DomainError("empty bracket")
    ga, gb = float(g(a)), float(g(b))
    evals = 2
    for _ in range(max_expand):
        if not (math.isfinite(ga) and math.isfinite(gb)):
            raise RootFindingError("non-finite function value while bracketing",
                                   {"a": a, "b": b, "ga": ga, "gb": gb})
        if ga == 0.0 or gb == 0.0 or (ga < 0) != (gb < 0):
            break
        if a <= lower and b >= upper:
            break
        # grow the end where |g| is smaller; doubling the width each time
        w = b - a
        if (abs(ga) < abs(gb) and a > lower) or b >= upper:
            a = max(lower, a - w)
            ga = float(g(a))
        else:
            b = min(upper, b + w)
            gb = float(g(b))
        evals += 1
    if not (math.isfinite(ga) and math.isfinite(gb)) or (ga != 0.0 and gb != 0.0 and (ga < 0) == (gb < 0)):
        raise RootFindingError("no sign change found in the expanded bracket",
                               {"a": a, "b": b, "ga": ga, "gb": gb})

    best_x, best_g = (a, ga) if abs(ga) <= abs(gb) else (b, gb)
    side = 0
    for it in range(1, max_iter + 1):
        if abs(best_g) <= tol:
            return RootResult(best_x, best_g, it - 1, (a, b))
        width = b - a
        if width <= 4.0 * _EPS * max(abs(a), abs(b), 1e-300):
            return RootResult(best_x, best_g, it - 1, (a, b))
        x = b - gb * (b - a) / (gb - ga)
        if not (a < x < b) or it % 4 == 0:
            x = 0.5 * (a + b)
        gx = float(g(x))
        evals += 1
        if not math.isfinite(gx):
            raise RootFindingError("non-finite function value inside bracket", {"x": x})
        if abs(gx) < abs(best_g):
            best_x, best_g = x, gx
        if (gx < 0) == (ga < 0):
            a, ga = x, gx
            if side == -1:
                gb *= 0.5  # Illinois step
            side = -1
        else:
            b, gb = x, gx
            if side == 1:
                ga *= 0.5
            side = 1
    raise RootFindingError(f"no convergence after {max_iter} iterations",
                           {"root": best_x, "residual": best_g, "bracket": (a, b)})


def solve_2d(
    G: Callable[[float, float], Tuple[float, float]],
    start: Tuple[float, float],
    tol: float = DEFAULT_SYSTEM_TOL,
    *,
    max_iter: int = 100,
    positive_first: bool = True,
) -> Tuple[RootResult, RootResult]:
    """Damped Newton for a 2x2 nonlinear system with a finite-difference Jacobian.

    The first unknown is kept strictly positive when ``positive_first``.
    Returns one RootResult per unknown, each carrying its equation's residual.
    """
    v = np.array(start, dtype=float)
    if positive_first and v[0] <= 0:
        raise DomainError("first unknown must start positive")

    def evaluate(point):
        try:
            r = np.asarray(G(point[0], point[1]), dtype=float)
        except ConvergenceError:
            return None
        return r if r.shape == (2,) and np.all(np.isfinite(r)) else None

    r = evaluate(v)
    if r is None:
        raise ConvergenceError("system not finite at the starting point", {"start": tuple(v)})
    perturbations = 0
    for it in range(1, max_iter + 1):
        if np.max(np.abs(r)) <= tol:
            return (RootResult(float(v[0]), float(r[0]), it - 1),
                    RootResult(float(v[1]), float(r[1]), it - 1))
        J = np.empty((2, 2))
        for j in range(2):
            h = 1e-6 * max(1.0, abs(v[j]))
            if j == 0 and positive_first:
                h = min(h, 0.25 * v[0])
            e = np.zeros(2)
            e[j] = h
            rp, rm = evaluate(v + e), evaluate(v - e)
            if rp is None or rm is None:
                raise ConvergenceError("system not finite near iterate",
                                       {"iterate": tuple(v), "residual": tuple(r)})
            J[:, j] = (rp - rm) / (2.0 * h)
        det = np.linalg.det(J)
        if not np.isfinite(det) or abs(det) <= 1e-13 * max(np.abs(J).max() ** 2, 1e-300):
            perturbations += 1
            if perturbations > 3:
                raise SingularJacobianError(
                    "Jacobian singular at iterate",
                    {"iterate": tuple(v), "residual": tuple(r), "jacobian": J.tolist()})
            v = v + 1e-3 * np.maximum(1.0, np.abs(v)) * np.array([1.0, -0.5])
            r = evaluate(v)
            if r is None:
                raise ConvergenceError("system not finite after perturbation", {"iterate": tuple(v)})
            continue
        step = np.linalg.solve(J, -r)
        if positive_first and v[0] + step[0] <= 0:
            step *= 0.75 * v[0] / -step[0]
        norm0 = np.linalg.norm(r)
        alpha = 1.0
        while True:
            cand = v + alpha * step
            rc = evaluate(cand)
            if rc is not None and np.linalg.norm(rc) <= (1.0 - 1e-4 * alpha) * norm0:
                break
            alpha *= 0.5
            if alpha < 1e-12:
                raise ConvergenceError("line search failed",
                                       {"iterate": tuple(v), "residual": tuple(r), "iterations": it})
        v, r = cand, rc
    raise ConvergenceError(f"no convergence after {max_iter} iterations",
                           {"iterate": tuple(v), "residual": tuple(r)})
