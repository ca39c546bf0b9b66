"""Independent discretised solver used to validate the closed-form worst cases.

The nominal law is binned onto a finite energy grid and the problem

    minimise  sum_i x_i p_i   over the probability simplex
    subject to  D(p) <= d

is solved by a primal log-barrier interior-point method.  Nothing here uses
the multiplier structure of the continuous solutions, so agreement between
the two is a genuine check of the dual equations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exceptions import ConvergenceError, DomainError
from .nominal import NominalModel
from .worstcase import Divergence, solve_forward_kl, solve_reverse_kl, solve_symmetrized

MIN_GRID_POINTS = 50
DEFAULT_GRID_POINTS = 2000
DEFAULT_COVERAGE = 1.0 - 1e-9
MAX_TRUNCATED_MASS = 1e-6
# Exponent of the graded grid: cells grow geometrically by exp(GRADING / n).
GRADING = 10.0
CENTERING_TOL = 1e-7


class CoverageError(DomainError):
    pass


@dataclass(frozen=True, eq=False)
class GridDistribution:
    xs: np.ndarray
    ps: np.ndarray

    def __post_init__(self):
        xs = np.array(self.xs, dtype=float)
        ps = np.array(self.ps, dtype=float)
        if xs.ndim != 1 or xs.shape != ps.shape:
            raise DomainError("xs and ps must be 1-d arrays of equal length")
        if xs.size < MIN_GRID_POINTS:
            raise DomainError(f"grid needs at least {MIN_GRID_POINTS} points, got {xs.size}")
        if np.any(xs < 0) or np.any(np.diff(xs) <= 0):
            raise DomainError("grid must be nonnegative and strictly ascending")
        if np.any(ps < 0) or not np.all(np.isfinite(ps)):
            raise DomainError("probabilities must be finite and nonnegative")
        if abs(ps.sum() - 1.0) > 1e-12:
            raise DomainError(f"probabilities sum to {ps.sum()!r}, not 1")
        xs.setflags(write=False)
        ps.setflags(write=False)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ps", ps)

    @property
    def n(self) -> int:
        return self.xs.size

    def mean(self) -> float:
        return float(self.xs @ self.ps)

    def cdf(self, x):
        return np.interp(x, self.xs, np.cumsum(self.ps), left=0.0, right=1.0)


def discretize(nominal: NominalModel, x_max: Optional[float] = None,
               n: int = DEFAULT_GRID_POINTS, spacing: str = "graded") -> GridDistribution:
    """Bin ``nominal`` into ``n`` cells on [lower support, x_max].

    Cell weights are nominal CDF differences, renormalised to sum to one;
    grid points are cell midpoints.  ``spacing='graded'`` makes cells grow
    geometrically away from the lower end of the support, which resolves
    worst cases that pile mass up near zero energy; ``'uniform'`` gives
    equal cells.
    """
    if n < MIN_GRID_POINTS:
        raise DomainError(f"need n >= {MIN_GRID_POINTS}, got {n}")
    lo, hi = nominal.support
    if x_max is None:
        x_max = hi if math.isfinite(hi) else nominal.quantile(DEFAULT_COVERAGE)
    x_max = float(x_max)
    if not x_max > lo:
        raise DomainError("x_max must exceed the lower end of the support")
    lost = float(nominal.sf(x_max))
    if lost > MAX_TRUNCATED_MASS:
        raise CoverageError(f"x_max={x_max:g} truncates {lost:.3g} of the nominal mass")
    u = np.linspace(0.0, 1.0, n + 1)
    if spacing == "uniform":
        edges = lo + (x_max - lo) * u
    elif spacing == "graded":
        edges = lo + (x_max - lo) * np.expm1(GRADING * u) / math.expm1(GRADING)
    else:
        raise DomainError(f"unknown spacing {spacing!r}")
    edges[-1] = x_max
    # difference the CDF below the median and the survival function above it,
    # so that tail cells keep their relative accuracy
    F = np.asarray(nominal.cdf(edges), dtype=float)
    S = np.asarray(nominal.sf(edges), dtype=float)
    mass = np.where(F[1:] <= 0.5, np.diff(F), -np.diff(S))
    mass = np.maximum(mass, 0.0)
    ps = mass / mass.sum()
    xs = 0.5 * (edges[1:] + edges[:-1])
    return GridDistribution(xs, ps)


def kl(p: GridDistribution, q: GridDistribution) -> float:
    """sum p_i log(p_i / q_i) with 0 log 0 = 0; inf when p_i > 0 = q_i."""
    _check_same_grid(p, q)
    pos = p.ps > 0
    if np.any(q.ps[pos] == 0):
        return math.inf
    return float(np.sum(p.ps[pos] * np.log(p.ps[pos] / q.ps[pos])))


def divergence(nominal: GridDistribution, other: GridDistribution, kind) -> float:
    """Forward KL is D(nominal || other), reverse KL is D(other || nominal)."""
    kind = Divergence.parse(kind)
    if kind is Divergence.FORWARD_KL:
        return kl(nominal, other)
    if kind is Divergence.REVERSE_KL:
        return kl(other, nominal)
    return 0.5 * (kl(nominal, other) + kl(other, nominal))


def _check_same_grid(p, q):
    if p.xs.shape != q.xs.shape or not np.array_equal(p.xs, q.xs):
        raise DomainError("distributions live on different grids")


@dataclass(frozen=True, eq=False)
class OracleResult:
    mean: float
    distribution: GridDistribution
    divergence: float
    iterations: int
    duality_gap: float
    stationarity_residual: float


def _divergence_parts(kind, p, P):
    """Value, gradient and Hessian diagonal of the discrete divergence."""
    if kind is Divergence.FORWARD_KL:
        return float(np.sum(P * np.log(P / p))), -P / p, P / p**2
    if kind is Divergence.REVERSE_KL:
        logr = np.log(p / P)
        return float(np.sum(p * logr)), logr + 1.0, 1.0 / p
    fv, fg, fh = _divergence_parts(Divergence.FORWARD_KL, p, P)
    rv, rg, rh = _divergence_parts(Divergence.REVERSE_KL, p, P)
    return 0.5 * (fv + rv), 0.5 * (fg + rg), 0.5 * (fh + rh)


def solve_discrete(grid_nominal: GridDistribution, kind, d: float, tol: float = 1e-8,
                   *, growth: float = 20.0, max_newton: int = 500) -> OracleResult:
    """Minimum mean over grid distributions within divergence ``d`` of the nominal grid.

    The barrier objective t * <x, p> - w * sum log p - log(d - D(p)) is
    minimised on the simplex by equality-constrained Newton steps; t grows
    geometrically until the duality gap (1 + n w) / t is below ``tol``.
    The cell barriers carry weight w = 1 / n: every divergence here already
    keeps the optimum strictly positive, and full-weight cell barriers would
    bias the central path by n / t.
    """
    kind = Divergence.parse(kind)
    d = float(d)
    if not (math.isfinite(d) and d >= 0):
        raise DomainError("radius d must be finite and nonnegative")
    if tol <= 0:
        raise DomainError("tol must be positive")
    if d == 0:
        return OracleResult(grid_nominal.mean(), grid_nominal, 0.0, 0, 0.0, 0.0)

    active = grid_nominal.ps > 0
    x = grid_nominal.xs[active]
    P = grid_nominal.ps[active]
    w = 1.0 / x.size
    m = 1.0 + w * x.size
    p = P.copy()
    t = 1.0 / max(float(np.ptp(x)), 1e-300)
    total_newton = 0

    while True:
        for _ in range(max_newton):
            D, grad, hdiag = _divergence_parts(kind, p, P)
            slack = d - D
            g = t * x - w / p + grad / slack
            lam = w / p**2 + hdiag / slack
            u = grad / slack
            # H = diag(lam) + u u^T; solve with the simplex equality by Sherman-Morrison
            li_u = u / lam
            denom = 1.0 + u @ li_u

            def hinv(v):
                lv = v / lam
                return lv - li_u * ((u @ lv) / denom)

            hg, h1 = hinv(g), hinv(np.ones_like(g))
            nu = -(hg.sum() / h1.sum())
            step = -(hg + nu * h1)
            decrement = -(g @ step)
            total_newton += 1
            # suboptimality in the barrier objective is about decrement / 2,
            # i.e. below 1e-7 / t in the mean
            if decrement <= CENTERING_TOL:
                break
            alpha = 1.0
            neg = step < 0
            if np.any(neg):
                alpha = min(1.0, 0.99 * float(np.min(-p[neg] / step[neg])))
            trial = None
            while alpha >= 1e-20:
                cand = p + alpha * step
                if np.all(cand > 0):
                    Dt = _divergence_parts(kind, cand, P)[0]
                    if Dt < d:
                        change = (t * alpha * (x @ step)
                                  - w * np.sum(np.log1p(alpha * step / p))
                                  - math.log((d - Dt) / slack))
                        if change <= 0.25 * alpha * (g @ step) or decrement < 1e-8:
                            trial = cand
                            break
                alpha *= 0.5
            if trial is None:
                # sufficient decrease is lost in roundoff of t * <x, p> close to the centre
                if decrement < 1e-6:
                    break
                raise ConvergenceError("barrier line search failed",
                                       {"t": t, "decrement": decrement, "mean": float(x @ p)})
            p = trial / trial.sum()
        else:
            raise ConvergenceError("centering did not converge",
                                   {"t": t, "decrement": decrement, "mean": float(x @ p)})
        if m / t <= tol:
            break
        t *= growth

    D, grad, _ = _divergence_parts(kind, p, P)
    lam_dual = w / (t * p)
    eta = 1.0 / (t * (d - D))
    r = x - lam_dual + eta * grad
    # Lagrangian stationarity x - lambda + eta grad D = const, measured in the
    # p-weighted norm so that cells carrying no mass do not dominate
    stationarity = float(p @ np.abs(r - p @ r))
    ps = np.zeros_like(grid_nominal.ps)
    ps[active] = p
    ps /= ps.sum()
    dist = GridDistribution(grid_nominal.xs, ps)
    return OracleResult(dist.mean(), dist, D, total_newton, m / t, stationarity)


@dataclass(frozen=True)
class CheckRow:
    kind: str
    d: float
    closed_form_mean: float
    oracle_mean: float
    relative_gap: float
    passed: bool


def cross_check(nominal: NominalModel, kind, d: float, *, n: int = DEFAULT_GRID_POINTS,
                x_max: Optional[float] = None, band: float = 0.01,
                spacing: str = "graded", mode="kkt") -> CheckRow:
    """Compare the continuous worst-case mean with the grid oracle.

    ``mode`` selects the reverse-KL equation of the continuous solver; the
    oracle itself has no such choice, which is what makes it an arbiter.
    """
    kind = Divergence.parse(kind)
    if kind is Divergence.FORWARD_KL:
        closed = solve_forward_kl(nominal, d).mean
    elif kind is Divergence.REVERSE_KL:
        closed = solve_reverse_kl(nominal, d, mode).mean
    else:
        closed = solve_symmetrized(nominal, d).mean
    grid = discretize(nominal, x_max, n, spacing)
    oracle = solve_discrete(grid, kind, d).mean
    gap = abs(closed - oracle) / abs(oracle) if oracle else abs(closed - oracle)
    return CheckRow(kind.value, float(d), closed, oracle, gap, gap <= band)
