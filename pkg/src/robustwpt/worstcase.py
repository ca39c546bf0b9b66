"""Worst-case harvested energy over divergence balls around a nominal law.

For a nominal pdf f0 on [0, inf) and a radius d (nats) the solvers return
the distribution f minimising the mean energy subject to one of

* forward KL   D(f0 || f) <= d   -> f = f0 / (q(mu) (x + mu))
* reverse KL   D(f || f0) <= d   -> f proportional to exp(-x/s) f0
* symmetrized  (D(f0||f) + D(f||f0)) / 2 <= d
                                 -> f = f0 / omega(2 (x + mu) / s)

where omega is the Wright omega function.  The constraint is always active
for d > 0, so each solve reduces to one or two scalar equations for the
multipliers.  Exponential nominals get closed-form fast paths built on the
exponential integral.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np

from . import numerics
from .exceptions import ConvergenceError, DomainError
from .nominal import Exponential, NominalModel

# Quadrature accuracy used inside the solvers; tighter than the public
# default so that root residuals of 1e-10 are reachable.
SOLVER_QUAD_TOL = 1e-12
SOLVER_QUAD_RTOL = 1e-13
DIAGNOSTIC_QUAD_TOL = 1e-11


class Divergence(str, enum.Enum):
    FORWARD_KL = "forward-kl"
    REVERSE_KL = "reverse-kl"
    SYMMETRIZED = "symmetrized"

    @classmethod
    def parse(cls, value) -> "Divergence":
        if isinstance(value, cls):
            return value
        text = str(value).strip().lower().replace("_", "-")
        aliases = {"forward": "forward-kl", "reverse": "reverse-kl", "sym": "symmetrized"}
        try:
            return cls(aliases.get(text, text))
        except ValueError:
            raise DomainError(f"unknown divergence kind {value!r}") from None


class ReverseMode(str, enum.Enum):
    KKT = "kkt"
    PAPER_EXACT = "paper-exact"

    @classmethod
    def parse(cls, value) -> "ReverseMode":
        if isinstance(value, cls):
            return value
        text = str(value).strip().lower().replace("_", "-")
        try:
            return cls(text)
        except ValueError:
            raise DomainError(f"unknown reverse-KL mode {value!r}") from None


def _check_radius(d) -> float:
    d = float(d)
    if not (math.isfinite(d) and d >= 0):
        raise DomainError("radius d must be finite and nonnegative")
    return d


@dataclass(frozen=True)
class UncertaintySet:
    nominal: NominalModel
    kind: Divergence
    d: float

    def __post_init__(self):
        object.__setattr__(self, "kind", Divergence.parse(self.kind))
        object.__setattr__(self, "d", _check_radius(self.d))

    def solve(self, **options) -> "WorstCaseSolution":
        return solve(self, **options)


@dataclass(frozen=True)
class Diagnostics:
    normalization_residual: float
    divergence_residual: float
    iterations: int
    mode: str
    path: str
    equation_residual: float = 0.0


@dataclass(frozen=True, eq=False)
class WorstCaseSolution:
    """Worst-case distribution and its mean.

    ``log_ratio(x)`` is log(f(x) / f0(x)) on the nominal support.
    ``mu_star`` / ``s_star`` are the multipliers of the normalisation and
    divergence constraints; both are None for the zero-radius solution.
    """

    kind: Divergence
    d: float
    nominal: NominalModel
    mean: float
    mu_star: Optional[float]
    s_star: Optional[float]
    diagnostics: Diagnostics
    log_ratio: Callable = field(repr=False)
    closed_cdf: Optional[Callable] = field(default=None, repr=False)
    scale_points: Tuple[float, ...] = field(default=(), repr=False)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        f0 = np.asarray(self.nominal.pdf(x), dtype=float)
        with np.errstate(over="ignore", invalid="ignore"):
            out = np.where(f0 > 0, f0 * np.exp(self.log_ratio(x)), 0.0)
        return numerics._maybe_scalar(out, x)

    def cdf(self, x):
        return worst_cdf(self, x)

    @property
    def mode(self) -> str:
        return self.diagnostics.mode


# ---------------------------------------------------------------------------
# helpers


def _geometric_points(origin, length, stop, decades_below=0):
    """origin + length * 10**k, k = -decades_below .. until past ``stop``."""
    if not (length > 0 and math.isfinite(length)):
        return ()
    pts = []
    k = -decades_below
    while True:
        p = origin + length * 10.0**k
        if p >= stop or k > 400:
            break
        pts.append(p)
        k += 1
    return tuple(pts)


def _nominal_solution(nominal, kind, mode="kkt"):
    zero = Diagnostics(0.0, 0.0, 0, mode, "nominal")
    return WorstCaseSolution(
        kind=kind, d=0.0, nominal=nominal, mean=nominal.mean(), mu_star=None, s_star=None,
        diagnostics=zero, log_ratio=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        closed_cdf=nominal.cdf)


def _with_diagnostics(sol, uset_kind, iterations, mode, path, equation_residual):
    norm = _expect_ratio(sol, lambda x, lr: np.exp(lr), DIAGNOSTIC_QUAD_TOL) - 1.0
    div = achieved_divergence(sol, uset_kind) - sol.d
    diag = Diagnostics(norm, div, iterations, mode, path, equation_residual)
    return WorstCaseSolution(sol.kind, sol.d, sol.nominal, sol.mean, sol.mu_star, sol.s_star,
                             diag, sol.log_ratio, sol.closed_cdf, sol.scale_points)


def _expect_ratio(sol, g, tol):
    """int f0(x) g(x, log_ratio(x)) dx using the solution's breakpoints."""
    return sol.nominal.expect(lambda x: g(x, sol.log_ratio(x)), sol.scale_points, tol).value


# ---------------------------------------------------------------------------
# forward KL: D(f0 || f) <= d


def _forward_exponential(nominal: Exponential, d, tol):
    lam = nominal.rate

    def scaled_q(nu):
        # q(mu) / lam = e^{y} E1(y) with y = lam * mu = e^nu
        if nu < -700.0:
            return (1.0 + math.exp(nu)) * numerics.exp_integral_e1_at_log(nu)
        if nu > 700.0:
            return math.exp(-nu) * (1.0 - math.exp(-nu))
        return float(numerics.exp_scaled_e1(math.exp(nu)))

    def constraint(nu):
        Q = scaled_q(nu)
        return Q + nu + math.log(Q) - d

    root = numerics.solve_scalar(constraint, (-1.0, 1.0), tol)
    nu = root.root
    y = math.exp(nu)
    Q = scaled_q(nu)
    mu = y / lam
    q = lam * Q
    mean = (1.0 / Q - y) / lam
    log_q = math.log(q)
    e1_mu = numerics.exp_integral_e1_at_log(nu)

    def log_ratio(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            return -log_q - np.log(x + mu)

    def cdf(x):
        x = np.asarray(x, dtype=float)
        xp = np.maximum(x, 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            if y > 1e-300:
                ratio = np.exp(-lam * xp) * numerics.exp_scaled_e1(np.maximum(lam * xp + y, 1e-300)) \
                    / float(numerics.exp_scaled_e1(y))
            else:
                ratio = np.where(xp > 0, numerics.exp_integral_e1(np.maximum(lam * xp, 1e-300)) / e1_mu, 1.0)
        out = np.where(x > 0, np.clip(1.0 - ratio, 0.0, 1.0), 0.0)
        return numerics._maybe_scalar(out, x)

    points = _geometric_points(0.0, mu, nominal.tail_cutoff())
    sol = WorstCaseSolution(Divergence.FORWARD_KL, d, nominal, mean, mu, None,
                            Diagnostics(0.0, 0.0, root.iterations, "kkt", "closed-form"),
                            log_ratio, cdf, points)
    return sol, root


def _forward_generic(nominal: NominalModel, d, tol):
    lo = nominal.support[0]
    cut = nominal.tail_cutoff()
    length = nominal.scale

    def pieces(nu):
        base = length * math.exp(nu)  # mu + lower end of support
        if not base > 0:
            raise ConvergenceError("multiplier underflow: radius too large for the quadrature path",
                                   {"nu": nu})
        pts = _geometric_points(lo, base, cut)
        q = nominal.expect(lambda x: 1.0 / ((x - lo) + base), pts, SOLVER_QUAD_TOL, SOLVER_QUAD_RTOL).value
        ell = nominal.expect(lambda x: np.log((x - lo) + base), pts, SOLVER_QUAD_TOL, SOLVER_QUAD_RTOL).value
        return base, pts, q, ell

    def constraint(nu):
        _, _, q, ell = pieces(nu)
        return math.log(q) + ell - d

    root = numerics.solve_scalar(constraint, (-1.0, 1.0), tol)
    base, pts, q, _ = pieces(root.root)
    mu = base - lo
    log_q = math.log(q)
    mean = nominal.expect(lambda x: x / ((x - lo) + base), pts, SOLVER_QUAD_TOL, SOLVER_QUAD_RTOL).value / q

    def log_ratio(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return -log_q - np.log(np.maximum(x - lo, 0.0) + base)

    sol = WorstCaseSolution(Divergence.FORWARD_KL, d, nominal, mean, mu, None,
                            Diagnostics(0.0, 0.0, root.iterations, "kkt", "quadrature"),
                            log_ratio, None, pts)
    return sol, root


def solve_forward_kl(nominal: NominalModel, d: float, *, path: str = "auto",
                     tol: float = numerics.DEFAULT_ROOT_TOL) -> WorstCaseSolution:
    """Minimise the mean subject to D(f0 || f) <= d.

    ``path`` selects 'closed-form' (exponential nominals only),
    'quadrature', or 'auto' (closed form whenever available).
    """
    d = _check_radius(d)
    if d == 0:
        return _nominal_solution(nominal, Divergence.FORWARD_KL)
    path = _choose_path(nominal, path)
    if path == "closed-form":
        sol, root = _forward_exponential(nominal, d, tol)
    else:
        sol, root = _forward_generic(nominal, d, tol)
    return _finish(sol, root, "kkt", path)


def _choose_path(nominal, path):
    if path not in ("auto", "closed-form", "quadrature"):
        raise DomainError(f"unknown path {path!r}")
    if path == "auto":
        return "closed-form" if isinstance(nominal, Exponential) else "quadrature"
    if path == "closed-form" and not isinstance(nominal, Exponential):
        raise DomainError("closed-form path needs an exponential nominal")
    return path


def _finish(sol, root, mode, path):
    mu = sol.mu_star if sol.mu_star is not None else 1.0
    lo = sol.nominal.support[0]
    if sol.kind is Divergence.FORWARD_KL and (mu + lo) < 1e-250:
        # the worst case is concentrated below any representable scale
        diag = Diagnostics(math.nan, root.residual, root.iterations, mode, path, root.residual)
        return WorstCaseSolution(sol.kind, sol.d, sol.nominal, sol.mean, sol.mu_star, sol.s_star,
                                 diag, sol.log_ratio, sol.closed_cdf, sol.scale_points)
    return _with_diagnostics(sol, sol.kind, root.iterations, mode, path, root.residual)


# ---------------------------------------------------------------------------
# reverse KL: D(f || f0) <= d


def xi(s, rate):
    """s * log(Z/rate) - 1/Z with Z = 1/s + rate (exponential nominal)."""
    s = np.asarray(s, dtype=float)
    return s * np.log1p(1.0 / (rate * s)) - s / (1.0 + rate * s)


def xi_prime(s, rate):
    """Derivative of :func:`xi` in s."""
    s = np.asarray(s, dtype=float)
    u = rate * s
    return np.log1p(1.0 / u) - (2.0 + u) / (u + 1.0) ** 2


def xi_peak(rate: float = 1.0) -> numerics.RootResult:
    """Location of the maximum of xi, i.e. the root of xi_prime."""
    root = numerics.solve_scalar(lambda t: float(xi_prime(math.exp(t), rate)),
                                 (math.log(0.1 / rate), math.log(2.0 / rate)), 1e-14)
    return numerics.RootResult(math.exp(root.root), root.residual, root.iterations,
                               (math.exp(root.bracket[0]), math.exp(root.bracket[1])))


def _tilted_exponential(nominal, d, theta, mu, mean, iterations, mode, path):
    rate = nominal.rate + theta
    s = 1.0 / theta

    def log_ratio(x):
        x = np.asarray(x, dtype=float)
        return math.log(rate / nominal.rate) - theta * x

    def cdf(x):
        x = np.asarray(x, dtype=float)
        out = np.where(x > 0, -np.expm1(-rate * np.maximum(x, 0.0)), 0.0)
        return numerics._maybe_scalar(out, x)

    return WorstCaseSolution(Divergence.REVERSE_KL, d, nominal, mean, mu, s,
                             Diagnostics(0.0, 0.0, iterations, mode, path),
                             log_ratio, cdf, ())


def _reverse_exponential_kkt(nominal: Exponential, d, tol):
    lam = nominal.rate
    # ell = log(Z / lam); KL of the tilted law is ell + exp(-ell) - 1
    root = numerics.solve_scalar(lambda ell: ell + math.expm1(-ell) - d, (0.0, 1.0), tol, lower=0.0)
    ell = root.root
    theta = lam * math.expm1(ell)
    s = 1.0 / theta
    sol = _tilted_exponential(nominal, d, theta, -s * ell, math.exp(-ell) / lam,
                              root.iterations, "kkt", "closed-form")
    return sol, root


def _reverse_exponential_paper(nominal: Exponential, d, tol):
    lam = nominal.rate
    peak = xi_peak(lam)
    s_bar = peak.root
    if d >= float(xi(s_bar, lam)):
        s, root = s_bar, peak
    else:
        lo = math.log(s_bar)
        r = numerics.solve_scalar(lambda t: float(xi(math.exp(t), lam)) - d, (lo, lo + 1.0), tol,
                                  lower=lo)
        s = math.exp(r.root)
        root = numerics.RootResult(s, r.residual, r.iterations + peak.iterations)
    theta = 1.0 / s
    mean = s / (1.0 + s * lam)
    mu = s * math.log(lam / (lam + theta))
    return _tilted_exponential(nominal, d, theta, mu, mean, root.iterations,
                               "paper-exact", "closed-form"), root


def _reverse_generic(nominal: NominalModel, d, tol):
    lo = nominal.support[0]
    cut = nominal.tail_cutoff()
    length = nominal.scale

    def pieces(tau):
        theta = math.exp(tau) / length
        pts = _geometric_points(lo, 1.0 / theta, cut, decades_below=2)
        psi = nominal.expect(lambda x: np.exp(-theta * (x - lo)), pts, SOLVER_QUAD_TOL, SOLVER_QUAD_RTOL).value
        zeta = nominal.expect(lambda x: (x - lo) * np.exp(-theta * (x - lo)), pts,
                              SOLVER_QUAD_TOL, SOLVER_QUAD_RTOL).value
        return theta, pts, psi, zeta

    def constraint(tau):
        theta, _, psi, zeta = pieces(tau)
        return -theta * zeta / psi - math.log(psi) - d

    tau0 = math.log(math.sqrt(2.0 * d * length**2 / max(nominal.variance(), 1e-300)))
    root = numerics.solve_scalar(constraint, (tau0 - 1.0, tau0 + 1.0), tol)
    theta, pts, psi, zeta = pieces(root.root)
    s = 1.0 / theta
    log_psi = math.log(psi)
    mean = lo + zeta / psi
    mu = s * (log_psi - theta * lo)

    def log_ratio(x):
        x = np.asarray(x, dtype=float)
        return -theta * (x - lo) - log_psi

    sol = WorstCaseSolution(Divergence.REVERSE_KL, d, nominal, mean, mu, s,
                            Diagnostics(0.0, 0.0, root.iterations, "kkt", "quadrature"),
                            log_ratio, None, pts)
    return sol, root


def solve_reverse_kl(nominal: NominalModel, d: float, mode="kkt", *, path: str = "auto",
                     tol: float = numerics.DEFAULT_ROOT_TOL) -> WorstCaseSolution:
    """Minimise the mean subject to D(f || f0) <= d.

    The optimum is the exponential tilt f = exp(-x/s) f0 / psi1(s).  In
    ``mode='kkt'`` s solves -zeta/psi1 - s log psi1 = s d, which places
    the tilt exactly on the divergence boundary.  ``mode='paper-exact'``
    (exponential nominals only) instead solves xi(s) = d on the decreasing
    branch of xi and clamps at the peak of xi, reproducing the published
    constant floor; its solution does not sit on the KL boundary.
    """
    d = _check_radius(d)
    mode = ReverseMode.parse(mode)
    if mode is ReverseMode.PAPER_EXACT and not isinstance(nominal, Exponential):
        raise DomainError("paper-exact mode is defined only for exponential nominals")
    if d == 0:
        return _nominal_solution(nominal, Divergence.REVERSE_KL, mode.value)
    if mode is ReverseMode.PAPER_EXACT:
        sol, root = _reverse_exponential_paper(nominal, d, tol)
        return _finish(sol, root, mode.value, "closed-form")
    path = _choose_path(nominal, path)
    if path == "closed-form":
        sol, root = _reverse_exponential_kkt(nominal, d, tol)
    else:
        sol, root = _reverse_generic(nominal, d, tol)
    return _finish(sol, root, mode.value, path)


# ---------------------------------------------------------------------------
# symmetrized divergence


def _symmetrized_points(nominal, s, mu):
    lo = nominal.support[0]
    cut = nominal.tail_cutoff()
    pts = set(_geometric_points(lo, 0.5 * s, cut, decades_below=3))
    centre = 0.5 * s - mu  # where the tilt argument passes through 1
    if lo < centre < cut:
        pts.add(centre)
    return tuple(sorted(pts))


def _symmetrized_equations(nominal, d):
    def G(s, mu):
        a = 2.0 / s
        pts = _symmetrized_points(nominal, s, mu)

        def inv_omega(x):
            return 1.0 / numerics.wright_omega(a * (x + mu))

        def sym_integrand(x):
            c = a * (x + mu)
            w = numerics.wright_omega(c)
            return (c - w) * (1.0 - 1.0 / w)

        mass = nominal.expect(inv_omega, pts, SOLVER_QUAD_TOL, SOLVER_QUAD_RTOL).value
        dsym = 0.5 * nominal.expect(sym_integrand, pts, SOLVER_QUAD_TOL, SOLVER_QUAD_RTOL).value
        return mass - 1.0, dsym - d

    return G


def solve_symmetrized(nominal: NominalModel, d: float, *,
                      tol: float = numerics.DEFAULT_SYSTEM_TOL) -> WorstCaseSolution:
    """Minimise the mean subject to (D(f0||f) + D(f||f0)) / 2 <= d.

    f = f0 / omega(2 (x + mu) / s) with (s, mu) from the two equations
    "f integrates to one" and "divergence equals d", solved by damped
    Newton warm-started from the single-divergence solutions.
    """
    d = _check_radius(d)
    if d == 0:
        return _nominal_solution(nominal, Divergence.SYMMETRIZED)
    G = _symmetrized_equations(nominal, d)
    starts = []
    try:
        s_rev = solve_reverse_kl(nominal, d).s_star
        mu_fwd = solve_forward_kl(nominal, d).mu_star
        starts += [(s_rev, mu_fwd), (s_rev, 0.5 * s_rev - nominal.mean())]
    except ConvergenceError:
        pass
    starts.append((1.0, nominal.mean()))
    failure = None
    for start in starts:
        try:
            rs, rmu = numerics.solve_2d(G, start, tol)
            break
        except ConvergenceError as exc:
            failure = exc
    else:
        raise ConvergenceError("symmetrized system did not converge from any start",
                               dict(failure.diagnostics, starts=starts))
    s, mu = rs.root, rmu.root
    a = 2.0 / s
    pts = _symmetrized_points(nominal, s, mu)
    mean = nominal.expect(lambda x: x / numerics.wright_omega(a * (x + mu)), pts,
                          SOLVER_QUAD_TOL, SOLVER_QUAD_RTOL).value

    def log_ratio(x):
        x = np.asarray(x, dtype=float)
        return -numerics.log_wright_omega(a * (x + mu))

    sol = WorstCaseSolution(Divergence.SYMMETRIZED, d, nominal, mean, mu, s,
                            Diagnostics(0.0, 0.0, rs.iterations, "kkt", "quadrature"),
                            log_ratio, None, pts)
    residual = max(abs(rs.residual), abs(rmu.residual))
    return _with_diagnostics(sol, sol.kind, rs.iterations, "kkt", "quadrature", residual)


# ---------------------------------------------------------------------------
# dispatch and derived quantities


def solve(uset: UncertaintySet, *, mode="kkt", path: str = "auto",
          tol: Optional[float] = None) -> WorstCaseSolution:
    """Solve the worst-case problem for an uncertainty set.

    ``tol`` overrides the root tolerance of the underlying solver; ``mode``
    applies to the reverse KL only and ``path`` is ignored by the
    symmetrized solver, which always integrates numerically.
    """
    extra = {} if tol is None else {"tol": float(tol)}
    if uset.kind is Divergence.FORWARD_KL:
        return solve_forward_kl(uset.nominal, uset.d, path=path, **extra)
    if uset.kind is Divergence.REVERSE_KL:
        return solve_reverse_kl(uset.nominal, uset.d, mode, path=path, **extra)
    return solve_symmetrized(uset.nominal, uset.d, **extra)


def worst_cdf(solution: WorstCaseSolution, x):
    """CDF of the worst-case distribution; closed form where one exists."""
    if solution.closed_cdf is not None:
        return solution.closed_cdf(x)
    xa = np.asarray(x, dtype=float)
    flat = xa.ravel()
    nominal = solution.nominal
    lo, hi = nominal.support
    inner = flat[(flat > lo) & (flat < hi)]
    extra = [p for p in solution.scale_points if lo < p < hi]
    grid = np.unique(np.concatenate([[lo], inner, extra, nominal.breakpoints()]))

    def density(t):
        return solution.pdf(t)

    seg = np.diff(numerics.cumulative_integral(density, grid, DIAGNOSTIC_QUAD_TOL))
    if math.isinf(hi):
        beyond = numerics.integrate(density, grid[-1], math.inf, DIAGNOSTIC_QUAD_TOL,
                                    scale=nominal.scale).value
    else:
        beyond = numerics.integrate(density, grid[-1], hi, DIAGNOSTIC_QUAD_TOL).value
    left = np.concatenate([[0.0], np.cumsum(seg)])
    right = np.concatenate([np.cumsum(seg[::-1])[::-1], [0.0]]) + beyond
    total = left[-1] + beyond
    F = np.where(left <= 0.5 * total, left / total, 1.0 - right / total)
    F = np.clip(F, 0.0, 1.0)
    idx = np.searchsorted(grid, flat)
    idx = np.clip(idx, 0, grid.size - 1)
    out = np.where(flat <= lo, 0.0, np.where(flat >= hi, 1.0, F[idx]))
    return numerics._maybe_scalar(out.reshape(xa.shape), x)


def energy_outage(solution: WorstCaseSolution, threshold: float) -> float:
    """P(harvested energy <= threshold) under the worst-case distribution."""
    threshold = float(threshold)
    if not threshold >= 0:
        raise DomainError("threshold must be nonnegative")
    return float(worst_cdf(solution, threshold))


def achieved_divergence(solution: WorstCaseSolution, kind=None) -> float:
    """Divergence of the given kind between the nominal and the worst case, by quadrature.

    ``kind`` may be a Divergence, an UncertaintySet, or None for the
    solution's own kind.
    """
    if isinstance(kind, UncertaintySet):
        kind = kind.kind
    kind = Divergence.parse(kind) if kind is not None else solution.kind
    tol = DIAGNOSTIC_QUAD_TOL

    def forward():
        return _expect_ratio(solution, lambda x, lr: -lr, tol)

    def reverse():
        return _expect_ratio(solution, lambda x, lr: np.exp(lr) * lr, tol)

    if kind is Divergence.FORWARD_KL:
        return forward()
    if kind is Divergence.REVERSE_KL:
        return reverse()
    return 0.5 * (forward() + reverse())


def divergence_between(f0: NominalModel, f: NominalModel, kind) -> float:
    """Divergence between two nominal-type models; ``inf`` on support mismatch.

    Forward KL is D(f0 || f), reverse KL is D(f || f0).
    """
    kind = Divergence.parse(kind)
    s0, s1 = f0.support, f.support
    f0_in_f = s1[0] <= s0[0] and s0[1] <= s1[1]
    f_in_f0 = s0[0] <= s1[0] and s1[1] <= s0[1]

    def kl(p, q):
        def g(x):
            px, qx = p.pdf(x), q.pdf(x)
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.where(px > 0, np.log(px / qx), 0.0)
        return p.expect(g, q.breakpoints(), DIAGNOSTIC_QUAD_TOL).value

    if kind is Divergence.FORWARD_KL:
        return kl(f0, f) if f0_in_f else math.inf
    if kind is Divergence.REVERSE_KL:
        return kl(f, f0) if f_in_f0 else math.inf
    if not (f0_in_f and f_in_f0):
        return math.inf
    return 0.5 * (kl(f0, f) + kl(f, f0))
