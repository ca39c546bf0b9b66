"""Nominal harvested-energy distributions known to the transmitter.

Three variants are provided: :class:`Exponential` (linear harvester under
Rayleigh fading), :class:`Uniform`, and :class:`Tabulated` for an empirical
pdf on a grid.  All supports lie in [0, inf).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence, Tuple

import numpy as np

from . import numerics
from .exceptions import DomainError, TableFormatError

# Nominal expectations over an unbounded support are split where the pdf
# drops below this fraction of its peak; the remainder goes to the mapped tail.
TAIL_RATIO = 1e-16
MIN_TABLE_ROWS = 8


class NominalModel:
    """Common interface: pdf, cdf, mean, support, quantile and expectations."""

    support: Tuple[float, float]

    def pdf(self, x):
        raise NotImplementedError

    def cdf(self, x):
        raise NotImplementedError

    def sf(self, x):
        """Survival function 1 - cdf(x); subclasses keep it accurate in the tail."""
        x = np.asarray(x, dtype=float)
        return numerics._maybe_scalar(1.0 - np.asarray(self.cdf(x), dtype=float), x)

    def mean(self) -> float:
        raise NotImplementedError

    def variance(self) -> float:
        raise NotImplementedError

    def quantile(self, p: float) -> float:
        raise NotImplementedError

    @property
    def spec(self) -> str:
        """Short textual form as accepted by :func:`parse_nominal`."""
        raise NotImplementedError

    def breakpoints(self) -> Tuple[float, ...]:
        """Interior points where the pdf is not smooth."""
        return ()

    def tail_cutoff(self) -> float:
        """Point beyond which the pdf is below TAIL_RATIO of its peak."""
        return self.support[1]

    @property
    def scale(self) -> float:
        return max(self.mean() - self.support[0], 1e-300)

    def expect(self, g: Callable, points: Sequence[float] = (),
               tol: float = numerics.DEFAULT_QUAD_TOL,
               rtol: float = 0.0) -> numerics.QuadratureResult:
        """int f0(x) g(x) dx over the support, by adaptive quadrature.

        ``g`` must be vectorised.  ``points`` add breakpoints, e.g. at the
        length scale of a sharp feature of ``g``.
        """
        lo, hi = self.support

        def integrand(x):
            return self.pdf(x) * g(x)

        cut = self.tail_cutoff()
        pts = sorted(set(self.breakpoints()) | {p for p in points if lo < p < cut})
        head = numerics.integrate(integrand, lo, cut, 0.5 * tol, points=pts, rtol=rtol)
        if math.isinf(hi):
            tail = numerics.integrate(integrand, cut, math.inf, 0.5 * tol, scale=self.scale,
                                      rtol=rtol)
            return numerics.QuadratureResult(head.value + tail.value,
                                             head.abs_error_estimate + tail.abs_error_estimate,
                                             head.evaluations + tail.evaluations)
        return head


@dataclass(frozen=True)
class Exponential(NominalModel):
    """f0(x) = rate * exp(-rate * x) on [0, inf)."""

    rate: float

    def __post_init__(self):
        if not (math.isfinite(self.rate) and self.rate > 0):
            raise DomainError("exponential rate must be positive and finite")

    @property
    def support(self):
        return (0.0, math.inf)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x >= 0, self.rate * np.exp(-self.rate * np.maximum(x, 0.0)), 0.0)
        return numerics._maybe_scalar(out, x)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x > 0, -np.expm1(-self.rate * np.maximum(x, 0.0)), 0.0)
        return numerics._maybe_scalar(out, x)

    def sf(self, x):
        x = np.asarray(x, dtype=float)
        return numerics._maybe_scalar(np.exp(-self.rate * np.maximum(x, 0.0)), x)

    def mean(self):
        return 1.0 / self.rate

    def variance(self):
        return 1.0 / self.rate**2

    def quantile(self, p):
        if not 0 <= p < 1:
            raise DomainError("quantile level must be in [0, 1)")
        return -math.log1p(-p) / self.rate

    def tail_cutoff(self):
        return -math.log(TAIL_RATIO) / self.rate

    @property
    def spec(self):
        return f"exp:{self.rate!r}"


@dataclass(frozen=True)
class Uniform(NominalModel):
    """Uniform on [0, upper]."""

    upper: float

    def __post_init__(self):
        if not (math.isfinite(self.upper) and self.upper > 0):
            raise DomainError("uniform upper bound must be positive and finite")

    @property
    def support(self):
        return (0.0, self.upper)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where((x >= 0) & (x <= self.upper), 1.0 / self.upper, 0.0)
        return numerics._maybe_scalar(out, x)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.clip(x / self.upper, 0.0, 1.0)
        return numerics._maybe_scalar(out, x)

    def mean(self):
        return 0.5 * self.upper

    def variance(self):
        return self.upper**2 / 12.0

    def quantile(self, p):
        if not 0 <= p <= 1:
            raise DomainError("quantile level must be in [0, 1]")
        return p * self.upper

    @property
    def spec(self):
        return f"uniform:{self.upper!r}"


@dataclass(frozen=True, eq=False)
class Tabulated(NominalModel):
    """Piecewise-linear pdf through (x, pdf) points, zero outside the grid.

    The pdf is renormalised at construction so that it integrates to one.
    """

    xs: np.ndarray
    values: np.ndarray
    source: str = field(default="<memory>")

    def __post_init__(self):
        xs = np.array(self.xs, dtype=float)
        ps = np.array(self.values, dtype=float)
        if xs.ndim != 1 or xs.shape != ps.shape:
            raise DomainError("xs and pdf values must be 1-d arrays of equal length")
        if xs.size < MIN_TABLE_ROWS:
            raise DomainError(f"need at least {MIN_TABLE_ROWS} grid points")
        if not np.all(np.isfinite(xs)) or not np.all(np.isfinite(ps)):
            raise DomainError("grid contains non-finite values")
        if xs[0] < 0:
            raise DomainError("energy grid must be nonnegative")
        if np.any(np.diff(xs) <= 0):
            raise DomainError("energy grid must be strictly ascending")
        if np.any(ps < 0):
            raise DomainError("pdf values must be nonnegative")
        total = float(np.sum(0.5 * (ps[1:] + ps[:-1]) * np.diff(xs)))
        if not total > 0:
            raise DomainError("pdf integrates to zero")
        ps = ps / total
        xs.setflags(write=False)
        ps.setflags(write=False)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "values", ps)
        # exact cumulative mass at the grid points
        cum = np.concatenate([[0.0], np.cumsum(0.5 * (ps[1:] + ps[:-1]) * np.diff(xs))])
        cum /= cum[-1]
        cum.setflags(write=False)
        object.__setattr__(self, "_cum", cum)

    @property
    def support(self):
        return (float(self.xs[0]), float(self.xs[-1]))

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.interp(x, self.xs, self.values, left=0.0, right=0.0)
        return numerics._maybe_scalar(out, x)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        xs, ps, cum = self.xs, self.values, self._cum
        i = np.clip(np.searchsorted(xs, x, side="right") - 1, 0, xs.size - 2)
        h = np.clip(x - xs[i], 0.0, xs[i + 1] - xs[i])
        slope = (ps[i + 1] - ps[i]) / (xs[i + 1] - xs[i])
        out = cum[i] + ps[i] * h + 0.5 * slope * h * h
        out = np.where(x < xs[0], 0.0, np.where(x >= xs[-1], 1.0, np.clip(out, 0.0, 1.0)))
        return numerics._maybe_scalar(out, x)

    def _moment(self, k):
        # exact integral of x^k times a linear function on every cell
        a, b = self.xs[:-1], self.xs[1:]
        fa, fb = self.values[:-1], self.values[1:]
        slope = (fb - fa) / (b - a)
        c0 = fa - slope * a
        m1 = (b ** (k + 1) - a ** (k + 1)) / (k + 1)
        m2 = (b ** (k + 2) - a ** (k + 2)) / (k + 2)
        return float(np.sum(c0 * m1 + slope * m2))

    def mean(self):
        return self._moment(1)

    def variance(self):
        return self._moment(2) - self.mean() ** 2

    def quantile(self, p):
        if not 0 <= p <= 1:
            raise DomainError("quantile level must be in [0, 1]")
        lo, hi = self.support
        if p <= 0:
            return lo
        if p >= 1:
            return hi
        res = numerics.solve_scalar(lambda x: float(self.cdf(x)) - p, (lo, hi), 1e-14,
                                    lower=lo, upper=hi)
        return res.root

    def breakpoints(self):
        return tuple(float(x) for x in self.xs[1:-1])

    @property
    def spec(self):
        return f"table:{self.source}"


def load_table(path) -> Tabulated:
    """Read a tabulated pdf from CSV with header ``x,pdf``.

    Raises TableFormatError naming the 1-based line of the first problem.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise TableFormatError(f"cannot read {path}: {exc.strerror}") from None
    rows = list(csv.reader(text.splitlines()))
    if not rows or [c.strip() for c in rows[0]] != ["x", "pdf"]:
        raise TableFormatError("header must be exactly 'x,pdf'", line=1)
    xs, ps = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 2:
            raise TableFormatError(f"expected 2 columns, found {len(row)}", line=lineno)
        try:
            x, p = float(row[0]), float(row[1])
        except ValueError:
            raise TableFormatError(f"not a number: {','.join(row)!r}", line=lineno) from None
        if not (math.isfinite(x) and math.isfinite(p)):
            raise TableFormatError("non-finite value", line=lineno)
        if x < 0:
            raise TableFormatError("energy must be nonnegative", line=lineno)
        if p < 0:
            raise TableFormatError("pdf must be nonnegative", line=lineno)
        if xs and x <= xs[-1]:
            raise TableFormatError("x values must be strictly ascending", line=lineno)
        xs.append(x)
        ps.append(p)
    if len(xs) < MIN_TABLE_ROWS:
        raise TableFormatError(f"need at least {MIN_TABLE_ROWS} data rows, found {len(xs)}")
    try:
        return Tabulated(np.array(xs), np.array(ps), source=str(path))
    except DomainError as exc:
        raise TableFormatError(str(exc)) from None


def parse_nominal(text: str) -> NominalModel:
    """Build a model from ``exp:RATE``, ``uniform:UPPER`` or ``table:PATH``."""
    kind, sep, arg = text.partition(":")
    if not sep or not arg:
        raise DomainError(f"nominal spec {text!r} is not of the form kind:value")
    kind = kind.strip().lower()
    if kind == "table":
        return load_table(arg)
    try:
        value = float(arg)
    except ValueError:
        raise DomainError(f"bad number in nominal spec {text!r}") from None
    if kind in ("exp", "exponential"):
        return Exponential(value)
    if kind == "uniform":
        return Uniform(value)
    raise DomainError(f"unknown nominal kind {kind!r}")
