"""Worst cases when the true law is known to share the nominal's family.

For an exponential nominal with rate ``lam0`` the adversary picks a rate
``lam1 >= lam0``; for a uniform nominal on [0, alpha] it picks the upper
end ``beta <= alpha``.  Each problem reduces to locating the point where
the class divergence reaches the radius ``d``.

Exponential class divergences, with ``r = lam1 / lam0``::

    forward      D(f0 || f) = r - log r - 1
    reverse      D(f || f0) = log r + 1 / r - 1
    symmetrized  (r + 1 / r - 2) / 2
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import numerics
from .exceptions import ConvergenceError, DomainError, InfiniteDivergenceError
from .worstcase import Divergence

# Largest admissible |class divergence - d| at the returned boundary.
BOUNDARY_TOL = 1e-10

EXACT_ROOT = "exact_root"
PAPER_FORMULA = "paper_formula"


@dataclass(frozen=True)
class KnownClassSolution:
    """Boundary parameter of the worst-case member and its mean.

    ``boundary_parameter`` is the rate ``lam1`` (per unit energy) for the
    exponential class and the support end ``beta`` (energy) for the uniform
    class.
    """

    boundary_parameter: float
    mean: float
    formula_used: str


def _check(lam0, d, name="lam0"):
    lam0, d = float(lam0), float(d)
    if not (math.isfinite(lam0) and lam0 > 0):
        raise DomainError(f"{name} must be positive and finite")
    if not (math.isfinite(d) and d >= 0):
        raise DomainError("radius d must be finite and nonnegative")
    return lam0, d


def exp_class_divergence(lam0: float, lam1: float, kind) -> float:
    """Divergence between Exp(lam0) (nominal) and Exp(lam1)."""
    kind = Divergence.parse(kind)
    r = float(lam1) / float(lam0)
    lr = math.log(r)
    if kind is Divergence.FORWARD_KL:
        return r - lr - 1.0
    if kind is Divergence.REVERSE_KL:
        return lr + 1.0 / r - 1.0
    return 0.5 * (r + 1.0 / r - 2.0)


def _verified(lam0, lam1, kind, d, tag):
    if tag == EXACT_ROOT:
        resid = exp_class_divergence(lam0, lam1, kind) - d
        if abs(resid) > BOUNDARY_TOL * max(1.0, d):
            raise ConvergenceError("known-class boundary misses the radius",
                                   {"lam1": lam1, "residual": resid})
    return KnownClassSolution(lam1, 1.0 / lam1, tag)


def exp_class_forward(lam0: float, d: float, formula: str = EXACT_ROOT) -> KnownClassSolution:
    """Forward-KL worst case within the exponential class.

    ``formula='exact_root'`` returns ``lam0 * x`` with ``x >= 1`` the root of
    ``x - log x = 1 + d``, i.e. ``-W_{-1}(-exp(-1 - d))``.
    ``formula='paper_formula'`` evaluates
    ``max(-lam0 W_0(-exp(-1 - d)), lam0 (1 + d))``; the first term never
    exceeds ``lam0`` so this is ``lam0 (1 + d)``, a point strictly inside
    the feasible set for ``d > 0``.

    Examples
    --------
    >>> round(exp_class_forward(1.0, 1.0).boundary_parameter, 4)
    3.1462
    >>> exp_class_forward(1.0, 1.0, "paper_formula").boundary_parameter
    2.0
    """
    lam0, d = _check(lam0, d)
    arg = -math.exp(-1.0 - d)
    if formula == EXACT_ROOT:
        x = 1.0 if d == 0 else -numerics.lambert_w("minus_one", arg)
        return _verified(lam0, lam0 * x, Divergence.FORWARD_KL, d, EXACT_ROOT)
    if formula == PAPER_FORMULA:
        lam1 = max(-lam0 * numerics.lambert_w("principal", arg), lam0 * (1.0 + d))
        return KnownClassSolution(lam1, 1.0 / lam1, PAPER_FORMULA)
    raise DomainError(f"unknown formula {formula!r}; use 'exact_root' or 'paper_formula'")


def exp_class_reverse(lam0: float, d: float) -> KnownClassSolution:
    """Reverse-KL worst case within the exponential class.

    ``lam1 = max(-lam0 / W_0(-exp(-1 - d)), lam0 / (1 + d))``.  The principal
    branch already sits on the boundary, so the first term always wins.
    """
    lam0, d = _check(lam0, d)
    w = -1.0 if d == 0 else numerics.lambert_w("principal", -math.exp(-1.0 - d))
    lam1 = max(-lam0 / w, lam0 / (1.0 + d))
    return _verified(lam0, lam1, Divergence.REVERSE_KL, d, EXACT_ROOT)


def exp_class_symmetrized(lam0: float, d: float) -> KnownClassSolution:
    """Symmetrized worst case: ``lam1 = lam0 (d + 1 + sqrt(d (d + 2)))``.

    This is the larger root of ``r**2 - 2 (d + 1) r + 1 = 0``, the boundary
    of ``(r + 1/r - 2) / 2 <= d``.
    """
    lam0, d = _check(lam0, d)
    lam1 = lam0 * (d + 1.0 + math.sqrt(d * (d + 2.0)))
    return _verified(lam0, lam1, Divergence.SYMMETRIZED, d, EXACT_ROOT)


def uniform_class_reverse(alpha: float, d: float) -> KnownClassSolution:
    """Reverse-KL worst case for Uniform[0, alpha]: ``beta = alpha exp(-d)``."""
    alpha, d = _check(alpha, d, "alpha")
    beta = alpha * math.exp(-d)
    return KnownClassSolution(beta, 0.5 * beta, EXACT_ROOT)


def uniform_class_dominance_check(alpha: float, beta: float, kind) -> float:
    """Divergence between Uniform[0, alpha] (nominal) and Uniform[0, beta].

    Returns ``math.inf`` whenever the law in the first argument of the KL
    term puts mass where the other has none; for ``beta < alpha`` that is
    the case under the forward and symmetrized divergences.
    """
    kind = Divergence.parse(kind)
    alpha, beta = float(alpha), float(beta)
    if not (alpha > 0 and beta > 0 and math.isfinite(alpha) and math.isfinite(beta)):
        raise DomainError("alpha and beta must be positive and finite")
    lr = math.log(alpha / beta)
    forward = -lr if beta >= alpha else math.inf
    reverse = lr if beta <= alpha else math.inf
    if kind is Divergence.FORWARD_KL:
        return forward
    if kind is Divergence.REVERSE_KL:
        return reverse
    return 0.5 * (forward + reverse)


def uniform_class(alpha: float, d: float, kind) -> KnownClassSolution:
    """Uniform-class worst case under ``kind``.

    Only the reverse KL admits a shrunken support; under the forward and
    symmetrized divergences every ``beta < alpha`` is at infinite distance
    and InfiniteDivergenceError is raised.
    """
    kind = Divergence.parse(kind)
    if kind is not Divergence.REVERSE_KL:
        alpha, d = _check(alpha, d, "alpha")
        raise InfiniteDivergenceError(
            f"{kind.value}: the nominal Uniform[0, {alpha:g}] is not dominated by any "
            "uniform law with smaller support")
    return uniform_class_reverse(alpha, d)
