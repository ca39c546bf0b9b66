import math

import numpy as np
import pytest
from scipy import optimize, special

from robustwpt.exceptions import DomainError, InfiniteDivergenceError
from robustwpt.knownclass import (exp_class_divergence, exp_class_forward, exp_class_reverse,
                                  exp_class_symmetrized, uniform_class,
                                  uniform_class_dominance_check, uniform_class_reverse)
from robustwpt.nominal import Exponential
from robustwpt.worstcase import solve_reverse_kl

D_GRID = np.linspace(0.0, 5.0, 50)


def test_zero_radius_gives_nominal_rate():
    for lam0 in (0.5, 1.0, 3.0):
        assert exp_class_forward(lam0, 0).boundary_parameter == lam0
        assert exp_class_forward(lam0, 0, "paper_formula").boundary_parameter == lam0
        assert exp_class_reverse(lam0, 0).boundary_parameter == lam0
        assert exp_class_symmetrized(lam0, 0).boundary_parameter == lam0


def test_forward_examples():
    ref = optimize.brentq(lambda x: x - math.log(x) - 2, 1.0, 10.0, xtol=1e-15)
    sol = exp_class_forward(1.0, 1.0)
    assert abs(sol.boundary_parameter - 3.1462) < 1e-4
    assert sol.boundary_parameter == pytest.approx(ref, rel=1e-13)
    assert sol.mean == 1 / sol.boundary_parameter
    assert sol.formula_used == "exact_root"
    paper = exp_class_forward(1.0, 1.0, "paper_formula")
    assert paper.boundary_parameter == 2.0 and paper.formula_used == "paper_formula"
    assert -special.lambertw(-math.exp(-2), 0).real < 2.0
    with pytest.raises(DomainError):
        exp_class_forward(1.0, 1.0, "guess")


def test_reverse_examples():
    sol = exp_class_reverse(1.0, 1.0)
    assert abs(sol.boundary_parameter - 6.305) < 1e-3
    assert sol.boundary_parameter == pytest.approx(-1 / special.lambertw(-math.exp(-2), 0).real,
                                                   rel=1e-13)
    r4, r2 = (exp_class_reverse(1.0, d).boundary_parameter for d in (4.0, 2.0))
    assert r4 / r2 > 5 / 3


def test_symmetrized_examples():
    assert abs(exp_class_symmetrized(1.0, 1.0).boundary_parameter - (2 + math.sqrt(3))) <= 1e-12
    assert exp_class_symmetrized(2.0, 1.0).boundary_parameter == pytest.approx(
        2 * (2 + math.sqrt(3)), rel=1e-15)


def test_uniform_examples():
    s = uniform_class_reverse(2.0, 0.0)
    assert (s.boundary_parameter, s.mean) == (2.0, 1.0)
    s = uniform_class_reverse(1.0, math.log(2))
    assert abs(s.boundary_parameter - 0.5) <= 1e-12 and abs(s.mean - 0.25) <= 1e-12
    assert uniform_class_reverse(1.0, 1.0).mean == pytest.approx(math.exp(-1) / 2, rel=1e-15)


def test_dominance_check():
    assert uniform_class_dominance_check(2.0, 1.0, "forward-kl") == math.inf
    assert uniform_class_dominance_check(2.0, 1.0, "symmetrized") == math.inf
    assert uniform_class_dominance_check(2.0, 1.0, "reverse-kl") == pytest.approx(math.log(2))
    for kind in ("forward-kl", "reverse-kl", "symmetrized"):
        assert uniform_class_dominance_check(1.5, 1.5, kind) == 0.0
    # a wider uniform flips which direction is infinite
    assert uniform_class_dominance_check(1.0, 2.0, "reverse-kl") == math.inf
    assert uniform_class_dominance_check(1.0, 2.0, "forward-kl") == pytest.approx(math.log(2))
    with pytest.raises(DomainError):
        uniform_class_dominance_check(0.0, 1.0, "forward-kl")


def test_uniform_class_signals_infinite_divergence():
    for kind in ("forward-kl", "symmetrized"):
        with pytest.raises(InfiniteDivergenceError):
            uniform_class(1.0, 0.5, kind)
    assert uniform_class(1.0, 0.5, "reverse-kl").mean == pytest.approx(math.exp(-0.5) / 2)


@pytest.mark.parametrize("lam0", [0.3, 1.0, 4.0])
def test_boundary_on_grid(lam0):
    prev = {}
    for d in D_GRID:
        for kind, f in (("forward-kl", exp_class_forward), ("reverse-kl", exp_class_reverse),
                        ("symmetrized", exp_class_symmetrized)):
            lam1 = f(lam0, d).boundary_parameter
            assert lam1 >= lam0
            assert abs(exp_class_divergence(lam0, lam1, kind) - d) <= 1e-10
            assert lam1 >= prev.get(kind, 0.0)
            prev[kind] = lam1
        b = uniform_class_reverse(lam0, d).boundary_parameter
        assert 0 < b <= lam0
        assert abs(uniform_class_dominance_check(lam0, b, "reverse-kl") - d) <= 1e-12


def test_reverse_log_identity_on_grid():
    for d in D_GRID:
        lam1 = exp_class_reverse(1.0, d).boundary_parameter
        assert abs(math.log(lam1) + 1 / lam1 - 1 - d) <= 1e-10


def test_ordering_at_fixed_radius():
    for d in D_GRID[1:]:
        paper = exp_class_forward(1.0, d, "paper_formula").boundary_parameter
        exact = exp_class_forward(1.0, d).boundary_parameter
        rev = exp_class_reverse(1.0, d).boundary_parameter
        assert paper == pytest.approx(1 + d)
        assert paper <= exact <= rev


@pytest.mark.parametrize("d", [0.1, 0.5, 1.0])
def test_matches_reverse_solver(d):
    sol = solve_reverse_kl(Exponential(1.0), d)
    assert abs(exp_class_reverse(1.0, d).mean - sol.mean) <= 1e-8


@pytest.mark.parametrize("bad", [(0.0, 1.0), (-1.0, 1.0), (1.0, -0.1), (1.0, math.nan),
                                 (math.inf, 1.0)])
def test_invalid_inputs(bad):
    for f in (exp_class_forward, exp_class_reverse, exp_class_symmetrized, uniform_class_reverse):
        with pytest.raises(DomainError):
            f(*bad)
