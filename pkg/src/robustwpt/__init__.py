"""Worst-case average harvested energy under distributional uncertainty.

The true distribution of the harvested energy is only known to lie in a
divergence ball of radius ``d`` around a nominal law.  This package
computes the smallest mean over that ball, together with the distribution
attaining it, for the forward KL, reverse KL and symmetrized divergences.

Modules
-------
numerics     special functions, adaptive quadrature and root finding
nominal      nominal distributions (exponential, uniform, tabulated)
worstcase    worst-case solvers and derived quantities
knownclass   closed forms when the true law shares the nominal's family
oracle       independent grid discretisation solved by a barrier method
cli          command line front end
"""

from .exceptions import (ConvergenceError, DomainError, InfiniteDivergenceError,
                         QuadratureError, RobustWPTError, RootFindingError,
                         SingularJacobianError, TableFormatError)
from .knownclass import (KnownClassSolution, exp_class_forward, exp_class_reverse,
                         exp_class_symmetrized, uniform_class, uniform_class_dominance_check,
                         uniform_class_reverse)
from .nominal import Exponential, NominalModel, Tabulated, Uniform, load_table, parse_nominal
from .numerics import exp_integral_e1, lambert_w, wright_omega
from .oracle import GridDistribution, cross_check, discretize, solve_discrete
from .worstcase import (Divergence, ReverseMode, UncertaintySet, WorstCaseSolution,
                        achieved_divergence, energy_outage, solve, solve_forward_kl,
                        solve_reverse_kl, solve_symmetrized, worst_cdf)

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError", "DomainError", "InfiniteDivergenceError", "QuadratureError",
    "RobustWPTError", "RootFindingError", "SingularJacobianError", "TableFormatError",
    "KnownClassSolution", "exp_class_forward", "exp_class_reverse", "exp_class_symmetrized",
    "uniform_class", "uniform_class_dominance_check", "uniform_class_reverse",
    "Exponential", "NominalModel", "Tabulated", "Uniform", "load_table", "parse_nominal",
    "exp_integral_e1", "lambert_w", "wright_omega",
    "GridDistribution", "cross_check", "discretize", "solve_discrete",
    "Divergence", "ReverseMode", "UncertaintySet", "WorstCaseSolution",
    "achieved_divergence", "energy_outage", "solve", "solve_forward_kl",
    "solve_reverse_kl", "solve_symmetrized", "worst_cdf",
]
