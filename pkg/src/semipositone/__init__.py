"""Positive solutions of ``-Δu = λ m(x) (f(u) - k)`` with zero Dirichlet data.

Finite differences on uniform 1D/2D grids, explicit sub/supersolution
pairs with discrete certificates, and monotone iteration between them.
"""

from .errors import (
    AdmissibilityError,
    BracketingError,
    ConfigurationError,
    ConstructionError,
    ContractViolation,
    ConvergenceError,
    DataError,
    DomainError,
    NotFoundError,
    RangeError,
    SemipositoneError,
)
from .estimator import SemipositoneSolver, Solution, SweepRecord
from .experiments import Scenario, find_lambda0, fit_exponent, run_scenario, sweep, write_csv
from .mesh import Grid, build_grid, solve_shifted_poisson
from .nonlinearity import Nonlinearity
from .weights import Weight

__version__ = "0.1.0"

__all__ = [
    "AdmissibilityError",
    "BracketingError",
    "ConfigurationError",
    "ConstructionError",
    "ContractViolation",
    "ConvergenceError",
    "DataError",
    "DomainError",
    "NotFoundError",
    "RangeError",
    "SemipositoneError",
    "SemipositoneSolver",
    "Solution",
    "SweepRecord",
    "Scenario",
    "find_lambda0",
    "fit_exponent",
    "run_scenario",
    "sweep",
    "write_csv",
    "Grid",
    "build_grid",
    "solve_shifted_poisson",
    "Nonlinearity",
    "Weight",
]
