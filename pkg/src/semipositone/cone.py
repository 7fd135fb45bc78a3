"""The solution operator of ``-Δu = m`` and the discrete cone-interior test."""

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation
from .mesh import solve_shifted_poisson

__all__ = ["ConeReport", "solution_operator", "cone_report", "DEFAULT_CONE_TOL"]

DEFAULT_CONE_TOL = 1e-8


@dataclass(frozen=True)
class ConeReport:
    """Positivity certificate of a grid function vanishing on the boundary.

    ``margin`` is ``min u(x)/dist(x, boundary)`` over interior nodes, so a
    positive margin encodes both interior positivity and a strictly
    negative outward slope at the boundary.
    """

    margin: float
    min_value: float
    is_member: bool


def nodal(m, grid):
    """Sample ``m`` (a weight or a nodal array) on ``grid``."""
    if hasattr(m, "sample"):
        return m.sample(grid)
    if np.isscalar(m):
        return np.full(grid.shape, float(m))
    arr = np.asarray(m, dtype=float)
    if arr.shape != grid.shape:
        raise ContractViolation(f"nodal array of shape {arr.shape} != grid {grid.shape}")
    return arr


def solution_operator(m, grid):
    """``S(m)``: solution of ``-Δ_h u = m`` with zero Dirichlet data."""
    return solve_shifted_poisson(grid, 0.0, nodal(m, grid))


def cone_report(u, grid, tol=DEFAULT_CONE_TOL):
    mask = grid.interior
    vals = np.asarray(u, dtype=float)[mask]
    ratio = vals / grid.boundary_distance[mask]
    margin = float(ratio.min())
    return ConeReport(margin=margin, min_value=float(vals.min()), is_member=bool(margin > tol))
