"""Input checks shared by the estimator, experiments and CLI layers."""

import numpy as np
from sklearn.utils import check_array

from .errors import ConfigurationError

__all__ = ["check_lambdas", "check_probe", "check_lambda_range"]


def check_lambdas(X):
    """Flatten ``X`` to a 1D float array of finite positive λ values."""
    arr = check_array(np.atleast_1d(np.asarray(X, dtype=float)), ensure_2d=False, ensure_all_finite=True)
    arr = arr.ravel()
    if arr.size == 0:
        raise ConfigurationError("need at least one lambda")
    if np.any(arr <= 0):
        raise ConfigurationError("lambda values must be > 0")
    return arr


def check_probe(grid, probe=None):
    """Index of the node nearest ``probe`` (default: domain midpoint).

    The point must lie strictly inside the domain and its nearest node
    must be interior.
    """
    if probe is None:
        probe = [0.5 * (lo + hi) for lo, hi in grid.bounds]
    pt = np.atleast_1d(np.asarray(probe, dtype=float))
    if pt.size != grid.dim:
        raise ConfigurationError(f"probe has {pt.size} coordinates, grid is {grid.dim}D")
    for x, (lo, hi) in zip(pt, grid.bounds):
        if not lo < x < hi:
            raise ConfigurationError(f"probe point {pt.tolist()} is not strictly interior")
    idx = grid.locate(pt)
    if not grid.interior[idx]:
        raise ConfigurationError(f"probe point {pt.tolist()} rounds to a boundary node")
    return idx


def check_lambda_range(lam_range, min_decades=4.0):
    lo, hi = (float(v) for v in lam_range)
    if not (0 < lo < hi and np.isfinite(hi)):
        raise ConfigurationError(f"bad lambda range ({lo}, {hi})")
    if np.log10(hi / lo) < min_decades - 1e-12:
        raise ConfigurationError(f"lambda range must span >= {min_decades:g} decades, got ({lo:g}, {hi:g})")
    return lo, hi
