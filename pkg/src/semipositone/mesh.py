"""Uniform grids, the discrete Dirichlet Laplacian and shifted Poisson solves.

Grid functions are plain numpy arrays of shape ``grid.shape`` (``(n,)`` in
1D, ``(nx, ny)`` with ``ij`` indexing in 2D).  Boundary entries of any
argument are treated as zero; boundary entries of any result are zero.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg

from .errors import ConfigurationError, ContractViolation, ConvergenceError

__all__ = [
    "Grid",
    "build_grid",
    "apply_laplacian",
    "solve_shifted_poisson",
    "ShiftedPoissonSolver",
    "inner",
]


@dataclass(frozen=True, eq=False)
class Grid:
    """Tensor-product uniform grid on an interval or a rectangle.

    Parameters
    ----------
    bounds : tuple of (lo, hi) pairs, one per axis.
    shape : tuple of node counts per axis, boundary nodes included.
    """

    bounds: tuple
    shape: tuple

    def __post_init__(self):
        if len(self.bounds) != len(self.shape) or len(self.shape) not in (1, 2):
            raise ConfigurationError("grid must be 1D or 2D with matching bounds")
        for (lo, hi), n in zip(self.bounds, self.shape):
            if not (np.isfinite(lo) and np.isfinite(hi)) or lo >= hi:
                raise ConfigurationError(f"degenerate axis ({lo}, {hi})")
            if int(n) != n or n < 3:
                raise ConfigurationError(f"need at least 3 nodes per axis, got {n}")

    def __eq__(self, other):
        return (
            isinstance(other, Grid)
            and self.bounds == other.bounds
            and self.shape == other.shape
        )

    def __hash__(self):
        return hash((self.bounds, self.shape))

    @property
    def dim(self):
        return len(self.shape)

    @property
    def n_nodes(self):
        return int(np.prod(self.shape))

    @property
    def n_interior(self):
        return int(np.prod([n - 2 for n in self.shape]))

    @property
    def spacing(self):
        return tuple((hi - lo) / (n - 1) for (lo, hi), n in zip(self.bounds, self.shape))

    @property
    def h(self):
        """Spacing of a 1D grid (largest spacing in 2D)."""
        return max(self.spacing)

    @cached_property
    def axes(self):
        return tuple(
            np.linspace(lo, hi, n) for (lo, hi), n in zip(self.bounds, self.shape)
        )

    @cached_property
    def coords(self):
        """Node coordinates: ``x`` in 1D, ``(X, Y)`` meshgrid in 2D."""
        if self.dim == 1:
            return self.axes[0]
        return tuple(np.meshgrid(*self.axes, indexing="ij"))

    @cached_property
    def interior(self):
        mask = np.zeros(self.shape, dtype=bool)
        mask[(slice(1, -1),) * self.dim] = True
        return mask

    @cached_property
    def boundary_distance(self):
        """dist(x, boundary) per node; exactly zero on boundary nodes."""
        dists = []
        for ax, (lo, hi) in zip(self.axes, self.bounds):
            d = np.minimum(ax - lo, hi - ax)
            d[0] = d[-1] = 0.0
            dists.append(d)
        if self.dim == 1:
            return dists[0]
        return np.minimum.outer(dists[0], dists[1])

    @property
    def cell_volume(self):
        return float(np.prod(self.spacing))

    def locate(self, point):
        """Index of the node nearest to ``point``."""
        point = np.atleast_1d(np.asarray(point, dtype=float))
        if point.shape != (self.dim,):
            raise ContractViolation(f"point must have {self.dim} coordinates")
        idx = tuple(
            int(np.argmin(np.abs(ax - c))) for ax, c in zip(self.axes, point)
        )
        return idx[0] if self.dim == 1 else idx


def build_grid(domain, resolution):
    """Build a uniform grid.

    ``domain`` is ``(a, b)`` for an interval or ``((a1, b1), (a2, b2))`` for
    a rectangle; ``resolution`` is a node count or one count per axis.

    >>> build_grid((0.0, 1.0), 5).coords
    array([0.  , 0.25, 0.5 , 0.75, 1.  ])
    """
    dom = np.asarray(domain, dtype=float)
    if dom.shape == (2,):
        bounds = ((float(dom[0]), float(dom[1])),)
    elif dom.ndim == 2 and dom.shape[1] == 2 and dom.shape[0] in (1, 2):
        bounds = tuple((float(lo), float(hi)) for lo, hi in dom)
    else:
        raise ConfigurationError(f"cannot interpret domain {domain!r}")
    res = np.atleast_1d(resolution)
    if res.size == 1:
        res = np.repeat(res, len(bounds))
    if res.size != len(bounds):
        raise ConfigurationError("resolution does not match domain dimension")
    if np.any(res != np.round(res)):
        raise ConfigurationError(f"node counts must be integers, got {resolution!r}")
    return Grid(bounds, tuple(int(r) for r in res))


def _as_real(u):
    # keep extended precision when given; everything else becomes float64
    u = np.asarray(u)
    return u if u.dtype in (np.float64, np.longdouble) else u.astype(float)


def _check(grid, u):
    u = _as_real(u)
    if u.shape != grid.shape:
        raise ContractViolation(
            f"grid function of shape {u.shape} does not match grid {grid.shape}"
        )
    return u


def _zero_boundary(grid, u):
    out = np.zeros(grid.shape, dtype=u.dtype)
    out[grid.interior] = u[grid.interior]
    return out


def apply_laplacian(grid, u):
    """Return ``-Δ_h u`` with u's boundary entries taken as zero.

    3-point stencil in 1D, 5-point in 2D; boundary entries of the result are 0.
    The arithmetic is done in the precision of ``u`` (float64 or longdouble).
    """
    u = _zero_boundary(grid, _check(grid, u))
    out = np.zeros(grid.shape, dtype=u.dtype)
    if grid.dim == 1:
        (h,) = grid.spacing
        out[1:-1] = (2.0 * u[1:-1] - u[:-2] - u[2:]) / h**2
    else:
        hx, hy = grid.spacing
        c = u[1:-1, 1:-1]
        out[1:-1, 1:-1] = (2.0 * c - u[:-2, 1:-1] - u[2:, 1:-1]) / hx**2 + (
            2.0 * c - u[1:-1, :-2] - u[1:-1, 2:]
        ) / hy**2
    return out


def inner(grid, u, v):
    """Cell-volume weighted inner product over interior nodes."""
    m = grid.interior
    return float(np.sum(u[m] * v[m]) * grid.cell_volume)


class ShiftedPoissonSolver:
    """Solver for ``(-Δ_h + K) u = rhs`` with homogeneous Dirichlet data.

    ``K`` is a nonnegative scalar or grid function (diagonal shift).

    In 1D the tridiagonal SPD matrix is Cholesky-factorized once, so
    repeated solves (as in monotone iteration) are cheap.  In 2D each solve
    runs conjugate gradients to relative residual ``cg_rtol``.
    """

    def __init__(self, grid, K=0.0, cg_rtol=1e-12, cg_maxiter=None):
        K_arr = np.asarray(K, dtype=float)
        if not np.all(np.isfinite(K_arr)) or np.any(K_arr < 0):
            raise ConfigurationError("shift K must be finite and >= 0")
        if K_arr.ndim and K_arr.shape != grid.shape:
            raise ContractViolation(f"nodal shift of shape {K_arr.shape} does not match grid {grid.shape}")
        self.grid = grid
        # scalar, or one shift per node (only interior entries are used)
        self.K = float(K_arr) if K_arr.ndim == 0 else K_arr[grid.interior].reshape(
            tuple(n - 2 for n in grid.shape)
        )
        self.cg_rtol = cg_rtol
        self.cg_maxiter = cg_maxiter or 10 * grid.n_interior
        self.last_iterations = 0
        if grid.dim == 1:
            (h,) = grid.spacing
            m = grid.shape[0] - 2
            ab = np.empty((2, m))
            ab[0, :] = -1.0 / h**2
            ab[1, :] = 2.0 / h**2 + self.K
            self._chol = scipy.linalg.cholesky_banded(ab, lower=False)

    def solve(self, rhs):
        rhs = _check(self.grid, rhs)
        out = np.zeros(self.grid.shape)
        if self.grid.dim == 1:
            out[1:-1] = scipy.linalg.cho_solve_banded((self._chol, False), rhs[1:-1])
        else:
            out[1:-1, 1:-1] = self._cg(rhs[1:-1, 1:-1])
        return out

    def _apply_interior(self, v):
        hx, hy = self.grid.spacing
        p = np.pad(v, 1)
        return (
            (2.0 * v - p[:-2, 1:-1] - p[2:, 1:-1]) / hx**2
            + (2.0 * v - p[1:-1, :-2] - p[1:-1, 2:]) / hy**2
            + self.K * v
        )

    def _cg(self, b):
        x = np.zeros_like(b)
        bnorm = np.linalg.norm(b)
        self.last_iterations = 0
        if bnorm == 0.0:
            return x
        r = b.copy()
        d = r.copy()
        rr = np.vdot(r, r)
        for it in range(1, self.cg_maxiter + 1):
            Ad = self._apply_interior(d)
            alpha = rr / np.vdot(d, Ad)
            x += alpha * d
            r -= alpha * Ad
            rr_new = np.vdot(r, r)
            if np.sqrt(rr_new) <= self.cg_rtol * bnorm:
                self.last_iterations = it
                return x
            d = r + (rr_new / rr) * d
            rr = rr_new
        raise ConvergenceError(
            f"CG did not converge in {self.cg_maxiter} iterations",
            residual=float(np.sqrt(rr) / bnorm),
            iterations=self.cg_maxiter,
        )


def solve_shifted_poisson(grid, K, rhs):
    """Solve ``(-Δ_h + K) u = rhs`` at interior nodes with ``u = 0`` on the boundary."""
    return ShiftedPoissonSolver(grid, K).solve(rhs)
