"""Right-hand sides ``g(x, s)`` of the semilinear problems solved here.

Each object evaluates ``g(·, u)`` at interior nodes (boundary entries are
zero) and bounds ``|∂g/∂s|`` on an order interval, which fixes the shift of
the monotone scheme.
"""

import numpy as np

from .cone import nodal
from .errors import DomainError
from .mesh import apply_laplacian
from .nonlinearity import SAFETY, eval_f, lipschitz_bound

__all__ = ["SemipositoneRhs", "PowerRhs", "residual"]


class SemipositoneRhs:
    """``g(x, s) = lam * m(x) * (f(s) - k)``."""

    def __init__(self, grid, lam, m, f, k):
        self.grid = grid
        self.lam = float(lam)
        self.m = nodal(m, grid)
        self.f = f
        self.k = float(k)
        self.m_sup = float(np.max(np.abs(self.m)))

    @property
    def scale(self):
        return self.lam * self.m_sup

    @property
    def needs_positive(self):
        return self.f.family == "F3"

    def __call__(self, u):
        mask = self.grid.interior
        u = np.asarray(u)
        out = np.zeros(self.grid.shape, dtype=np.result_type(u.dtype, float))
        out[mask] = self.lam * self.m[mask] * (eval_f(self.f, u[mask]) - self.k)
        return out

    def slope_bound(self, lo, hi):
        """Bound on ``|∂g/∂s|``; nodewise when ``lo``/``hi`` are grid functions."""
        m = self.m_sup if np.ndim(lo) == 0 else np.abs(self.m)
        return self.lam * m * lipschitz_bound(self.f, lo, hi)


class PowerRhs:
    """``g(x, s) = a(x) * s**q - b(x)``.

    Covers the auxiliary problems: ``q = p`` in (0, 1) for the sublinear
    ones, ``q = -p`` for the singular one.
    """

    def __init__(self, grid, a, q, b=0.0):
        self.grid = grid
        self.a = nodal(a, grid)
        self.q = float(q)
        self.b = nodal(b, grid)
        self.a_sup = float(np.max(np.abs(self.a)))

    @property
    def scale(self):
        return self.a_sup + float(np.max(np.abs(self.b)))

    @property
    def needs_positive(self):
        return self.q < 0

    def __call__(self, u):
        mask = self.grid.interior
        u = np.asarray(u)
        s = u[mask]
        if self.q < 0 and np.any(s <= 0):
            raise DomainError("singular power evaluated at s <= 0")
        if np.any(s < 0):
            raise DomainError("power nonlinearity evaluated at s < 0")
        out = np.zeros(self.grid.shape, dtype=np.result_type(u.dtype, float))
        out[mask] = self.a[mask] * s**self.q - self.b[mask]
        return out

    def slope_bound(self, lo, hi):
        """Bound on ``|∂g/∂s|``; nodewise when ``lo``/``hi`` are grid functions.

        Where ``lo == 0`` (only allowed for ``q > 0``) the secant cap
        ``max(hi**(q-1), 1)`` is used.
        """
        lo_a = np.asarray(lo, dtype=float)
        hi_a = np.asarray(hi, dtype=float)
        a = self.a_sup if lo_a.ndim == 0 else np.abs(self.a)
        if self.q < 0 and np.any(lo_a <= 0):
            raise DomainError("singular power slope bound needs lo > 0")
        with np.errstate(divide="ignore", invalid="ignore"):
            local = abs(self.q) * lo_a ** (self.q - 1.0)
            secant = np.where(hi_a > 0, hi_a ** (self.q - 1.0), 0.0)
        out = SAFETY * a * np.where(lo_a > 0, local, np.maximum(secant, 1.0))
        return float(out) if out.ndim == 0 else out


def residual(rhs, u):
    """Nodal ``-Δ_h u - g(·, u)``; zero on boundary nodes."""
    return apply_laplacian(rhs.grid, u) - rhs(u)
