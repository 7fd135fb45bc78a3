"""Weight functions ``m(x)`` and admissibility tests for sign-changing weights."""

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import trapezoid

from .cone import cone_report, nodal, solution_operator, DEFAULT_CONE_TOL
from .errors import ConfigurationError, ContractViolation

__all__ = [
    "Weight",
    "EmeReport",
    "split_pm",
    "eme_check_1d",
    "eme_check_nd",
    "build_M_delta",
    "bounded_general_check",
    "integrate",
]

KINDS = ("constant", "piecewise", "sine", "polynomial", "radial_bump")


@dataclass(frozen=True)
class Weight:
    """A preset weight ``m(x)``.

    Kinds and their parameters:

    ``constant``     value
    ``piecewise``    base, pieces = [{"box": [lo, hi] or [[lo1, hi1], [lo2, hi2]], "value": v}, ...]
    ``sine``         offset, amplitude, modes (per-axis integer mode numbers)
    ``polynomial``   coeffs (1D only; ``sum(c_i * x**i)``)
    ``radial_bump``  base, height, center, radius (``base + height*(1 - r²/R²)_+``)

    Piecewise weights are sampled nodewise.  A node lying exactly on a
    breakpoint receives the average of the adjacent values, which keeps the
    trapezoid rule exact for piecewise linear integrands when breakpoints
    sit on grid nodes.
    """

    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigurationError(f"unknown weight kind {self.kind!r}")

    # -- constructors -------------------------------------------------------
    @classmethod
    def constant(cls, value):
        return cls("constant", {"value": float(value)})

    @classmethod
    def piecewise(cls, base, pieces):
        return cls(
            "piecewise",
            {"base": float(base), "pieces": [{"box": p["box"], "value": float(p["value"])} for p in pieces]},
        )

    @classmethod
    def step(cls, gamma, lo=0.4, hi=0.6):
        """1 outside ``(lo, hi)`` and ``-gamma`` inside."""
        return cls.piecewise(1.0, [{"box": [lo, hi], "value": -gamma}])

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        try:
            kind = d.pop("kind")
        except KeyError:
            raise ConfigurationError("weight spec needs a 'kind'") from None
        return cls(kind, d)

    def to_dict(self):
        return {"kind": self.kind, **self.params}

    # -- evaluation ---------------------------------------------------------
    def _param(self, name, default=None):
        if name in self.params:
            return self.params[name]
        if default is None:
            raise ConfigurationError(f"{self.kind} weight needs parameter {name!r}")
        return default

    def __call__(self, *coords):
        coords = [np.asarray(c, dtype=float) for c in coords]
        kind = self.kind
        if kind == "constant":
            return np.full(np.broadcast(*coords).shape, float(self._param("value")))
        if kind == "piecewise":
            return self._eval_piecewise(coords)
        if kind == "sine":
            modes = np.atleast_1d(self._param("modes", [1] * len(coords)))
            lo_hi = self.params.get("bounds")
            out = np.ones(np.broadcast(*coords).shape)
            for i, c in enumerate(coords):
                a, b = lo_hi[i] if lo_hi else (0.0, 1.0)
                out = out * np.sin(modes[i] * np.pi * (c - a) / (b - a))
            return float(self._param("offset", 0.0)) + float(self._param("amplitude")) * out
        if kind == "polynomial":
            if len(coords) != 1:
                raise ConfigurationError("polynomial weights are 1D only")
            return np.polynomial.polynomial.polyval(coords[0], self._param("coeffs"))
        center = np.atleast_1d(self._param("center"))
        if center.size != len(coords):
            raise ConfigurationError("radial_bump center dimension mismatch")
        r2 = sum((c - x0) ** 2 for c, x0 in zip(coords, center))
        R = float(self._param("radius"))
        bump = np.clip(1.0 - r2 / R**2, 0.0, None)
        return float(self._param("base", 0.0)) + float(self._param("height")) * bump

    def _boxes(self, dim):
        boxes = []
        for piece in self._param("pieces"):
            box = np.asarray(piece["box"], dtype=float).reshape(-1, 2)
            if box.shape[0] != dim:
                raise ConfigurationError(f"piece box {piece['box']} is not {dim}D")
            if np.any(box[:, 0] >= box[:, 1]):
                raise ConfigurationError(f"degenerate piece box {piece['box']}")
            boxes.append((box, float(piece["value"])))
        return boxes

    def _one_sided(self, coords):
        """Piecewise values just off each node in every diagonal direction."""
        boxes = self._boxes(len(coords))
        shape = np.broadcast(*coords).shape
        scale = max(float(np.ptp(c)) if c.size > 1 else 1.0 for c in coords) or 1.0
        eta = 1e-9 * scale
        out = []
        for shift in itertools.product((-eta, eta), repeat=len(coords)):
            vals = np.full(shape, float(self._param("base")))
            pts = [c + s for c, s in zip(coords, shift)]
            for box, value in boxes:
                inside = np.ones(shape, dtype=bool)
                for c, (lo, hi) in zip(pts, box):
                    inside &= (c >= lo) & (c < hi)
                vals[inside] = value
            out.append(vals)
        return out

    def _eval_piecewise(self, coords):
        return np.mean(self._one_sided(coords), axis=0)

    def sample(self, grid):
        if self.kind == "piecewise":
            for box, _ in self._boxes(grid.dim):
                for (lo, hi), (a, b) in zip(box, grid.bounds):
                    if lo < a or hi > b:
                        raise ConfigurationError(f"piece box {box.tolist()} leaves the domain")
        if self.kind == "sine" and "bounds" not in self.params:
            w = Weight("sine", {**self.params, "bounds": [list(b) for b in grid.bounds]})
            return w.sample(grid)
        coords = grid.coords if grid.dim == 2 else (grid.coords,)
        vals = np.asarray(self(*coords), dtype=float)
        if not np.all(np.isfinite(vals)):
            raise ConfigurationError(f"{self.kind} weight is not finite on the grid")
        return vals

    def sample_parts(self, grid):
        """Nodal ``(m+, m-)`` for quadrature.

        At a breakpoint node each part is the average of its one-sided
        values, so trapezoid sums of ``m+`` and ``m-`` are exact for
        piecewise linear integrands.  Elsewhere this equals :func:`split_pm`.
        """
        vals = self.sample(grid)
        if self.kind != "piecewise":
            return np.maximum(vals, 0.0), np.maximum(-vals, 0.0)
        coords = grid.coords if grid.dim == 2 else (grid.coords,)
        sides = self._one_sided(coords)
        plus = np.mean([np.maximum(v, 0.0) for v in sides], axis=0)
        minus = np.mean([np.maximum(-v, 0.0) for v in sides], axis=0)
        return plus, minus

    def sup_norm(self, grid):
        return float(np.max(np.abs(self.sample(grid))))


@dataclass(frozen=True)
class EmeReport:
    """Sufficient integral test for positivity of ``S(m)``.

    ``holds`` certifies ``S(m)`` in the cone interior; ``holds=False`` is
    not a refutation.
    """

    lhs: float
    rhs: float
    holds: bool
    margin: float
    conditional: bool = False


def integrate(grid, values):
    """Composite trapezoid rule over the whole grid."""
    values = np.asarray(values, dtype=float)
    if grid.dim == 1:
        return float(trapezoid(values, grid.axes[0]))
    return float(trapezoid(trapezoid(values, grid.axes[1], axis=1), grid.axes[0]))


def split_pm(m, grid):
    """Nodal positive and negative parts ``(m+, m-)`` of ``m``."""
    vals = nodal(m, grid)
    return np.maximum(vals, 0.0), np.maximum(-vals, 0.0)


def _quadrature_parts(m, grid):
    if isinstance(m, Weight):
        return m.sample_parts(grid)
    return split_pm(m, grid)


def _report(lhs, rhs, conditional=False):
    return EmeReport(lhs=lhs, rhs=rhs, holds=bool(lhs < rhs), margin=rhs - lhs, conditional=conditional)


def eme_check_1d(m, grid):
    if grid.dim != 1:
        raise ContractViolation("eme_check_1d needs a 1D grid")
    (a, b), = grid.bounds
    x = grid.axes[0]
    mp, mm = _quadrature_parts(m, grid)
    lhs = max(integrate(grid, (x - a) * mm), integrate(grid, (b - x) * mm))
    rhs = integrate(grid, grid.boundary_distance * mp)
    return _report(lhs, rhs)


def eme_check_nd(m, grid, c_domain, q):
    """``c_domain * ||m-||_{L^q} < ∫ dist(x, boundary) m+``.

    The result is conditional on the user-supplied domain constant.
    """
    if not c_domain > 0:
        raise ConfigurationError(f"c_domain must be > 0, got {c_domain}")
    if not q > grid.dim:
        raise ConfigurationError(f"need q > N = {grid.dim}, got q={q}")
    mp, mm = _quadrature_parts(m, grid)
    lhs = c_domain * integrate(grid, mm**q) ** (1.0 / q)
    rhs = integrate(grid, grid.boundary_distance * mp)
    return _report(lhs, rhs, conditional=True)


def build_M_delta(m, c, C, k, delta, grid):
    """Derived weight of the bounded-nonlinearity construction.

    ``(c-k) m - delta |m|`` on ``{dist >= delta}`` and ``-k m+ - (C-k) m-``
    (that is, ``(c-k) m - (c m + C m-)``) on the boundary layer.
    """
    if not c > k:
        raise ConfigurationError(f"need c > k, got c={c}, k={k}")
    if not C >= c:
        raise ConfigurationError(f"need C >= c, got C={C}, c={c}")
    dist = grid.boundary_distance
    if not 0 < delta < dist.max():
        raise ConfigurationError(f"delta={delta} leaves an empty inner region")
    vals = nodal(m, grid)
    mm = np.maximum(-vals, 0.0)
    inner = dist >= delta - 1e-12 * max(grid.spacing)
    return np.where(
        inner,
        (c - k) * vals - delta * np.abs(vals),
        (c - k) * vals - (c * vals + C * mm),
    )


def bounded_general_check(m, l0, l1, grid, tol=DEFAULT_CONE_TOL):
    """Cone report of ``S(l0 m+ - l1 m-)`` for merely bounded nonlinearities."""
    if not 0 < l0 <= l1:
        raise ConfigurationError(f"need 0 < l0 <= l1, got ({l0}, {l1})")
    mp, mm = split_pm(m, grid)
    return cone_report(solution_operator(l0 * mp - l1 * mm, grid), grid, tol)
