"""Explicit sub/supersolution pairs and their discrete certificates.

Every constructor returns a :class:`SubSuperPair` whose validity is decided
by nodewise residuals of the discrete equation, never by the analytic
constants alone; those constants are kept in ``meta`` for diagnostics.
"""

from dataclasses import dataclass, field

import numpy as np

from .cone import DEFAULT_CONE_TOL, cone_report, nodal, solution_operator
from .errors import (
    AdmissibilityError,
    ConfigurationError,
    ConstructionError,
    ContractViolation,
    RangeError,
)
from .nonlinearity import eval_f
from .rhs import PowerRhs, SemipositoneRhs, residual
from .weights import build_M_delta

__all__ = [
    "SubSuperPair",
    "default_tol_res",
    "residual_report",
    "certify",
    "construct_pair_sublinear",
    "construct_pair_bounded",
    "construct_pair_singular",
    "lemma_pair",
    "singular_exponent",
]

T_DOUBLINGS = 60
N_SAMPLES = 10_000
# log-spaced range used to probe limits of f at 0 and infinity
S_PROBE = np.logspace(-12, 12, N_SAMPLES)


def default_tol_res(scale):
    return 1e-8 * (1.0 + scale)


@dataclass
class SubSuperPair:
    sub: np.ndarray
    super: np.ndarray
    meta: dict = field(default_factory=dict)
    sub_residual_max: float = np.nan
    super_residual_min: float = np.nan
    ordered: bool = False
    tol_res: float = 0.0

    @property
    def valid(self):
        return bool(
            self.sub_residual_max <= self.tol_res
            and self.super_residual_min >= -self.tol_res
            and self.ordered
        )

    def valid_at(self, tol_res):
        return bool(
            self.sub_residual_max <= tol_res
            and self.super_residual_min >= -tol_res
            and self.ordered
        )


def _ordered(grid, sub, sup):
    scale = max(1.0, float(np.max(np.abs(sup))))
    return bool(np.all(sub[grid.interior] <= sup[grid.interior] + 1e-12 * scale))


def certify(rhs, sub, sup, meta=None, tol_res=None):
    """Residual certificates of ``(sub, sup)`` for ``-Δu = g(·, u)``."""
    grid = rhs.grid
    tol_res = default_tol_res(rhs.scale) if tol_res is None else tol_res
    mask = grid.interior
    return SubSuperPair(
        sub=sub,
        super=sup,
        meta=dict(meta or {}),
        sub_residual_max=float(residual(rhs, sub)[mask].max()),
        super_residual_min=float(residual(rhs, sup)[mask].min()),
        ordered=_ordered(grid, sub, sup),
        tol_res=tol_res,
    )


def residual_report(u, lam, m, f, k, role, grid):
    """Max (``role="sub"``) or min (``role="super"``) of ``-Δ_h u - lam m (f(u) - k)``."""
    if role not in ("sub", "super"):
        raise ConfigurationError(f"role must be 'sub' or 'super', got {role!r}")
    r = residual(SemipositoneRhs(grid, lam, m, f, k), np.asarray(u, dtype=float))
    r = r[grid.interior]
    return float(r.max() if role == "sub" else r.min())


def _grow_super(make_super, t0, accept):
    """Double ``t`` from ``t0`` until ``accept(t, super)`` returns None.

    ``accept`` returns None on success or the flat index of a violated node.
    """
    t = t0
    for _ in range(T_DOUBLINGS + 1):
        sup = make_super(t)
        bad = accept(t, sup)
        if bad is None:
            return t, sup
        t *= 2.0
    raise ConstructionError(
        f"supersolution scale exceeded 2^{T_DOUBLINGS} * t0 (t0={t0:g}); violated node {bad}",
        node=bad,
    )


def _first_violation(mask_bad):
    idx = np.flatnonzero(mask_bad)
    return int(idx[0]) if idx.size else None


def _interior_inf(grid, values):
    return float(np.min(values[grid.interior]))


def _sublinear_constants(grid, w, beta, p, m_vals, f, k):
    """epsilon, s0, S_const and the threshold lambda implied by them."""
    m_sup = float(np.max(np.abs(m_vals)))
    wi = w[grid.interior]
    with np.errstate(divide="ignore"):
        eps = float(np.min(beta / wi**p)) if np.all(wi > 0) else np.inf
    if not np.isfinite(eps) or m_sup == 0:
        return {"epsilon": eps, "s0": 0.0, "S_const": 0.0, "lambda0_bound": 0.0}
    bound = eps / (2.0 * m_sup)
    fails = np.abs(1.0 - eval_f(f, S_PROBE) / S_PROBE**p) >= bound
    s0 = float(S_PROBE[fails].max()) if fails.any() else 0.0
    if k > 0:
        s0 = max(s0, (k / bound) ** (1.0 / p))
    s = np.linspace(0.0, s0, N_SAMPLES)
    S_const = float(np.max(np.abs(s**p - eval_f(f, s))))
    need = S_const * m_sup + k * float(np.max(m_vals))
    lam0 = (need / beta) ** ((1.0 - p) / p) if need > 0 else 0.0
    return {"epsilon": eps, "s0": s0, "S_const": S_const, "lambda0_bound": lam0}


def construct_pair_sublinear(lam, w, beta, p, m, f, k, grid):
    """Pair ``(lam**(1/(1-p)) w, t (e + 1))`` with ``e = S(1)``.

    ``w`` solves ``-Δw = m w^p - beta``.  ``t`` doubles from
    ``max(1, ||sub||)`` until ``t >= lam m (f(t(e+1)) - k)`` at every
    interior node and the pair is ordered.
    """
    if f.family != "F1":
        raise ConfigurationError("the sublinear pair needs an F1 nonlinearity")
    if abs(f.p - p) > 1e-15:
        raise ConfigurationError(f"exponent p={p} does not match f.p={f.p}")
    if lam <= 0:
        raise ConfigurationError(f"lambda must be > 0, got {lam}")
    w = np.asarray(w, dtype=float)
    m_vals = nodal(m, grid)
    rhs = SemipositoneRhs(grid, lam, m_vals, f, k)
    mask = grid.interior

    sub = lam ** (1.0 / (1.0 - p)) * w
    e = solution_operator(1.0, grid)

    def accept(t, sup):
        ineq = t >= lam * m_vals * (eval_f(f, sup) - k)
        bad = mask & ~(ineq & (sub <= sup))
        return _first_violation(bad)

    t0 = max(1.0, float(np.max(sub)))
    t, sup = _grow_super(lambda t: t * (e + 1.0), t0, accept)
    meta = {"lambda": lam, "construction": "sublinear", "t": t, "beta": beta, "p": p}
    meta.update(_sublinear_constants(grid, w, beta, p, m_vals, f, k))
    return certify(rhs, sub, sup, meta)


def construct_pair_bounded(lam, m, f, k, delta, grid, cone_tol=DEFAULT_CONE_TOL):
    """Pair ``(lam S(M_delta), t S(|m|))`` for a saturating nonlinearity."""
    if f.family != "F2":
        raise ConfigurationError("the bounded pair needs an F2 nonlinearity")
    if lam <= 0:
        raise ConfigurationError(f"lambda must be > 0, got {lam}")
    c, C = float(f.c), f.sup
    m_vals = nodal(m, grid)
    M = build_M_delta(m_vals, c, C, k, delta, grid)
    w = solution_operator(M, grid)
    report = cone_report(w, grid, cone_tol)
    if not report.is_member:
        raise AdmissibilityError(
            f"S(M_delta) is not in the cone interior (margin {report.margin:.3g})",
            stage="bounded:S(M_delta)",
            margin=report.margin,
        )
    rhs = SemipositoneRhs(grid, lam, m_vals, f, k)
    phi = solution_operator(np.abs(m_vals), grid)
    sub = lam * w
    mask = grid.interior
    tol_res = default_tol_res(rhs.scale)

    def accept(t, sup):
        r = residual(rhs, sup)
        bad = mask & ((r < -tol_res) | (sub > sup))
        return _first_violation(bad)

    t, sup = _grow_super(lambda t: t * phi, lam * C, accept)
    meta = {
        "lambda": lam,
        "construction": "bounded",
        "t": t,
        "delta": delta,
        "c": c,
        "C": C,
        "w": w,
        "phi": phi,
        "w_cone_margin": report.margin,
    }
    return certify(rhs, sub, sup, meta, tol_res)


def singular_exponent(p):
    """``sigma = 1/(1+p)``; satisfies ``1 - sigma p = sigma``."""
    return 1.0 / (1.0 + p)


def _singular_s1(f, p):
    ok = eval_f(f, S_PROBE) * S_PROBE**p < 2.0
    if not ok[0]:
        return 0.0
    bad = np.flatnonzero(~ok)
    return float(S_PROBE[-1] if bad.size == 0 else S_PROBE[bad[0] - 1])


def singular_lambda0(t, sigma, s1, k, phi_sup):
    b1 = (s1 / t) ** (1.0 / sigma) / phi_sup
    b2 = (t * sigma / k) ** (1.0 / (1.0 - sigma)) / phi_sup if k > 0 else np.inf
    return float(min(b1, b2))


def construct_pair_singular(lam, w, delta, p, m, f, k, grid):
    """Pair ``(lam**sigma w, t (lam phi)**sigma)`` with ``phi = S(|m|)``.

    ``w`` solves ``-Δw = (m - delta) w^(-p)``.  ``t`` is the smallest value
    with ``t^(p+1) sigma > 2`` (1% margin) and ``w <= t phi^sigma``.
    Raises :class:`RangeError` when ``lam`` exceeds the resulting lambda0.
    """
    if f.family != "F3":
        raise ConfigurationError("the singular pair needs an F3 nonlinearity")
    if abs(f.p - p) > 1e-15:
        raise ConfigurationError(f"exponent p={p} does not match f.p={f.p}")
    if lam <= 0:
        raise ConfigurationError(f"lambda must be > 0, got {lam}")
    w = np.asarray(w, dtype=float)
    mask = grid.interior
    if not np.all(w[mask] > 0):
        raise AdmissibilityError("w must be strictly positive at interior nodes", stage="singular:w")
    m_vals = nodal(m, grid)
    sigma = singular_exponent(p)
    phi = solution_operator(np.abs(m_vals), grid)
    if not np.all(phi[mask] > 0):
        raise ConstructionError("S(|m|) vanishes at an interior node")
    phis = phi**sigma
    t = max(1.01 * (2.0 / sigma) ** (1.0 / (p + 1.0)), float(np.max(w[mask] / phis[mask])))
    if not np.all(w[mask] <= t * phis[mask] * (1 + 1e-12)):
        raise ConstructionError("w <= t phi^sigma fails after scale adjustment")
    s1 = _singular_s1(f, p)
    phi_sup = float(np.max(phi))
    lam0 = singular_lambda0(t, sigma, s1, k, phi_sup)
    if lam > lam0:
        raise RangeError(f"lambda={lam:g} exceeds lambda0={lam0:g}", bound=lam0)
    rhs = SemipositoneRhs(grid, lam, m_vals, f, k)
    sub = lam**sigma * w
    sup = t * (lam * phi) ** sigma
    meta = {
        "lambda": lam,
        "construction": "singular",
        "sigma": sigma,
        "t": t,
        "s1": s1,
        "lambda0": lam0,
        "delta": delta,
        "phi": phi,
    }
    return certify(rhs, sub, sup, meta)


def lemma_pair(m, h, beta, delta, p, w_U, grid):
    """Pair ``(w_U - beta v, t phi)`` for ``-Δu = m u^p - beta h``.

    ``v = S(h)``, ``phi = S(m+)``; admissible for ``beta <= beta0`` where
    ``beta0 = delta * min(w_U / v)`` over interior nodes.
    """
    mask = grid.interior
    h_vals = nodal(h, grid)
    if np.any(h_vals[mask] < 0):
        raise ContractViolation("h must be nonnegative")
    v = solution_operator(h_vals, grid)
    if not np.any(v[mask] > 0):
        raise ContractViolation("S(h) vanishes identically")
    w_U = np.asarray(w_U, dtype=float)
    pos = mask & (v > 0)
    beta0 = float(delta * np.min(w_U[pos] / v[pos]))
    if beta > beta0 * (1.0 + 1e-12):
        raise RangeError(f"beta={beta:g} exceeds beta0={beta0:g}", bound=beta0)
    m_vals = nodal(m, grid)
    phi = solution_operator(np.maximum(m_vals, 0.0), grid)
    if not np.any(phi[mask] > 0):
        raise AdmissibilityError("m+ vanishes identically", stage="lemma:S(m+)")
    rhs = PowerRhs(grid, m_vals, p, beta * h_vals)
    sub = w_U - beta * v
    tol_res = default_tol_res(rhs.scale)
    t_min = float(np.max(phi)) ** (p / (1.0 - p))
    ppos = mask & (phi > 0)
    t0 = max(t_min, float(np.max(sub[ppos] / phi[ppos])))

    def accept(t, sup):
        r = residual(rhs, sup)
        bad = mask & ((r < -tol_res) | (sub > sup + 1e-12 * max(1.0, t)))
        return _first_violation(bad)

    t, sup = _grow_super(lambda t: t * phi, t0, accept)
    meta = {
        "construction": "lemma",
        "beta": beta,
        "beta0": beta0,
        "delta": delta,
        "t": t,
        "t_min": t_min,
        "p": p,
        "v": v,
    }
    return certify(rhs, sub, sup, meta, tol_res)
