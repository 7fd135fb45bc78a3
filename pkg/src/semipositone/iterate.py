"""Monotone sub/supersolution iteration and the auxiliary problem solvers."""

import logging
from dataclasses import dataclass

import numpy as np

from .cone import DEFAULT_CONE_TOL, cone_report, nodal, solution_operator
from .errors import AdmissibilityError, ConfigurationError, ContractViolation, ConvergenceError
from .mesh import ShiftedPoissonSolver, apply_laplacian
from .rhs import PowerRhs, residual
from .subsuper import certify, lemma_pair, singular_exponent

__all__ = ["SolveResult", "monotone_solve", "solve_auxiliary", "DEFAULT_TOL", "DEFAULT_MAX_ITER"]

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-9
DEFAULT_MAX_ITER = 10_000
MONOTONE_SLACK = 1e-12
NOISE_ULPS = 64


@dataclass
class SolveResult:
    """Outcome of :func:`monotone_solve`.

    ``u`` is the ascending limit (descending when requested);
    ``u_descending`` is the limit of the sequence started at the
    supersolution.
    """

    u: np.ndarray
    iterations: int
    final_residual: float
    from_sub_monotone: bool
    from_super_monotone: bool
    sandwiched: bool
    K: object
    u_descending: np.ndarray = None
    ordered_limits: bool = True

    @property
    def verified(self):
        return self.from_sub_monotone and self.from_super_monotone and self.sandwiched


class _Sequence:
    """One monotone sequence ``(-Δ + K) u_{n+1} = g(u_n) + K u_n``.

    Written in defect-correction form ``u_{n+1} = u_n + (-Δ + K)^{-1} d_n``
    with ``d_n = g(a_n) + K (a_n - u_n) + Δ_h u_n`` and ``a_n = max(u_n, floor)``.
    The iterate and the defect are kept in extended precision (longdouble)
    and only the correction is solved in float64, so the fixed point is
    resolved below the float64 cancellation level of ``Δ_h u``.
    """

    def __init__(self, start, direction, mask):
        # Dirichlet data: boundary entries are zero whatever the start holds
        self.u = np.where(mask, np.asarray(start, dtype=np.longdouble), 0).astype(np.longdouble)
        self.direction = direction
        self.monotone = True
        self.done = False
        self.gap = np.inf
        self.prev_gap = np.inf

    def step(self, solver, rhs, floor, K, mask, tol):
        u = self.u
        arg = np.maximum(u, floor)
        defect = rhs(arg) + K * (arg - u) - apply_laplacian(rhs.grid, u)
        diff = solver.solve(defect.astype(float))
        new = u + diff
        diff = diff[mask]
        scale = max(1.0, float(np.max(np.abs(new))))
        slack = MONOTONE_SLACK * scale
        if np.any(self.direction * diff < -slack):
            self.monotone = False
        self.prev_gap, self.gap = self.gap, float(np.max(np.abs(diff)))
        self.u = new
        # gap <= tol, and the geometric estimate of the distance to the limit an order below it
        rho = self.gap / self.prev_gap if self.prev_gap > 0 else 0.0
        if self.gap <= tol and (rho < 1 and self.gap * rho / (1 - rho) <= 0.1 * tol):
            self.done = True
        elif self.gap <= NOISE_ULPS * np.finfo(np.longdouble).eps * scale:
            # iterates agree to rounding level; tol is unresolvable at this scale
            self.done = True


def monotone_solve(rhs, pair, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER, K=None, which="ascending"):
    """Solve ``-Δ_h u = g(·, u)`` between an ordered sub/supersolution pair.

    Two sequences are run, one from each end of the pair.  Each stops when
    consecutive iterates differ by at most ``tol`` in the sup norm and the
    observed contraction rate predicts a remaining error below ``tol/10``,
    or when they agree to rounding level (``64 eps max(1, ||u||)``, eps of
    longdouble), which
    only binds once ``||u||`` is large enough that ``tol`` is unresolvable.  ``g`` is evaluated on iterates clamped below by
    the subsolution.
    """
    if not pair.valid:
        raise ContractViolation("monotone_solve needs a VALID sub/supersolution pair")
    if which not in ("ascending", "descending"):
        raise ConfigurationError(f"which must be 'ascending' or 'descending', got {which!r}")
    grid = rhs.grid
    mask = grid.interior
    sub, sup = pair.sub, pair.super
    hi = float(np.max(sup[mask]))
    if K is None:
        # nodewise shift: g(x_i, s) + K_i s is nondecreasing on [sub_i, super_i]
        lo = np.where(mask, np.maximum(sub, 0.0), 1.0)
        K = np.where(mask, rhs.slope_bound(lo, np.maximum(sup, lo)), 0.0)
    solver = ShiftedPoissonSolver(grid, K)
    floor = sub
    seqs = [_Sequence(sub, +1, mask), _Sequence(sup, -1, mask)]
    for it in range(1, max_iter + 1):
        for seq in seqs:
            if not seq.done:
                seq.step(solver, rhs, floor, K, mask, tol)
        if all(s.done for s in seqs):
            break
    else:
        gaps = [s.gap for s in seqs]
        raise ConvergenceError(
            f"monotone iteration did not converge in {max_iter} iterations "
            f"(gaps {gaps}, max K={float(np.max(K)):g})",
            residual=max(gaps),
            iterations=max_iter,
        )
    up, down = seqs[0].u.astype(float), seqs[1].u.astype(float)
    slack = MONOTONE_SLACK * max(1.0, hi)
    u = up if which == "ascending" else down
    res = float(np.max(np.abs(residual(rhs, u)[mask])))
    sandwiched = bool(
        np.all(sub[mask] <= u[mask] + slack) and np.all(u[mask] <= sup[mask] + slack)
    )
    ordered = bool(np.all(up[mask] <= down[mask] + 10 * tol * max(1.0, float(np.max(down)))))
    if not (seqs[0].monotone and seqs[1].monotone):
        log.warning("monotonicity violated; result is unverified")
    return SolveResult(
        u=u,
        iterations=it,
        final_residual=res,
        from_sub_monotone=seqs[0].monotone,
        from_super_monotone=seqs[1].monotone,
        sandwiched=sandwiched,
        K=K,
        u_descending=down,
        ordered_limits=ordered,
    )


def _require_cone(u, grid, stage, tol=DEFAULT_CONE_TOL):
    report = cone_report(u, grid, tol)
    if not report.is_member:
        raise AdmissibilityError(
            f"{stage}: solution failed the cone certificate (margin {report.margin:.3g}); "
            "weight outside the method's range, consistent with a too large m-",
            stage=stage,
            margin=report.margin,
        )
    return report


def _solve_U(m_vals, delta, p, grid, tol, max_iter):
    mp = np.maximum(m_vals, 0.0)
    mm = np.maximum(-m_vals, 0.0)
    phi = solution_operator((1.0 - delta) * mp, grid)
    if not np.any(phi[grid.interior] > 0):
        raise AdmissibilityError("(1-delta) m+ vanishes identically", stage="U")
    t = float(np.max(phi)) ** (p / (1.0 - p))
    rhs = PowerRhs(grid, (1.0 - delta) * mp - mm, p)
    pair = certify(rhs, np.zeros(grid.shape), t * phi, {"construction": "U", "t": t})
    result = monotone_solve(rhs, pair, tol, max_iter, which="descending")
    return result


def _solve_P_m_delta(m_vals, delta, p, grid, tol, max_iter):
    a = m_vals - delta
    mask = grid.interior
    theta = singular_exponent(p)
    w = solution_operator(np.abs(a), grid)
    rhs = PowerRhs(grid, a, -p)
    prev_res = np.inf
    inactive_before = False
    for j in range(1, 60):
        eps = 2.0**-j
        for it in range(max_iter):
            wr = np.maximum(w, eps)
            target = solution_operator(a * wr ** (-p), grid)
            # geometric damping with weight 1/(1+p) cancels the amplitude mode of w -> S(a w^-p)
            new = np.zeros(grid.shape)
            new[mask] = wr[mask] ** (1.0 - theta) * np.maximum(target[mask], eps) ** theta
            gap = float(np.max(np.abs(new - w)))
            w = new
            if gap <= tol * max(1.0, float(np.max(w))):
                break
        else:
            raise ConvergenceError(
                f"regularized fixed point did not converge at eps={eps:g}", residual=gap, iterations=max_iter
            )
        inactive = float(np.min(w[mask])) > eps
        res = float(np.max(np.abs(residual(rhs, w)[mask])))
        if inactive and inactive_before and abs(res - prev_res) < max(tol, 1e-6 * res):
            return w, res
        inactive_before, prev_res = inactive, res
    raise ConvergenceError("regularization schedule exhausted", residual=prev_res)


def solve_auxiliary(kind, params, grid, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER):
    """Solve one of the auxiliary problems and certify its positivity.

    ``kind="U"``:         ``-Δw = (1-delta) m+ w^p - m- w^p``
    ``kind="P_m_beta"``:  ``-Δw = m w^p - beta h`` (``h`` defaults to 1)
    ``kind="P_m_delta"``: ``-Δw = (m - delta) w^(-p)``

    ``params`` holds ``m`` and the needed subset of ``delta``, ``beta``,
    ``p`` and ``h``.  Returns the nodal solution; raises
    :class:`AdmissibilityError` if it is not in the cone interior.
    """
    try:
        m_vals = nodal(params["m"], grid)
        p = float(params["p"])
    except KeyError as exc:
        raise ConfigurationError(f"missing auxiliary parameter {exc}") from None
    delta = float(params.get("delta", 0.0))
    if kind in ("U", "P_m_beta"):
        if not 0 < p < 1:
            raise ConfigurationError(f"{kind} needs 0 < p < 1, got {p}")
        if not 0 <= delta < 1:
            raise ConfigurationError(f"{kind} needs 0 <= delta < 1, got {delta}")
    if kind == "U":
        w = _solve_U(m_vals, delta, p, grid, tol, max_iter).u
        _require_cone(w, grid, "U")
        return w
    if kind == "P_m_beta":
        beta = float(params.get("beta", 0.0))
        h = params.get("h", 1.0)
        w_U = solve_auxiliary("U", params, grid, tol, max_iter)
        pair = lemma_pair(m_vals, h, beta, delta, p, w_U, grid)
        rhs = PowerRhs(grid, m_vals, p, beta * nodal(h, grid))
        w = monotone_solve(rhs, pair, tol, max_iter).u
        _require_cone(w, grid, "P_m_beta")
        return w
    if kind == "P_m_delta":
        if not p > 0:
            raise ConfigurationError(f"P_m_delta needs p > 0, got {p}")
        if not delta > 0:
            raise ConfigurationError(f"P_m_delta needs delta > 0, got {delta}")
        w, _ = _solve_P_m_delta(m_vals, delta, p, grid, tol, max_iter)
        _require_cone(w, grid, "P_m_delta")
        return w
    raise ConfigurationError(f"unknown auxiliary problem {kind!r}")
