"""Estimator-style front end for the three existence pipelines.

:class:`SemipositoneSolver` follows the scikit-learn estimator conventions:
constructor arguments are stored verbatim (``get_params``/``set_params``
and ``sklearn.base.clone`` work), :meth:`~SemipositoneSolver.fit` performs
the λ-independent auxiliary solves and stores them in trailing-underscore
attributes, and :meth:`~SemipositoneSolver.transform` /
:meth:`~SemipositoneSolver.predict` map arrays of λ values to solution
profiles / probe values.
"""

import math
import numbers
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_lambdas, check_probe
from .cone import DEFAULT_CONE_TOL, cone_report, solution_operator
from .errors import AdmissibilityError, ConfigurationError, RangeError
from .iterate import DEFAULT_MAX_ITER, DEFAULT_TOL, monotone_solve, solve_auxiliary
from .mesh import build_grid
from .nonlinearity import Nonlinearity
from .rhs import PowerRhs, SemipositoneRhs
from .subsuper import (
    construct_pair_bounded,
    construct_pair_singular,
    construct_pair_sublinear,
    lemma_pair,
)
from .weights import Weight

__all__ = ["SemipositoneSolver", "SweepRecord", "Solution", "PIPELINES"]

PIPELINES = {"sublinear_c1": "F1", "bounded": "F2", "singular": "F3"}
DEFAULT_DELTA = {"sublinear_c1": 0.25, "bounded": 0.2, "singular": 0.5}
DEFAULT_RESIDUAL_TOL = 1e-6


@dataclass(frozen=True)
class SweepRecord:
    """Summary of one λ solve.

    ``residual`` is relative: ``||-Δ_h u - g(u)||_∞ / max(1, ||g(u)||_∞)``.
    Unvalidated records carry NaN in the solution fields.
    """

    lam: float
    sup_norm: float
    u_at_x0: float
    cone_margin: float
    iterations: int
    residual: float
    validated: bool


@dataclass
class Solution:
    record: SweepRecord
    u: np.ndarray = None
    pair: object = None
    result: object = None
    reason: str = ""


def _as_weight(weight):
    if weight is None:
        return Weight.constant(1.0)
    if isinstance(weight, Weight):
        return weight
    if isinstance(weight, dict):
        return Weight.from_dict(weight)
    if isinstance(weight, numbers.Real):
        return Weight.constant(weight)
    raise ConfigurationError(f"cannot interpret weight {weight!r}")


def _as_nonlinearity(f):
    if isinstance(f, Nonlinearity):
        return f
    if isinstance(f, dict):
        return Nonlinearity(**f)
    raise ConfigurationError(f"cannot interpret nonlinearity {f!r}")


class SemipositoneSolver(BaseEstimator):
    """Positive solutions of ``-Δu = λ m(x) (f(u) - k)`` with zero Dirichlet data.

    Parameters
    ----------
    domain : (a, b) or ((a1, b1), (a2, b2))
    resolution : int or (nx, ny); default 257 (1D) or (65, 65) (2D)
    weight : Weight, dict or scalar; default ``m = 1``
    nonlinearity : Nonlinearity or dict
    k : float, the semipositone shift (>= 0)
    pipeline : "sublinear_c1" (F1), "bounded" (F2) or "singular" (F3);
        inferred from the nonlinearity family when None
    delta : perturbation parameter of the auxiliary problem
    beta : constant of the perturbed sublinear problem; defaults to the
        largest admissible value beta0
    probe : point at which ``u_at_x0`` is reported; default domain midpoint
    tol, max_iter : monotone iteration controls
    cone_tol : threshold on ``min u/dist`` for cone membership
    residual_tol : threshold on the relative residual for validation
    """

    def __init__(
        self,
        domain=(0.0, 1.0),
        resolution=None,
        weight=None,
        nonlinearity=None,
        k=1.0,
        pipeline=None,
        delta=None,
        beta=None,
        probe=None,
        tol=DEFAULT_TOL,
        max_iter=DEFAULT_MAX_ITER,
        cone_tol=DEFAULT_CONE_TOL,
        residual_tol=DEFAULT_RESIDUAL_TOL,
    ):
        self.domain = domain
        self.resolution = resolution
        self.weight = weight
        self.nonlinearity = nonlinearity
        self.k = k
        self.pipeline = pipeline
        self.delta = delta
        self.beta = beta
        self.probe = probe
        self.tol = tol
        self.max_iter = max_iter
        self.cone_tol = cone_tol
        self.residual_tol = residual_tol

    # -- fitting ------------------------------------------------------------
    def _validate_params(self):
        f = _as_nonlinearity(self.nonlinearity)
        tag = self.pipeline or {v: k for k, v in PIPELINES.items()}[f.family]
        if tag not in PIPELINES:
            raise ConfigurationError(f"unknown pipeline {tag!r}")
        if PIPELINES[tag] != f.family:
            raise ConfigurationError(f"pipeline {tag!r} needs an {PIPELINES[tag]} nonlinearity, got {f.family}")
        if not (math.isfinite(self.k) and self.k >= 0):
            raise ConfigurationError(f"k must be finite and >= 0, got {self.k}")
        if not self.tol > 0 or not self.max_iter >= 1:
            raise ConfigurationError("tol must be > 0 and max_iter >= 1")
        delta = DEFAULT_DELTA[tag] if self.delta is None else float(self.delta)
        if not delta > 0:
            raise ConfigurationError(f"delta must be > 0, got {delta}")
        if tag == "bounded" and not f.c > self.k:
            raise ConfigurationError(f"bounded pipeline needs c > k, got c={f.c}, k={self.k}")
        return f, tag, delta

    def fit(self, X=None, y=None):
        """Run the λ-independent stage of the pipeline.

        ``X`` and ``y`` are ignored; they exist for API compatibility.
        """
        f, tag, delta = self._validate_params()
        domain = np.asarray(self.domain, dtype=float)
        resolution = self.resolution
        if resolution is None:
            resolution = 257 if domain.ndim == 1 else (65, 65)
        self.grid_ = build_grid(self.domain, resolution)
        self.weight_ = _as_weight(self.weight)
        self.m_ = self.weight_.sample(self.grid_)
        self.f_ = f
        self.pipeline_ = tag
        self.delta_ = delta
        self.probe_index_ = check_probe(self.grid_, self.probe)
        getattr(self, f"_fit_{tag}")()
        return self

    def _stage(self, name, fn, *args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except AdmissibilityError as exc:
            stage = f"{self.pipeline_}:{name}"
            raise AdmissibilityError(f"[{stage}] {exc}", stage=stage, margin=exc.margin) from exc

    def _fit_sublinear_c1(self):
        grid, p = self.grid_, self.f_.p
        params = {"m": self.m_, "delta": self.delta_, "p": p}
        self.w_U_ = self._stage("U", solve_auxiliary, "U", params, grid, self.tol, self.max_iter)
        v = solution_operator(1.0, grid)
        mask = grid.interior
        self.beta0_ = float(self.delta_ * np.min(self.w_U_[mask] / v[mask]))
        self.beta_ = self.beta0_ if self.beta is None else float(self.beta)
        self.lemma_pair_ = lemma_pair(self.m_, 1.0, self.beta_, self.delta_, p, self.w_U_, grid)
        rhs = PowerRhs(grid, self.m_, p, self.beta_)
        aux = monotone_solve(rhs, self.lemma_pair_, self.tol, self.max_iter)
        self.w_ = aux.u
        self.auxiliary_margin_ = self._stage("P_m_beta", _cone_margin, self.w_, grid, self.cone_tol)

    def _fit_bounded(self):
        # S(M_delta) and its cone certificate are λ-independent
        pair = self._stage(
            "M_delta", construct_pair_bounded, 1.0, self.m_, self.f_, self.k, self.delta_, self.grid_, self.cone_tol
        )
        self.w_ = pair.meta["w"]
        self.phi_ = pair.meta["phi"]
        self.auxiliary_margin_ = pair.meta["w_cone_margin"]

    def _fit_singular(self):
        params = {"m": self.m_, "delta": self.delta_, "p": self.f_.p}
        self.w_ = self._stage("P_m_delta", solve_auxiliary, "P_m_delta", params, self.grid_, self.tol, self.max_iter)
        self.auxiliary_margin_ = cone_report(self.w_, self.grid_, self.cone_tol).margin

    # -- solving ------------------------------------------------------------
    def construct_pair(self, lam):
        """The constructed sub/supersolution pair at ``lam``."""
        check_is_fitted(self, "w_")
        lam = float(lam)
        if not (math.isfinite(lam) and lam > 0):
            raise ConfigurationError(f"lambda must be finite and > 0, got {lam}")
        grid, f, p = self.grid_, self.f_, self.f_.p
        if self.pipeline_ == "sublinear_c1":
            return construct_pair_sublinear(lam, self.w_, self.beta_, p, self.m_, f, self.k, grid)
        if self.pipeline_ == "bounded":
            return construct_pair_bounded(lam, self.m_, f, self.k, self.delta_, grid, self.cone_tol)
        return construct_pair_singular(lam, self.w_, self.delta_, p, self.m_, f, self.k, grid)

    def rhs(self, lam):
        return SemipositoneRhs(self.grid_, lam, self.m_, self.f_, self.k)

    def solve(self, lam, K=None):
        """Full pipeline at one λ.

        An out-of-range λ or an invalid pair gives ``validated=False``
        rather than an error; convergence failures propagate.
        """
        lam = float(lam)
        try:
            pair = self.construct_pair(lam)
        except RangeError as exc:
            return Solution(_invalid(lam), reason=str(exc))
        if not pair.valid:
            return Solution(_invalid(lam), pair=pair, reason="sub/supersolution certificate failed")
        rhs = self.rhs(lam)
        result = monotone_solve(rhs, pair, self.tol, self.max_iter, K=K)
        u = result.u
        grid = self.grid_
        lap_scale = max(1.0, float(np.max(np.abs(rhs(u)))))
        rel_res = result.final_residual / lap_scale
        margin = cone_report(u, grid, self.cone_tol).margin
        ok = bool(
            result.verified
            and rel_res <= self.residual_tol
            and margin > self.cone_tol
        )
        record = SweepRecord(
            lam=lam,
            sup_norm=float(np.max(np.abs(u))),
            u_at_x0=float(u[self.probe_index_]),
            cone_margin=margin,
            iterations=result.iterations,
            residual=rel_res,
            validated=ok,
        )
        reason = "" if ok else "solution failed validation"
        return Solution(record, u=u, pair=pair, result=result, reason=reason)

    # -- array API ----------------------------------------------------------
    def transform(self, X):
        """Stack solution profiles, one row per λ in ``X`` (NaN rows if unvalidated)."""
        check_is_fitted(self, "w_")
        lams = check_lambdas(X)
        out = np.full((lams.size, self.grid_.n_nodes), np.nan)
        for i, lam in enumerate(lams):
            sol = self.solve(lam)
            if sol.record.validated:
                out[i] = sol.u.ravel()
        return out

    def predict(self, X):
        """``u_λ(x0)`` for every λ in ``X`` (NaN if unvalidated)."""
        check_is_fitted(self, "w_")
        return np.array([self.solve(lam).record.u_at_x0 for lam in check_lambdas(X)])


def _cone_margin(u, grid, tol):
    report = cone_report(u, grid, tol)
    if not report.is_member:
        raise AdmissibilityError(f"auxiliary solution not in the cone interior (margin {report.margin:.3g})")
    return report.margin


def _invalid(lam):
    nan = float("nan")
    return SweepRecord(lam, nan, nan, nan, 0, nan, False)
