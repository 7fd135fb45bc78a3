"""Scenario orchestration: λ sweeps, threshold search, exponent fits, CSV output."""

import json
import logging
import math
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np

from ._validation import check_lambda_range
from .errors import AdmissibilityError, ConvergenceError, DataError, NotFoundError
from .cone import DEFAULT_CONE_TOL
from .estimator import DEFAULT_RESIDUAL_TOL, PIPELINES, SemipositoneSolver, SweepRecord
from .iterate import DEFAULT_MAX_ITER, DEFAULT_TOL
from .nonlinearity import Nonlinearity
from .weights import Weight

__all__ = [
    "Scenario",
    "SweepRecord",
    "ThresholdResult",
    "run_scenario",
    "solve_scenario",
    "sweep",
    "find_lambda0",
    "fit_exponent",
    "write_csv",
    "CSV_HEADER",
    "THRESHOLD_CAVEAT",
]

log = logging.getLogger(__name__)

CSV_HEADER = "lambda,sup_norm,u_at_x0,cone_margin,iterations,residual,validated"
THRESHOLD_CAVEAT = (
    "validity is not proven monotone in lambda; the threshold is asserted "
    "empirically over the tested set only"
)
REFINE_STEPS = 20


@dataclass(frozen=True)
class Scenario:
    """Everything needed to run one pipeline, minus λ.

    ``domain`` is ``(a, b)`` or ``((a1, b1), (a2, b2))``; ``weight`` and
    ``nonlinearity`` are the corresponding value objects.
    """

    domain: tuple
    weight: Weight
    nonlinearity: Nonlinearity
    k: float
    pipeline: str = None
    resolution: object = None
    delta: float = None
    beta: float = None
    probe: tuple = None
    tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER
    cone_tol: float = DEFAULT_CONE_TOL
    residual_tol: float = DEFAULT_RESIDUAL_TOL

    def __post_init__(self):
        if self.pipeline is None:
            tag = {v: k for k, v in PIPELINES.items()}[self.nonlinearity.family]
            object.__setattr__(self, "pipeline", tag)

    def estimator(self):
        """Unfitted :class:`SemipositoneSolver` with this scenario's parameters."""
        return SemipositoneSolver(
            domain=self.domain,
            resolution=self.resolution,
            weight=self.weight,
            nonlinearity=self.nonlinearity,
            k=self.k,
            pipeline=self.pipeline,
            delta=self.delta,
            beta=self.beta,
            probe=self.probe,
            tol=self.tol,
            max_iter=self.max_iter,
            cone_tol=self.cone_tol,
            residual_tol=self.residual_tol,
        )

    def key(self):
        d = asdict(self)
        d["weight"] = self.weight.to_dict()
        d["nonlinearity"] = self.nonlinearity.to_dict()
        return json.dumps(d, sort_keys=True, default=list)


@lru_cache(maxsize=32)
def _fitted(key):
    # the λ-independent auxiliary stage is computed once per scenario
    d = json.loads(key)
    d["weight"] = Weight.from_dict(d["weight"])
    d["nonlinearity"] = Nonlinearity(**d["nonlinearity"])
    return Scenario(**d).estimator().fit()


def fitted_solver(s):
    return _fitted(s.key())


def solve_scenario(s, lam):
    """Like :func:`run_scenario` but returns the full :class:`Solution`."""
    return fitted_solver(s).solve(lam)


def run_scenario(s, lam):
    """Run the full pipeline of ``s`` at ``lam`` and summarise it."""
    return solve_scenario(s, lam).record


def _safe_record(s, lam):
    try:
        return run_scenario(s, lam)
    except ConvergenceError as exc:
        log.warning("lambda=%g: %s", lam, exc)
        nan = float("nan")
        return SweepRecord(float(lam), nan, nan, nan, exc.iterations or 0, nan, False)


def _threads(threads):
    if threads is None:
        try:
            threads = int(os.environ.get("SEMIPOSITONE_THREADS", "0") or 0)
        except ValueError:
            threads = 0
    return max(0, threads)


def sweep(s, lambdas, threads=None):
    """Records for every λ, sorted by λ.

    Convergence failures at single λ values become unvalidated records.
    ``threads`` defaults to ``$SEMIPOSITONE_THREADS`` (0 or unset: serial).
    """
    lambdas = [float(v) for v in lambdas]
    fitted_solver(s)  # fit once before fanning out
    n = _threads(threads)
    if n > 1 and len(lambdas) > 1:
        with ThreadPoolExecutor(max_workers=n) as pool:
            records = list(pool.map(lambda lam: _safe_record(s, lam), lambdas))
    else:
        records = [_safe_record(s, lam) for lam in lambdas]
    return sorted(records, key=lambda r: r.lam)


@dataclass
class ThresholdResult:
    lambda_star: float
    table: list = field(default_factory=list)
    caveat: str = THRESHOLD_CAVEAT

    def __float__(self):
        return self.lambda_star


def _scan_points(lo, hi):
    n = int(math.floor(math.log2(hi / lo) + 1e-12))
    pts = [lo * 2.0**i for i in range(n + 1)]
    if pts[-1] < hi * (1 - 1e-12):
        pts.append(hi)
    return pts


def find_lambda0(s, lam_range, refine_steps=REFINE_STEPS, threads=None):
    """Empirical threshold λ* of the pipeline.

    F1/F2 (``sublinear_c1``, ``bounded``): smallest λ* such that every tested
    λ ≥ λ* validates.  F3 (``singular``): largest λ* such that every tested
    λ ≤ λ* validates.  Factor-2 geometric scan, then ``refine_steps``
    geometric bisections between the last failing and first passing λ.
    """
    lo, hi = check_lambda_range(lam_range)
    upward = s.pipeline != "singular"
    table = {}
    try:
        fitted_solver(s)
    except AdmissibilityError as exc:
        raise NotFoundError(f"pipeline cannot start, so no lambda validates: {exc}") from exc

    def check(lams):
        for rec in sweep(s, [v for v in lams if v not in table], threads):
            table[rec.lam] = rec.validated

    pts = _scan_points(lo, hi)
    check(pts)
    # walk inward from the end where validity is expected
    order = range(len(pts) - 1, -1, -1) if upward else range(len(pts))
    last_ok = None
    for i in order:
        if not table[pts[i]]:
            break
        last_ok = i
    if last_ok is None:
        raise NotFoundError(
            f"no validated lambda at the {'upper' if upward else 'lower'} end of [{lo:g}, {hi:g}]",
            table=sorted(table.items()),
        )
    good = pts[last_ok]
    edge = 0 if upward else len(pts) - 1
    if last_ok == edge:
        return ThresholdResult(good, sorted(table.items()))
    fail = pts[last_ok - 1] if upward else pts[last_ok + 1]
    for _ in range(refine_steps):
        mid = math.sqrt(fail * good)
        check([mid])
        if table[mid]:
            good = mid
        else:
            fail = mid
    return ThresholdResult(good, sorted(table.items()))


def fit_exponent(records, field="u_at_x0"):
    """Least-squares slope of ``log(field)`` against ``log(lambda)``."""
    if field not in ("u_at_x0", "sup_norm"):
        raise DataError(f"cannot fit field {field!r}")
    recs = [r for r in records if r.validated]
    if len(recs) < 5:
        raise DataError(f"need >= 5 validated records, got {len(recs)}")
    lam = np.array([r.lam for r in recs])
    val = np.array([getattr(r, field) for r in recs])
    if np.log10(lam.max() / lam.min()) < 2 - 1e-12:
        raise DataError("validated records must span >= 2 decades of lambda")
    if np.any(val <= 0):
        raise DataError(f"{field} must be positive to fit a power law")
    slope, _ = np.polyfit(np.log(lam), np.log(val), 1)
    return float(slope)


def _fmt(v):
    return f"{v:.17g}"


def write_csv(records, path):
    """Atomically write records sorted by λ (temp file, then rename)."""
    path = os.fspath(path)
    rows = [CSV_HEADER]
    for r in sorted(records, key=lambda r: r.lam):
        rows.append(
            ",".join(
                [
                    _fmt(r.lam),
                    _fmt(r.sup_norm),
                    _fmt(r.u_at_x0),
                    _fmt(r.cone_margin),
                    str(int(r.iterations)),
                    _fmt(r.residual),
                    "true" if r.validated else "false",
                ]
            )
        )
    directory = os.path.dirname(os.path.abspath(path))
    try:
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".csv")
        with os.fdopen(fd, "w") as fh:
            fh.write("\n".join(rows) + "\n")
        os.replace(tmp, path)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write CSV: {exc.strerror}", path) from exc


def read_csv(path):
    """Inverse of :func:`write_csv`."""
    out = []
    with open(path) as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise DataError(f"unexpected CSV header in {path}")
        for line in fh:
            lam, sup, ux0, margin, its, res, ok = line.strip().split(",")
            out.append(SweepRecord(float(lam), float(sup), float(ux0), float(margin), int(its), float(res), ok == "true"))
    return out
