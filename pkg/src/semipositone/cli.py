"""Command-line front end.

Exit codes: 0 success, 2 validation failed (invalid pair, unvalidated
solution, no threshold found, oracle gap above tolerance), 3 convergence
failure, 4 configuration error.  Output files are written atomically and
only on success.
"""

import argparse
import json
import logging
import os
import sys
import tempfile

import numpy as np

from .cone import cone_report, solution_operator
from .config import DEFAULTS, dump_config, lambda_list, load_config, parse_config
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
)
from .experiments import THRESHOLD_CAVEAT, find_lambda0, fitted_solver, solve_scenario, sweep, write_csv
from .mesh import build_grid
from .oracle import pointwise_rhs, shoot_sandwiched
from .weights import Weight, bounded_general_check, eme_check_1d, eme_check_nd

__all__ = ["main"]

log = logging.getLogger(__name__)

EXIT_OK, EXIT_INVALID, EXIT_CONVERGENCE, EXIT_CONFIG = 0, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def _build_parser():
    parser = _Parser(prog="semipositone", description="Positive solutions of -Δu = λ m(x) (f(u) - k).")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, required=True)

    def with_config(p, required=True):
        p.add_argument("--config", required=required, help="scenario config (JSON)")
        p.add_argument("--dump-config", action="store_true", help="print the fully resolved config and exit")

    p = sub.add_parser("solve", help="solve at one lambda and write the profile")
    with_config(p)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--output", help="profile file (default from config)")

    p = sub.add_parser("sweep", help="solve over a list or geometric range of lambda; write CSV")
    with_config(p)
    p.add_argument("--lambdas", type=float, nargs="+")
    p.add_argument("--range", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--count", type=int)
    p.add_argument("--threads", type=int, help="worker threads (default $SEMIPOSITONE_THREADS)")
    p.add_argument("--output", help="CSV file (default from config)")

    p = sub.add_parser("threshold", help="empirical threshold search")
    with_config(p)
    p.add_argument("--range", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--refine-steps", type=int)
    p.add_argument("--threads", type=int)

    p = sub.add_parser("check-weight", help="admissibility report for a weight")
    with_config(p, required=False)
    p.add_argument("--weight", help="inline weight spec (JSON object)")
    p.add_argument("--step", type=float, metavar="GAMMA", help="step weight: 1, and -GAMMA on (0.4, 0.6)")
    p.add_argument("--domain", type=float, nargs="+", help="a b  or  a1 b1 a2 b2")
    p.add_argument("--resolution", type=int, nargs="+")
    p.add_argument("--c-domain", type=float, help="domain constant for the N-dimensional test")
    p.add_argument("--q", type=float, help="exponent q > N for the N-dimensional test")
    p.add_argument("--l0", type=float, default=1.0)
    p.add_argument("--l1", type=float, default=1.0)

    p = sub.add_parser("oracle-compare", help="finite differences vs shooting on a 1D scenario")
    with_config(p)
    p.add_argument("--lambda", dest="lam", type=float)
    return parser


def _atomic_write(path, text):
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def profile_text(grid, u):
    """Golden-file text: ``x value`` (1D) or ``x y value`` (2D) per node."""
    if grid.dim == 1:
        cols = [grid.coords, u]
    else:
        X, Y = grid.coords
        cols = [X.ravel(), Y.ravel(), u.ravel()]
    rows = np.column_stack(cols)
    return "".join(" ".join(f"{v:.17g}" for v in row) + "\n" for row in rows)


def _format_record(r):
    return (
        f"lambda={r.lam:.17g} sup_norm={r.sup_norm:.17g} u_at_x0={r.u_at_x0:.17g} "
        f"cone_margin={r.cone_margin:.17g} iterations={r.iterations} residual={r.residual:.17g} "
        f"validated={'true' if r.validated else 'false'}"
    )


def _load(args):
    scenario, options = parse_config(load_config(args.config))
    return scenario, options


def _single_lambda(args, options):
    lam = args.lam if args.lam is not None else options["lambda"].get("value")
    if lam is None:
        raise ConfigurationError("no lambda given (--lambda or config lambda.value)")
    if not lam > 0:
        raise ConfigurationError(f"lambda must be > 0, got {lam}")
    return float(lam)


def cmd_solve(args, scenario, options):
    lam = _single_lambda(args, options)
    sol = solve_scenario(scenario, lam)
    print(_format_record(sol.record))
    if not sol.record.validated:
        print(f"not validated: {sol.reason}", file=sys.stderr)
        return EXIT_INVALID
    path = args.output or options["profile"]
    _atomic_write(path, profile_text(fitted_solver(scenario).grid_, sol.u))
    print(f"profile written to {path}")
    return EXIT_OK


def cmd_sweep(args, scenario, options):
    spec = dict(options["lambda"])
    if args.lambdas:
        spec = {"values": args.lambdas}
    elif args.range:
        spec = {"range": args.range, "count": args.count or spec.get("count", DEFAULTS["sweep_count"])}
    records = sweep(scenario, lambda_list(spec), args.threads)
    path = args.output or options["csv"]
    write_csv(records, path)
    n_ok = sum(r.validated for r in records)
    print(f"{len(records)} records ({n_ok} validated) written to {path}")
    return EXIT_OK


def cmd_threshold(args, scenario, options):
    spec = options["lambda"]
    lam_range = args.range or spec.get("search", DEFAULTS["search"])
    steps = args.refine_steps if args.refine_steps is not None else int(spec.get("refine_steps", DEFAULTS["refine_steps"]))
    try:
        res = find_lambda0(scenario, lam_range, steps, args.threads)
    except NotFoundError as exc:
        print(f"not found: {exc}", file=sys.stderr)
        for lam, ok in exc.table:
            print(f"  {lam:.17g} {'true' if ok else 'false'}", file=sys.stderr)
        return EXIT_INVALID
    print(f"lambda_star={res.lambda_star:.17g}")
    print("lambda,validated")
    for lam, ok in res.table:
        print(f"{lam:.17g},{'true' if ok else 'false'}")
    print(f"note: {THRESHOLD_CAVEAT}")
    return EXIT_OK


def _inline_weight(args):
    if args.weight is not None and args.step is not None:
        raise ConfigurationError("give either --weight or --step, not both")
    if args.weight is not None:
        try:
            return Weight.from_dict(json.loads(args.weight))
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"--weight is not valid JSON: {exc}") from None
    if args.step is not None:
        return Weight.step(args.step)
    raise ConfigurationError("check-weight needs --config, --weight or --step")


def cmd_check_weight(args):
    if args.config:
        scenario, _ = _load(args)
        weight, domain, resolution = scenario.weight, scenario.domain, scenario.resolution
    else:
        weight = _inline_weight(args)
        dom = args.domain or [0.0, 1.0]
        if len(dom) == 2:
            domain = tuple(dom)
        elif len(dom) == 4:
            domain = ((dom[0], dom[1]), (dom[2], dom[3]))
        else:
            raise ConfigurationError("--domain takes 2 or 4 numbers")
        default = DEFAULTS["resolution_1d"] if len(dom) == 2 else DEFAULTS["resolution_2d"]
        resolution = args.resolution or np.atleast_1d(default).tolist()
        resolution = resolution[0] if len(resolution) == 1 else tuple(resolution)
    grid = build_grid(domain, resolution)
    lines = [f"weight: {json.dumps(weight.to_dict())}"]
    if grid.dim == 1:
        rep = eme_check_1d(weight, grid)
        lines.append(f"eme_1d: lhs={rep.lhs:.10g} rhs={rep.rhs:.10g} holds={str(rep.holds).lower()}")
    if args.c_domain is not None or args.q is not None:
        if args.c_domain is None or args.q is None:
            raise ConfigurationError("the N-dimensional test needs both --c-domain and --q")
        rep = eme_check_nd(weight, grid, args.c_domain, args.q)
        lines.append(
            f"eme_nd: lhs={rep.lhs:.10g} rhs={rep.rhs:.10g} holds={str(rep.holds).lower()} "
            "(conditional on the supplied domain constant)"
        )
    m = weight.sample(grid)
    cr = cone_report(solution_operator(m, grid), grid)
    lines.append(f"S(m): margin={cr.margin:.10g} in_cone={str(cr.is_member).lower()}")
    bg = bounded_general_check(weight, args.l0, args.l1, grid)
    lines.append(
        f"S(l0 m+ - l1 m-) with l0={args.l0:g}, l1={args.l1:g}: margin={bg.margin:.10g} "
        f"in_cone={str(bg.is_member).lower()}"
    )
    print("\n".join(lines))
    return EXIT_OK


def cmd_oracle_compare(args, scenario, options):
    lam = _single_lambda(args, options)
    solver = fitted_solver(scenario)
    grid = solver.grid_
    if grid.dim != 1:
        raise ConfigurationError("oracle-compare needs a 1D scenario")
    sol = solver.solve(lam)
    if not sol.record.validated:
        print(_format_record(sol.record))
        print(f"not validated: {sol.reason}", file=sys.stderr)
        return EXIT_INVALID
    f = scenario.nonlinearity
    floor = 1e-30 if f.family == "F3" else 0.0
    grade = 0.05 if f.family == "F3" else None
    g = pointwise_rhs(lam, solver.weight_, f, scenario.k, floor)
    shot = shoot_sandwiched(g, grid.coords, sol.pair.sub, sol.pair.super, floor=floor, grade=grade)
    gap = float(np.max(np.abs(shot.values - sol.u)))
    (h,) = grid.spacing
    tol = max(1e-3, 10 * h**2)
    print(f"lambda={lam:.17g} gap={gap:.6e} tolerance={tol:.6e} miss={shot.miss:.3e} slope={shot.slope:.17g}")
    if gap > tol:
        print("gap exceeds tolerance", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.command == "check-weight" and not args.dump_config:
            return cmd_check_weight(args)
        if args.config is None:
            raise ConfigurationError("--config is required")
        scenario, options = _load(args)
        if args.dump_config:
            print(dump_config(scenario, options))
            return EXIT_OK
        handler = {
            "solve": cmd_solve,
            "sweep": cmd_sweep,
            "threshold": cmd_threshold,
            "oracle-compare": cmd_oracle_compare,
        }[args.command]
        return handler(args, scenario, options)
    except (ConfigurationError, ContractViolation, DomainError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_CONFIG
    except (AdmissibilityError, RangeError, ConstructionError, BracketingError, NotFoundError, DataError) as exc:
        print(f"validation failed: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ConvergenceError as exc:
        print(f"convergence failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def entry_point():
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
