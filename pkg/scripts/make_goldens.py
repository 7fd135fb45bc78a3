"""Freeze the shooting-oracle golden profiles used by the test suite.

Run from the repository root:  python3 scripts/make_goldens.py

Each profile solves ``-u'' = g(x, u)`` on (0, 1) by shooting only.  The
slope bracket comes from the constructed sub/supersolution pair (not from
the finite-difference solve); see ``semipositone.oracle.shoot_sandwiched``.
"""

import json
import pathlib
import sys

import numpy as np

from semipositone.experiments import Scenario, fitted_solver
from semipositone.mesh import build_grid
from semipositone.nonlinearity import Nonlinearity
from semipositone.oracle import integrate_shot, pointwise_rhs, shoot_1d, shoot_sandwiched, write_profile
from semipositone.weights import Weight

OUT = pathlib.Path(__file__).resolve().parent.parent / "tests" / "golden"
N = 257
STEP = 1e-4

SCENARIOS = {
    "f1_sublinear": dict(nonlinearity=Nonlinearity.sublinear(0.5), k=1.0, lam=90.0, floor=0.0, grade=None),
    "f2_bounded": dict(nonlinearity=Nonlinearity.saturating(2.0), k=1.0, lam=350.0, floor=0.0, grade=None),
    "f3_singular": dict(nonlinearity=Nonlinearity.singular(0.5), k=0.1, lam=100.0, floor=1e-30, grade=0.05),
}


# auxiliary and degenerate problems: g(u) only, positive root unique in the scan
PLAIN = {
    "aux_U": dict(g=lambda x, u: 0.75 * max(u, 0.0) ** 0.5, floor=0.0, grade=None, note="-w'' = 0.75 w^(1/2)"),
    "aux_P_m_delta": dict(g=lambda x, u: 0.5 / u, floor=1e-30, grade=0.05, note="-w'' = 0.5 / w"),
    "f1_k0": dict(g=lambda x, u: max(u, 0.0) ** 0.5, floor=0.0, grade=None, note="-u'' = u^(1/2)"),
}


def positive_root(g, x, floor, grade, n_scan=60):
    slopes = np.geomspace(1e-4, 1e2, n_scan)
    ends = [integrate_shot(g, 0.0, 1.0, s, STEP, floor, grade).end_value for s in slopes]
    found = []
    for s0, s1, e0, e1 in zip(slopes[:-1], slopes[1:], ends[:-1], ends[1:]):
        if np.sign(e0) == np.sign(e1):
            continue
        res = shoot_1d(g, 0.0, 1.0, s0, s1, step=STEP, floor=floor, nodes=x, grade=grade)
        if np.all(res.values[1:-1] > 0):
            found.append(res)
    if len(found) != 1:
        raise SystemExit(f"expected one positive root, found {len(found)}")
    return found[0]


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    x = build_grid((0.0, 1.0), N).coords
    meta = {}
    for name, spec in SCENARIOS.items():
        f, k, lam = spec["nonlinearity"], spec["k"], spec["lam"]
        s = Scenario((0.0, 1.0), Weight.constant(1.0), f, k, resolution=N)
        pair = fitted_solver(s).construct_pair(lam)
        if not pair.valid:
            raise SystemExit(f"{name}: pair invalid at lambda={lam}")
        g = pointwise_rhs(lam, Weight.constant(1.0), f, k, floor=spec["floor"])
        res = shoot_sandwiched(g, x, pair.sub, pair.super, STEP, spec["floor"], spec["grade"])
        write_profile(OUT / f"{name}.txt", x, res.values)
        meta[name] = {
            "lambda": lam,
            "k": k,
            "nonlinearity": f.to_dict(),
            "weight": Weight.constant(1.0).to_dict(),
            "domain": [0.0, 1.0],
            "n": N,
            "slope": res.slope,
            "miss": res.miss,
            "step": STEP,
            "grade": spec["grade"],
        }
        print(f"{name}: slope={res.slope:.17g} miss={res.miss:.3g} max={np.max(res.values):.6g}", file=sys.stderr)
    for name, spec in PLAIN.items():
        res = positive_root(spec["g"], x, spec["floor"], spec["grade"])
        write_profile(OUT / f"{name}.txt", x, res.values)
        meta[name] = {"equation": spec["note"], "domain": [0.0, 1.0], "n": N, "slope": res.slope, "miss": res.miss,
                      "step": STEP, "grade": spec["grade"]}
        print(f"{name}: slope={res.slope:.17g} miss={res.miss:.3g} max={np.max(res.values):.6g}", file=sys.stderr)
    (OUT / "meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
