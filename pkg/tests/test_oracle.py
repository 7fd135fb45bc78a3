from dataclasses import replace

import numpy as np
import pytest

from semipositone.errors import BracketingError, ConfigurationError
from semipositone.experiments import fitted_solver
from semipositone.mesh import build_grid, solve_shifted_poisson
from semipositone.oracle import (
    integrate_shot,
    pointwise_rhs,
    read_profile,
    shoot_1d,
    shoot_sandwiched,
    write_profile,
)

from conftest import singular_m1, sublinear_m1


def test_linear_problem_agrees_with_shifted_poisson(grid1d):
    # -u'' + 4u = 1 is linear in u: shooting and the direct solve must agree
    x = grid1d.coords
    res = shoot_1d(lambda x, u: 1.0 - 4.0 * u, 0.0, 1.0, 0.0, 1.0, nodes=x)
    u = solve_shifted_poisson(grid1d, 4.0, np.ones(grid1d.shape))
    assert np.max(np.abs(res.values - u)) <= 1e-6


def test_exact_quadratic():
    x = np.linspace(0, 1, 11)
    res = shoot_1d(lambda x, u: 2.0, 0.0, 1.0, 0.5, 2.0, nodes=x)
    np.testing.assert_allclose(res.values, x * (1 - x), atol=1e-12)
    assert res.slope == pytest.approx(1.0)


def test_bracketing_errors():
    g = lambda x, u: 2.0
    with pytest.raises(BracketingError):
        shoot_1d(g, 0.0, 1.0, 1.0, 1.0)
    with pytest.raises(BracketingError):
        shoot_1d(g, 0.0, 1.0, 2.0, 3.0)
    with pytest.raises(ConfigurationError):
        shoot_1d(g, 1.0, 0.0, 0.5, 2.0)
    with pytest.raises(ConfigurationError):
        shoot_1d(g, 0.0, 1.0, 0.5, 2.0, step=1e-2)


def test_step_halving_converges_at_fourth_order():
    g = lambda x, u: np.sin(u) + 1.0
    ref = integrate_shot(g, 0.0, 1.0, 1.0, 1e-4).end_value
    e1 = abs(integrate_shot(g, 0.0, 1.0, 1.0, 0.1).end_value - ref)
    e2 = abs(integrate_shot(g, 0.0, 1.0, 1.0, 0.05).end_value - ref)
    assert e1 / e2 >= 12


def test_floor_marks_failed_shot():
    shot = integrate_shot(lambda x, u: 50.0, 0.0, 1.0, 1.0, 1e-3, floor=0.0)
    assert shot.failed and shot.end_value == -np.inf


def test_profile_round_trip(tmp_path):
    x = np.linspace(0, 1, 7)
    u = np.sin(np.pi * x) / 3
    write_profile(tmp_path / "p.txt", x, u)
    x2, u2 = read_profile(tmp_path / "p.txt")
    assert np.array_equal(x, x2) and np.array_equal(u, u2)


def test_k0_golden_matches_monotone(golden):
    x, ref = golden("f1_k0")
    sol = fitted_solver(sublinear_m1(k=0.0)).solve(1.0)
    assert sol.record.validated
    assert np.max(np.abs(sol.u - ref)) <= 1e-3


def test_sandwiched_singular_shot():
    s = singular_m1()
    solver = fitted_solver(s)
    pair = solver.construct_pair(100.0)
    g = pointwise_rhs(100.0, s.weight, s.nonlinearity, s.k, floor=1e-30)
    res = shoot_sandwiched(g, solver.grid_.coords, pair.sub, pair.super, floor=1e-30, grade=0.05)
    u = solver.solve(100.0).u
    assert np.max(np.abs(res.values - u)) <= 1e-3


def test_pointwise_rhs_matches_nodal(grid1d):
    s = sublinear_m1()
    solver = fitted_solver(s)
    g = pointwise_rhs(7.0, s.weight, s.nonlinearity, s.k)
    u = np.linspace(0.0, 2.0, grid1d.n_nodes)
    nodal = solver.rhs(7.0)(u)
    assert np.allclose([g(xi, ui) for xi, ui in zip(grid1d.coords[1:-1], u[1:-1])], nodal[1:-1])


def _oracle_gap(s, lam, floor=0.0, grade=None):
    solver = fitted_solver(s)
    sol = solver.solve(lam)
    assert sol.record.validated
    g = pointwise_rhs(lam, s.weight, s.nonlinearity, s.k, floor)
    shot = shoot_sandwiched(g, solver.grid_.coords, sol.pair.sub, sol.pair.super, floor=floor, grade=grade)
    return float(np.max(np.abs(shot.values - sol.u))), float(np.max(sol.u)), solver.grid_.spacing[0]


# the empirical thresholds at n = 257 (see test_acceptance)
EXAMPLES = [
    pytest.param(sublinear_m1(), 10 * 81.788, 0.0, None, id="sublinear-10x-threshold"),
    pytest.param(singular_m1(), 1777.99 / 2, 1e-30, 0.05, id="singular-half-threshold"),
]
# u'' is unbounded at the boundary for the singular family, so the
# difference scheme converges there at a reduced order (about 1.4)
MIN_RATIO = {"F1": 3.0, "F3": 2.0}


@pytest.mark.xfail(strict=True, reason="O(h^2) discretisation error of a large solution exceeds 1e-3 at n=257")
@pytest.mark.parametrize("s,lam,floor,grade", EXAMPLES)
def test_example_absolute_agreement(s, lam, floor, grade):
    gap, _, _ = _oracle_gap(s, lam, floor, grade)
    assert gap <= 1e-3


@pytest.mark.parametrize("s,lam,floor,grade", EXAMPLES)
def test_example_gap_is_second_order(s, lam, floor, grade):
    coarse, _, _ = _oracle_gap(replace(s, resolution=129), lam, floor, grade)
    fine, _, _ = _oracle_gap(s, lam, floor, grade)
    assert MIN_RATIO[s.nonlinearity.family] <= coarse / fine <= 5.0
