import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from semipositone.errors import ConfigurationError, ContractViolation, ConvergenceError
from semipositone.mesh import ShiftedPoissonSolver, apply_laplacian, build_grid, inner, solve_shifted_poisson


def sine_error(n, dim):
    if dim == 1:
        g = build_grid((0.0, 1.0), n)
        x = g.coords
        exact = np.sin(np.pi * x)
        rhs = np.pi**2 * exact
    else:
        g = build_grid(((0.0, 1.0), (0.0, 1.0)), n)
        X, Y = g.coords
        exact = np.sin(np.pi * X) * np.sin(np.pi * Y)
        rhs = 2 * np.pi**2 * exact
    return np.max(np.abs(solve_shifted_poisson(g, 0.0, rhs) - exact))


def test_grid_basics():
    g = build_grid((0.0, 2.0), 5)
    assert g.dim == 1 and g.n_nodes == 5 and g.n_interior == 3
    assert g.spacing == (0.5,)
    np.testing.assert_array_equal(g.boundary_distance, [0, 0.5, 1.0, 0.5, 0])
    assert g.locate(1.1) == 2
    g2 = build_grid(((0.0, 1.0), (0.0, 2.0)), (5, 9))
    assert g2.shape == (5, 9) and g2.spacing == (0.25, 0.25)
    X, Y = g2.coords
    assert X[4, 0] == 1.0 and Y[0, 8] == 2.0


@pytest.mark.parametrize("domain", [(1.0, 1.0), (2.0, 1.0), ((0, 1), (1, 0))])
def test_degenerate_interval(domain):
    with pytest.raises(ConfigurationError):
        build_grid(domain, 9)


def test_laplacian_exact_on_quadratics():
    g = build_grid((0.0, 1.0), 11)
    x = g.coords
    u = x * (1 - x)
    lap = apply_laplacian(g, u)
    np.testing.assert_allclose(lap[1:-1], 2.0, rtol=1e-10)
    assert lap[0] == lap[-1] == 0.0


def test_laplacian_shape_contract():
    with pytest.raises(ContractViolation):
        apply_laplacian(build_grid((0.0, 1.0), 11), np.zeros(10))


def test_poisson_second_order_1d():
    ratio = sine_error(65, 1) / sine_error(129, 1)
    assert 3.6 <= ratio <= 4.4


def test_poisson_second_order_2d():
    ratio = sine_error(33, 2) / sine_error(65, 2)
    assert 3.4 <= ratio <= 4.6


def test_shifted_solve_satisfies_equation(grid2d):
    rng = np.random.default_rng(0)
    f = rng.normal(size=grid2d.shape)
    u = solve_shifted_poisson(grid2d, 3.0, f)
    r = apply_laplacian(grid2d, u) + 3.0 * u - f
    assert np.max(np.abs(r[grid2d.interior])) < 1e-8 * np.max(np.abs(f))


def test_nodal_shift_matches_scalar(grid1d):
    f = np.sin(3 * grid1d.coords)
    a = solve_shifted_poisson(grid1d, 2.5, f)
    b = ShiftedPoissonSolver(grid1d, np.full(grid1d.shape, 2.5)).solve(f)
    np.testing.assert_allclose(a, b, rtol=0, atol=1e-15)


def test_negative_shift_rejected(grid1d):
    with pytest.raises(ConfigurationError):
        ShiftedPoissonSolver(grid1d, -1.0)


def test_cg_failure_reports_convergence_error(grid2d):
    solver = ShiftedPoissonSolver(grid2d, 0.0, cg_maxiter=2)
    with pytest.raises(ConvergenceError):
        solver.solve(np.ones(grid2d.shape))


def test_inner_is_symmetric_form(grid1d):
    x = grid1d.coords
    u, v = np.sin(np.pi * x), x * (1 - x)
    assert inner(grid1d, apply_laplacian(grid1d, u), v) == pytest.approx(inner(grid1d, u, apply_laplacian(grid1d, v)))


vals = arrays(np.float64, 31, elements=st.floats(-1e3, 1e3))


@settings(max_examples=40, deadline=None)
@given(vals, vals, st.floats(-10, 10), st.floats(0, 50))
def test_linearity(f, g, a, K):
    grid = build_grid((0.0, 1.0), 31)
    lhs = solve_shifted_poisson(grid, K, a * f + g)
    rhs = a * solve_shifted_poisson(grid, K, f) + solve_shifted_poisson(grid, K, g)
    scale = 1 + np.max(np.abs(f)) * (1 + abs(a)) + np.max(np.abs(g))
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * scale


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, 31, elements=st.floats(0, 1e3)), st.floats(0, 50))
def test_maximum_principle(f, K):
    grid = build_grid((0.0, 1.0), 31)
    u = solve_shifted_poisson(grid, K, f)
    assert np.all(u >= -1e-12 * (1 + np.max(f)))


@settings(max_examples=20, deadline=None)
@given(arrays(np.float64, (9, 9), elements=st.floats(0, 1e3)))
def test_maximum_principle_2d(f):
    grid = build_grid(((0.0, 1.0), (0.0, 1.0)), 9)
    u = solve_shifted_poisson(grid, 0.0, f)
    assert np.all(u >= -1e-9 * (1 + np.max(f)))
