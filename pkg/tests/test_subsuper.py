import numpy as np
import pytest

from semipositone.cone import solution_operator
from semipositone.errors import ConfigurationError, RangeError
from semipositone.experiments import fitted_solver
from semipositone.mesh import build_grid
from semipositone.nonlinearity import Nonlinearity
from semipositone.subsuper import (
    construct_pair_bounded,
    construct_pair_singular,
    construct_pair_sublinear,
    lemma_pair,
    residual_report,
    singular_exponent,
)
from semipositone.weights import Weight

from conftest import bounded_m1, singular_m1, sublinear_m1

SUB_CASES = [
    (Nonlinearity.sublinear(0.5), Weight.constant(1.0)),
    (Nonlinearity.saturating(2.0), Weight.step(0.5)),
    (Nonlinearity.sublinear(0.3), Weight("sine", {"offset": 0.5, "amplitude": 1.0})),
]


@pytest.mark.parametrize("f,w", SUB_CASES)
@pytest.mark.parametrize("lam,k", [(1.0, 1.0), (50.0, 0.1), (1e4, 3.0)])
def test_zero_is_never_a_subsolution(grid1d, f, w, lam, k):
    m = w.sample(grid1d)
    r = residual_report(np.zeros(grid1d.shape), lam, m, f, k, "sub", grid1d)
    assert r == pytest.approx(lam * np.max(m) * k)
    assert r > 0


def test_residual_report_role(grid1d):
    with pytest.raises(ConfigurationError):
        residual_report(np.zeros(grid1d.shape), 1.0, 1.0, Nonlinearity.sublinear(0.5), 1.0, "both", grid1d)


def test_sublinear_pair_valid_above_threshold():
    solver = fitted_solver(sublinear_m1())
    pair = solver.construct_pair(200.0)
    assert pair.valid
    np.testing.assert_allclose(pair.sub, 200.0**2 * solver.w_)
    assert pair.meta["lambda0_bound"] == pytest.approx(1.0 / solver.beta_)


def test_sublinear_pair_invalid_below_threshold():
    assert not fitted_solver(sublinear_m1()).construct_pair(10.0).valid


def test_sublinear_pair_family_check(grid1d):
    with pytest.raises(ConfigurationError):
        construct_pair_sublinear(1.0, np.ones(grid1d.shape), 0.1, 0.5, 1.0, Nonlinearity.saturating(2.0), 1.0, grid1d)


def test_bounded_pair(grid1d):
    f = Nonlinearity.saturating(2.0)
    pair = construct_pair_bounded(700.0, 1.0, f, 1.0, 0.2, grid1d)
    assert pair.valid
    w = pair.meta["w"]
    np.testing.assert_allclose(pair.sub, 700.0 * w)
    assert np.all(pair.super == pair.meta["t"] * pair.meta["phi"])
    assert not construct_pair_bounded(10.0, 1.0, f, 1.0, 0.2, grid1d).valid


def test_singular_pair_and_range():
    solver = fitted_solver(singular_m1())
    pair = solver.construct_pair(10.0)
    assert pair.valid
    sigma = singular_exponent(0.5)
    assert sigma == pytest.approx(2 / 3)
    np.testing.assert_allclose(pair.super, pair.meta["t"] * (10.0 * pair.meta["phi"]) ** sigma)
    with pytest.raises(RangeError):
        solver.construct_pair(10 * pair.meta["lambda0"])


def test_lemma_pair_beta_limit():
    solver = fitted_solver(sublinear_m1())
    g = solver.grid_
    with pytest.raises(RangeError):
        lemma_pair(1.0, 1.0, 1.01 * solver.beta0_, 0.25, 0.5, solver.w_U_, g)
    pair = lemma_pair(1.0, 1.0, solver.beta0_, 0.25, 0.5, solver.w_U_, g)
    assert pair.valid


def test_scale_covariance_of_operator(grid1d):
    # S(c m) = c S(m): the sub of the bounded pair scales linearly with lambda
    f = Nonlinearity.saturating(2.0)
    a = construct_pair_bounded(500.0, 1.0, f, 1.0, 0.2, grid1d)
    b = construct_pair_bounded(1000.0, 1.0, f, 1.0, 0.2, grid1d)
    np.testing.assert_allclose(b.sub, 2 * a.sub, rtol=1e-14)
    np.testing.assert_allclose(solution_operator(3.0, grid1d), 3 * solution_operator(1.0, grid1d), rtol=1e-14)
