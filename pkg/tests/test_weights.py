import numpy as np
import pytest

from semipositone.errors import ConfigurationError, ContractViolation
from semipositone.mesh import build_grid
from semipositone.weights import (
    Weight,
    bounded_general_check,
    build_M_delta,
    eme_check_1d,
    eme_check_nd,
    integrate,
    split_pm,
)


@pytest.fixture
def g201():
    # breakpoints 0.4 and 0.6 fall on nodes
    return build_grid((0.0, 1.0), 201)


@pytest.mark.parametrize("gamma", [0.5, 1.0, 1.5, 2.0])
def test_step_weight_closed_form(g201, gamma):
    rep = eme_check_1d(Weight.step(gamma), g201)
    assert rep.lhs == pytest.approx(0.1 * gamma, abs=1e-6)
    assert rep.rhs == pytest.approx(0.16, abs=1e-6)
    assert rep.holds == (gamma < 1.6)


def test_breakpoint_nodes_are_averaged(g201):
    m = Weight.step(1.0).sample(g201)
    i = g201.locate(0.4)
    assert m[i] == 0.0 and m[i - 1] == 1.0 and m[i + 1] == -1.0


def test_split_pm_disjoint(g201):
    mp, mm = split_pm(Weight.step(1.5), g201)
    assert np.all(mp * mm == 0)
    np.testing.assert_array_equal(mp - mm, Weight.step(1.5).sample(g201))


def test_weight_dict_round_trip():
    for w in [Weight.constant(2.0), Weight.step(0.5), Weight("sine", {"offset": 0.2, "amplitude": 1.0, "modes": [2]})]:
        assert Weight.from_dict(w.to_dict()) == w


def test_unknown_kind():
    with pytest.raises(ConfigurationError):
        Weight("spline", {})
    with pytest.raises(ConfigurationError):
        Weight.from_dict({"value": 1.0})


def test_piece_outside_domain_rejected():
    w = Weight.piecewise(1.0, [{"box": [0.5, 1.5], "value": -1.0}])
    with pytest.raises((ConfigurationError, ContractViolation)):
        w.sample(build_grid((0.0, 1.0), 11))


def test_radial_bump_2d():
    g = build_grid(((0.0, 1.0), (0.0, 1.0)), 21)
    w = Weight("radial_bump", {"base": -0.1, "height": 1.0, "center": [0.5, 0.5], "radius": 0.3})
    m = w.sample(g)
    assert m.max() == pytest.approx(0.9)
    assert m.min() == pytest.approx(-0.1)


def test_integrate_exact_for_linear(g201):
    assert integrate(g201, g201.coords) == pytest.approx(0.5, abs=1e-15)


def test_eme_nd_is_conditional():
    g = build_grid(((0.0, 1.0), (0.0, 1.0)), 33)
    rep = eme_check_nd(Weight.constant(1.0), g, c_domain=1.0, q=3.0)
    assert rep.conditional and rep.holds and rep.lhs == 0.0
    with pytest.raises(ConfigurationError):
        eme_check_nd(Weight.constant(1.0), g, c_domain=1.0, q=2.0)
    with pytest.raises(ConfigurationError):
        eme_check_nd(Weight.constant(1.0), g, c_domain=0.0, q=3.0)


def test_eme_1d_needs_1d():
    with pytest.raises(ContractViolation):
        eme_check_1d(Weight.constant(1.0), build_grid(((0, 1), (0, 1)), 9))


def test_M_delta_values(grid1d):
    M = build_M_delta(np.ones(grid1d.shape), 2.0, 2.0, 1.0, 0.25, grid1d)
    d = grid1d.boundary_distance
    np.testing.assert_allclose(M[d >= 0.25], 0.75)
    np.testing.assert_allclose(M[d < 0.25], -1.0)


@pytest.mark.parametrize(
    "c,C,k,delta",
    [(1.0, 2.0, 1.0, 0.2), (2.0, 1.5, 1.0, 0.2), (2.0, 2.0, 1.0, 0.5), (2.0, 2.0, 1.0, 0.0)],
)
def test_M_delta_errors(grid1d, c, C, k, delta):
    with pytest.raises(ConfigurationError):
        build_M_delta(np.ones(grid1d.shape), c, C, k, delta, grid1d)


def test_bounded_general_check(g201):
    assert bounded_general_check(Weight.step(0.5), 1.0, 1.0, g201).is_member
    assert not bounded_general_check(Weight.step(0.5), 0.1, 10.0, g201).is_member
    with pytest.raises(ConfigurationError):
        bounded_general_check(Weight.step(0.5), 2.0, 1.0, g201)
