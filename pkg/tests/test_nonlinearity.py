import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semipositone.errors import ConfigurationError, DomainError
from semipositone.nonlinearity import Nonlinearity, eval_f, lipschitz_bound


@pytest.mark.parametrize(
    "kwargs",
    [
        {"family": "F1", "p": 1.0},
        {"family": "F1", "p": 0.0},
        {"family": "F2", "c": -1.0},
        {"family": "F2"},
        {"family": "F3", "p": 0.0},
        {"family": "F4", "p": 0.5},
        {"family": "F1", "p": 0.5, "l0": 1.0},
        {"family": "F1", "p": 0.5, "l0": 2.0, "l1": 1.0},
    ],
)
def test_invalid_specs(kwargs):
    with pytest.raises(ConfigurationError):
        Nonlinearity(**kwargs)


def test_presets():
    assert Nonlinearity.sublinear(0.5)(4.0) == 2.0
    assert Nonlinearity.saturating(2.0)(1.0) == 1.0
    assert Nonlinearity.singular(0.5)(4.0) == 0.5
    assert Nonlinearity.saturating(2.0).sup == 2.0
    assert np.isinf(Nonlinearity.sublinear(0.5).sup)


def test_domain_errors():
    with pytest.raises(DomainError):
        eval_f(Nonlinearity.singular(0.5), 0.0)
    with pytest.raises(DomainError):
        eval_f(Nonlinearity.sublinear(0.5), np.array([1.0, -1e-3]))


def test_longdouble_preserved():
    s = np.array([2.0, 3.0], dtype=np.longdouble)
    assert eval_f(Nonlinearity.sublinear(0.5), s).dtype == np.longdouble


FAMILIES = [Nonlinearity.sublinear(0.5), Nonlinearity.sublinear(0.25), Nonlinearity.saturating(2.0), Nonlinearity.singular(0.5)]


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(FAMILIES), st.floats(1e-3, 1e3), st.floats(1.0, 100.0))
def test_lipschitz_bound_dominates_derivative(f, lo, factor):
    hi = lo * factor
    s = np.linspace(lo, hi, 201)
    assert np.max(np.abs(f.derivative(s))) <= lipschitz_bound(f, lo, hi)


def test_lipschitz_vectorised_matches_scalar():
    f = Nonlinearity.saturating(2.0)
    lo = np.array([0.0, 1.0, 3.0])
    hi = lo + 1
    vec = lipschitz_bound(f, lo, hi)
    assert vec == pytest.approx([lipschitz_bound(f, a, b) for a, b in zip(lo, hi)])


def test_lipschitz_errors():
    with pytest.raises(ConfigurationError):
        lipschitz_bound(Nonlinearity.sublinear(0.5), 2.0, 1.0)
    with pytest.raises(DomainError):
        lipschitz_bound(Nonlinearity.singular(0.5), 0.0, 1.0)
