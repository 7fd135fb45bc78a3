import json
import pathlib

import numpy as np
import pytest

from semipositone import Nonlinearity, Scenario, Weight, build_grid
from semipositone.oracle import read_profile

GOLDEN = pathlib.Path(__file__).parent / "golden"

# lines reported by tests/test_acceptance.py, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture
def grid1d():
    return build_grid((0.0, 1.0), 257)


@pytest.fixture
def grid2d():
    return build_grid(((0.0, 1.0), (0.0, 1.0)), 33)


@pytest.fixture(scope="session")
def golden_meta():
    return json.loads((GOLDEN / "meta.json").read_text())


@pytest.fixture(scope="session")
def golden():
    def load(name):
        return read_profile(GOLDEN / f"{name}.txt")

    return load


def sublinear_m1(k=1.0, **kw):
    return Scenario((0.0, 1.0), Weight.constant(1.0), Nonlinearity.sublinear(0.5), k, **kw)


def singular_m1(**kw):
    return Scenario((0.0, 1.0), Weight.constant(1.0), Nonlinearity.singular(0.5), 0.1, **kw)


def bounded_m1(**kw):
    return Scenario((0.0, 1.0), Weight.constant(1.0), Nonlinearity.saturating(2.0), 1.0, **kw)


def sup(u):
    return float(np.max(np.abs(u)))
