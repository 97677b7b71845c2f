from __future__ import annotations

import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from lslcopula import make_pwl, random_dlsl, si_counterexample

settings.register_profile(
    "default", max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# a tight-eta diagonal with dyadic knots: eta is constant on [1/4, 1/2]
TIGHT_KNOTS = ((0.0, 0.0), (0.25, 0.125), (0.5, 0.375), (1.0, 1.0))

seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)
knot_counts = st.integers(min_value=2, max_value=25)
unit_open = st.floats(min_value=1e-6, max_value=1.0 - 1e-6)
unit_closed = st.floats(min_value=0.0, max_value=1.0)


@st.composite
def diagonals(draw):
    return random_dlsl(draw(seeds), draw(knot_counts))


@pytest.fixture
def tight():
    return make_pwl(TIGHT_KNOTS)


@pytest.fixture
def si_diag():
    return si_counterexample()


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
