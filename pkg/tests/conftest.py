"""Shared fixtures."""

import numpy as np
import pytest

from akgrav.expr import Chart, parse
from akgrav.sampling import halton_box

BOX = [(-1.0, 1.0), (-1.0, 1.0), (0.2, 1.5), (0.2, 1.5)]


@pytest.fixture(scope="session")
def chart():
    return Chart(("x1", "x2"), ("y3", "y4"))


@pytest.fixture(scope="session")
def points():
    """Twenty Halton points away from y = 0."""
    return halton_box(BOX, 20, seed=3)


@pytest.fixture(scope="session")
def exp_L(chart):
    return parse("exp(x1)*(y3^2 + y4^2)", chart)


def max_abs(values):
    values = np.asarray(values, dtype=float)
    return float(np.max(np.abs(values))) if values.size else 0.0
