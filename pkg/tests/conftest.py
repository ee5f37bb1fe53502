import math

import numpy as np
import pytest

from axired import catalog
from axired.geometry import Chart


@pytest.fixture(scope="session")
def mink():
    return catalog.minkowski()


@pytest.fixture(scope="session")
def schw():
    return catalog.schwarzschild(1.0)


@pytest.fixture(scope="session")
def kerr():
    return catalog.kerr(1.0, 0.5)


@pytest.fixture
def polar3():
    return Chart(("t", "r", "theta"), {}, {"r": (1.0, 5.0), "theta": (0.3, math.pi - 0.3)})


def central_fd(f, x, h):
    """Fourth-order central difference of a numpy-callable f."""
    return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h)


@pytest.fixture
def fd():
    return central_fd


@pytest.fixture
def rng():
    return np.random.default_rng(42)
