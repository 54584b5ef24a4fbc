import numpy as np
import pytest

from logcauchy.geometry import BoundarySystem, make_circle, make_fourier_contour


@pytest.fixture(scope="session")
def unit_circle():
    return make_circle(0, 1, 256)


@pytest.fixture(scope="session")
def unit_disc_bs(unit_circle):
    return BoundarySystem([unit_circle])


@pytest.fixture(scope="session")
def ellipse():
    # p(s) = cos s + (i/2) sin s  ==  0.75 e^{is} + 0.25 e^{-is}
    return make_fourier_contour({1: 0.75, -1: 0.25}, 256)


def const_fn(c):
    return lambda z: np.full(np.shape(z), c, dtype=complex)
