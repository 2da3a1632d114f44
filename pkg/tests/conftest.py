import numpy as np
import pytest

from weakslit.qcore import GaussianParams, Grid1D, superposition_initial


@pytest.fixture
def grid():
    return Grid1D(-40.0, 40.0, 2048)


@pytest.fixture
def wide_grid():
    # spans every packet center +/- 8 widths up to t = 10 (sigma ~ 5.1)
    return Grid1D(-96.0, 96.0, 4096)


@pytest.fixture
def packet_left():
    return GaussianParams(x0=-10.0, p0=2.0, d=1.0, m=1.0)


@pytest.fixture
def packet_right():
    return GaussianParams(x0=10.0, p0=-2.0, d=1.0, m=1.0)


@pytest.fixture
def two_packet_state(grid):
    return superposition_initial(10.0, 2.0, 1.0, 1.0, grid)


def simpson(y, x):
    """Composite Simpson on a uniform odd-length grid (test-side oracle)."""
    n = len(x)
    assert n % 2 == 1
    h = x[1] - x[0]
    return h / 3.0 * (y[0] + y[-1] + 4.0 * np.sum(y[1:-1:2]) + 2.0 * np.sum(y[2:-1:2]))
