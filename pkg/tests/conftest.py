import numpy as np
import pytest

from shearlab.core import Grid


@pytest.fixture
def box():
    """Small unit periodic box with integer wavenumbers."""
    return Grid.periodic(32, 32, lx=2 * np.pi, ly=2 * np.pi, y0=0.0)


@pytest.fixture
def offset_box():
    """Periodic box shifted to y in [1, 1+2pi) (|y| >= 1)."""
    return Grid.periodic(64, 64, lx=2 * np.pi, ly=2 * np.pi, y0=1.0)


@pytest.fixture
def channel():
    """Channel with |y| >= 1."""
    return Grid.channel(64, 128, a=1.0, b=2.0)


@pytest.fixture
def wide_box():
    """Truncation of the unbounded channel."""
    return Grid.periodic(32, 128, lx=2 * np.pi, ly=8 * np.pi)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
