import numpy as np
import pytest

from interpcomp import GridSpec, gen_bandlimited


@pytest.fixture
def grid():
    return GridSpec(64, 16, 1)


@pytest.fixture
def grid_small():
    return GridSpec(32, 16, 1)


@pytest.fixture
def bl_signal(grid):
    return gen_bandlimited(7, grid, 34.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
