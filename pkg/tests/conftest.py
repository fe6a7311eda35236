import numpy as np
import pytest

from dmdholo.fieldgen import DEFAULT_GRID, GridSpec


@pytest.fixture(scope="session")
def grid():
    return DEFAULT_GRID


@pytest.fixture(scope="session")
def small_grid():
    return GridSpec(128, 128, 10e-6)


@pytest.fixture(scope="session")
def grid512():
    return GridSpec(512, 512, 7.5e-6)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
