import math

import numpy as np
import pytest

from mindet.generators import BumpSpec, DisjointPairSpec, make_bump, make_disjoint_pair
from mindet.grid_core import Grid

# Independent quadrature values (scipy.integrate.quad on exp(-1/(1-u^2)), |u| < 1)
BUMP_INTEGRAL = 0.4439938161680793
BUMP_SQUARED_INTEGRAL = 0.1330861208449943
BUMP_M_AT_1 = 0.2544800908482455  # autocorrelation at theta = 1 of the L2-normalized bump
BUMP_M2 = 3.077609131231776  # integral of f'^2 for the L2-normalized bump


@pytest.fixture(scope="session")
def grid():
    return Grid(-4.0, 4.0, 4096)


@pytest.fixture(scope="session")
def small_grid():
    return Grid(-4.0, 4.0, 512)


@pytest.fixture(scope="session")
def bump(grid):
    return make_bump(BumpSpec(0.0, 1.0), grid)


@pytest.fixture(scope="session")
def pair(grid):
    spec = DisjointPairSpec.shifted_copy(BumpSpec(-1.5, 0.5), 3.0)
    return make_disjoint_pair(spec, grid)


def gaussian(x, sigma=1.0):
    return np.exp(-0.5 * (x / sigma) ** 2) / math.sqrt(2.0 * math.pi * sigma**2)
