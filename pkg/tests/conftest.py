import numpy as np
import pytest

from ineqlab.constants import Params
from ineqlab.functionals import test_family
from ineqlab.grid import BALL, RadialFn, ball_grid, space_grid


@pytest.fixture(scope="session")
def ball3():
    return ball_grid(3, 1.0, 4096)


@pytest.fixture(scope="session")
def ball2():
    return ball_grid(2, 1.0, 4096)


@pytest.fixture(scope="session")
def ball2_aligned():
    # 4001 nodes on (1e-8, 1): ln(10) is exactly 500 grid steps, so the
    # concentration kinks of k = 10^m profiles sit on nodes
    return ball_grid(2, 1.0, 4001)


@pytest.fixture(scope="session")
def space3():
    return space_grid(3, 4096)


@pytest.fixture(scope="session")
def cone3(ball3):
    return test_family("cone", Params(N=3, p=2.0), ball3)


@pytest.fixture(scope="session")
def cone2(ball2):
    return test_family("cone", Params(N=2, p=2.0), ball2)


@pytest.fixture(scope="session")
def bubble3(space3):
    return test_family("talenti_bubble", Params(N=3, p=2.0), space3)


def raw_fn(grid, values):
    """Integrand wrapper without the compact-support boundary enforcement."""
    return RadialFn(grid, np.asarray(values, dtype=float), BALL, grid.r_max)
