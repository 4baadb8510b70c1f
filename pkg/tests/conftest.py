import numpy as np
import pytest

from netopinion.grids import ConnectivityRange, DensityField, ModelParams, OpinionGrid


@pytest.fixture
def grid80():
    return OpinionGrid(80)


@pytest.fixture
def crange250():
    return ConnectivityRange(250)


@pytest.fixture
def params_a10():
    return ModelParams(alpha=10.0, sigma2=0.05)


def random_field(grid, crange, seed=0):
    rng = np.random.default_rng(seed)
    return DensityField(rng.random((grid.n + 1, crange.c_max + 1)),
                        grid, crange).normalized()
