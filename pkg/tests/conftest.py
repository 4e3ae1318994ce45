import numpy as np
import pytest

from llgsip.grid import GridSpec, VectorField


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_field(grid, rng):
    return VectorField(grid, rng.standard_normal(grid.counts + (3,)))


def random_unit_field(grid, rng):
    data = rng.standard_normal(grid.counts + (3,))
    data /= np.linalg.norm(data, axis=-1, keepdims=True)
    return VectorField(grid, data)


def small_grids(boundary):
    return [
        GridSpec((6, 5), (0.4, 0.4), boundary=boundary),
        GridSpec((4, 7), (0.25, 0.25), boundary=boundary),
        GridSpec((4, 5, 6), (0.5, 0.5, 0.5), boundary=boundary),
    ]
