import numpy as np
import pytest

from tdhfb.grids import Grid, Kernel


@pytest.fixture
def grid():
    return Grid(d=1, M=64, L=16.0)


@pytest.fixture
def small_grid():
    return Grid(d=1, M=32, L=16.0)


def random_field_values(rng, grid):
    shape = (grid.M,) * grid.d
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def random_kernel(rng, grid, symmetry="none", op_norm=None):
    n = grid.n
    r = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    if symmetry == "symmetric":
        r = 0.5 * (r + r.T)
    elif symmetry == "hermitian":
        r = 0.5 * (r + r.conj().T)
    if op_norm is not None:
        r *= op_norm / np.linalg.norm(grid.weight * r, 2)
    return Kernel(grid, r, symmetry)
