import numpy as np
import pytest

from twomuhs.spectral import PeriodicGrid, RandomFieldSpec, random_field


def trig_eval(field, x):
    """Evaluate a grid field's trigonometric interpolant at arbitrary points by direct summation."""
    c = field.coeffs
    n = field.grid.n
    out = np.full_like(x, c[0].real, dtype=float)
    for k in range(1, n // 2):
        out += 2.0 * (c[k] * np.exp(2j * np.pi * k * x)).real
    return out


def rand(grid, seed, k_max=8, amplitude=0.5, mean=0.0):
    return random_field(RandomFieldSpec(seed, k_max, amplitude, mean), grid)


@pytest.fixture
def grid():
    return PeriodicGrid(64)


@pytest.fixture
def grid128():
    return PeriodicGrid(128)
