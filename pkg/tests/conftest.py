import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_complex(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_qpsk(rng, count):
    return ((1 - 2 * rng.integers(0, 2, count)) + 1j * (1 - 2 * rng.integers(0, 2, count))) / np.sqrt(2)
