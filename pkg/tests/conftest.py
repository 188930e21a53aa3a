import numpy as np
import pytest

from poissoncalc import QuadSpec, build_box_space
from poissoncalc.estimates import McSpec


@pytest.fixture
def unit_space():
    return build_box_space(1, [1.0], 1.0)


@pytest.fixture
def square_space():
    return build_box_space(2, [1.0, 1.0], 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def small_mc():
    return McSpec(n_outer=5000, seed=99, ci_level=0.95)


@pytest.fixture
def small_quad():
    return QuadSpec(n_sigma_samples=32, seed=5)
