import numpy as np
import pytest
from hypothesis import settings

from dunklkit import make_multiplicity, sample
from dunklkit.log import setup_logging

settings.register_profile("default", max_examples=25, deadline=None)
settings.load_profile("default")

setup_logging(False)


@pytest.fixture
def mult1():
    return make_multiplicity(1, (0.5,))


@pytest.fixture
def mult2():
    return make_multiplicity(2, (0.5, 1.0))


def gaussian(x):
    x = np.asarray(x, dtype=float)
    return np.exp(-np.sum(x * x, axis=-1) / 2.0)


@pytest.fixture
def gauss1(mult1):
    return sample(mult1, gaussian, 12.0, 96, label="gauss")


@pytest.fixture
def gauss2(mult2):
    return sample(mult2, gaussian, 12.0, 48, label="gauss")
