import numpy as np
import pytest

from spiked_detect.density import builtin_gaussian, builtin_sech


@pytest.fixture(scope="session")
def gaussian():
    return builtin_gaussian()


@pytest.fixture(scope="session")
def sech():
    return builtin_sech()


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)
