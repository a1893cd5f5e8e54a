import numpy as np
import pytest

from liepoisson.algebra import load_algebra


@pytest.fixture(scope="session")
def u1():
    return load_algebra("u1")


@pytest.fixture(scope="session")
def so3():
    return load_algebra("so3")


@pytest.fixture(scope="session")
def su2():
    return load_algebra("su2")


@pytest.fixture(scope="session")
def su3():
    return load_algebra("su3")


@pytest.fixture
def rng():
    return np.random.default_rng(20240801)
