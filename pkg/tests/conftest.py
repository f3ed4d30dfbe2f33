import numpy as np
import pytest

from curvlab import decomp, euclid, holonomy


@pytest.fixture(scope="session")
def so5_space():
    return euclid.generic(5)


@pytest.fixture(scope="session")
def so5(so5_space):
    return holonomy.so_algebra(so5_space)


@pytest.fixture(scope="session")
def u3_space():
    return euclid.kaehler(3)


@pytest.fixture(scope="session")
def u3(u3_space):
    return holonomy.u_algebra(u3_space)


@pytest.fixture(scope="session")
def qk2_space():
    return euclid.quaternion_kaehler(2)


@pytest.fixture(scope="session")
def qk2(qk2_space):
    return holonomy.sp_sp1_algebra(qk2_space)


@pytest.fixture(scope="session")
def hp2():
    return decomp.hp(2)


@pytest.fixture(scope="session")
def wolf2():
    return decomp.wolf(2)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
