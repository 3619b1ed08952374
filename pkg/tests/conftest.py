import numpy as np
import pytest

from solistab.fields import SolitonConfig, TorusGrid
from solistab.groundstate import cached_ground_state


@pytest.fixture(scope="session")
def gs13():
    return cached_ground_state(1, 3.0)


@pytest.fixture(scope="session")
def gs12():
    return cached_ground_state(1, 2.0)


@pytest.fixture(scope="session")
def gs115():
    return cached_ground_state(1, 1.5)


@pytest.fixture(scope="session")
def gs22():
    return cached_ground_state(2, 2.0)


@pytest.fixture(scope="session")
def gs32():
    return cached_ground_state(3, 2.0)


@pytest.fixture(scope="session")
def gs33():
    return cached_ground_state(3, 3.0)


@pytest.fixture(scope="session")
def grid1d():
    return TorusGrid(1, 160.0, 2**14)


@pytest.fixture(scope="session")
def grid2d():
    return TorusGrid(2, 100.0, 1024)


@pytest.fixture()
def two_soliton_cfg(gs13):
    return SolitonConfig(gs13.params, np.array([[-6.0], [6.0]]))
