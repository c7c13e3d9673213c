import numpy as np
import pytest

from tqnav.earth import EarthModel
from tqnav.trajectory import ScenarioParams


@pytest.fixture
def rng():
    return np.random.default_rng(987243)


@pytest.fixture(scope="session")
def wgs84():
    return EarthModel.wgs84()


@pytest.fixture(scope="session")
def vacuum():
    return EarthModel.vacuum()


@pytest.fixture(scope="session")
def coning_flight():
    """Benchmark scenario parameters (full duration)."""
    return ScenarioParams()
