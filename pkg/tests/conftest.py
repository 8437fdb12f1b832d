import numpy as np
import pytest

from plugflow.config import PlugConfig
from plugflow.wilson import WilsonParams


@pytest.fixture(scope="session")
def wp() -> WilsonParams:
    return WilsonParams()


@pytest.fixture(scope="session")
def default_config() -> PlugConfig:
    return PlugConfig.default()


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(7)
