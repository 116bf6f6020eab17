import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from nillab.config import standard_config

settings.register_profile(
    "lab", deadline=None, max_examples=200, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("lab")


@pytest.fixture(scope="session")
def std_cfg():
    return standard_config()


@pytest.fixture(scope="session")
def std_sys(std_cfg):
    return std_cfg.system()


@pytest.fixture(scope="session")
def std_js(std_cfg):
    return std_cfg.joining()


@pytest.fixture()
def rng():
    return np.random.default_rng(20260811)
