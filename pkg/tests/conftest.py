import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from modirect.beam import BeamModel

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def beam15() -> BeamModel:
    return BeamModel(n_elements=15)


@pytest.fixture(scope="session")
def beam2() -> BeamModel:
    return BeamModel(n_elements=2)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260823)
