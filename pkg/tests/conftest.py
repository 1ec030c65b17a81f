import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "cmvc",
    max_examples=50,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("cmvc")


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_frame(rng, planes=1, height=16, width=16):
    return rng.integers(0, 256, size=(planes, height, width)).astype(np.uint8)
