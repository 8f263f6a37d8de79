import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from payne_lab.convex_geometry import ConvexPolygon

settings.register_profile("default", deadline=None, max_examples=50,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def square():
    return ConvexPolygon.rectangle(1.0, 1.0, name="square")


@pytest.fixture
def rect12():
    return ConvexPolygon.rectangle(1.0, 2.0)


@pytest.fixture
def rng():
    return np.random.default_rng(7)
