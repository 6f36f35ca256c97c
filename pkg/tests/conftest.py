import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def circle_points(rng, n):
    """n cyclically increasing extended reals, no two closer than 0.05 rad."""
    while True:
        t = np.sort(rng.uniform(-math.pi, math.pi, n))
        gaps = np.diff(np.append(t, t[0] + 2 * math.pi))
        if gaps.min() > 0.05:
            return np.tan(t / 2.0)
