from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

BETAS = (Fraction(1, 7), Fraction(1, 3), Fraction(9, 10))
IMMUNITIES = (0, 1, 2, 3, 5, 11)


@pytest.fixture(scope="session")
def grid_axes():
    return BETAS, IMMUNITIES
