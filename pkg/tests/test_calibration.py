import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from truncpoisson.calibration import (
    MAX_ITER,
    InfeasibleObservation,
    Observation,
    calibrate,
    estimate_alpha,
    estimate_nu,
    feasible_interval,
    implied_immunity,
    pi1_limit,
)
from truncpoisson.params import DomainError

E = math.exp(-1)


def test_estimate_alpha_examples():
    assert estimate_alpha(0.367879) == pytest.approx(1.0, abs=1e-5)
    assert estimate_alpha(0.5) == pytest.approx(math.log(2))
    assert estimate_alpha(0.9) == pytest.approx(0.1054, abs=1e-4)
    for bad in (0, 1, -0.2):
        with pytest.raises(DomainError):
            estimate_alpha(bad)


def test_estimate_nu_endpoints():
    assert estimate_nu(1.0, E) == 0.0
    assert estimate_nu(1.0, 1 - E) == 1.0
    assert estimate_nu(1.0, 0.4228) == pytest.approx(0.15, abs=1e-3)
    # within the clamp margin
    assert estimate_nu(1.0, 1 - E + 5e-10) == 1.0
    with pytest.raises(InfeasibleObservation) as info:
        estimate_nu(1.0, 0.7)
    assert info.value.interval == pytest.approx((E, 1 - E))


def test_calibrate_examples():
    a, nu = calibrate(Observation(0.3679, 0.4228))
    assert a == pytest.approx(1.0, abs=1e-3) and nu == pytest.approx(0.15, abs=2e-3)
    a, nu = calibrate(Observation(0.5, 0.38167))
    assert a == pytest.approx(math.log(2)) and nu == pytest.approx(0.15, abs=1e-4)
    with pytest.raises(InfeasibleObservation):
        Observation(0.5, 0.9)
    assert implied_immunity(0.15, 1000) == 150


@pytest.mark.parametrize("alpha", [0.3, 0.693, 1.0, 2.0])
@pytest.mark.parametrize("nu", [0.0, 0.1, 0.15, 0.5, 1.0])
def test_round_trip_grid(alpha, nu):
    assert estimate_nu(alpha, pi1_limit(alpha, nu)) == pytest.approx(nu, abs=1e-8)


@given(st.floats(0.05, 5.0), st.floats(0.0, 1.0))
def test_round_trip_property(alpha, nu):
    target = pi1_limit(alpha, nu)
    got = estimate_nu(alpha, target)
    assert abs(pi1_limit(alpha, got) - target) <= 1e-12


@given(st.floats(0.01, 20.0))
def test_alpha_inverse(alpha):
    assert estimate_alpha(math.exp(-alpha)) == pytest.approx(alpha, abs=1e-12)


@given(st.floats(0.05, 5.0), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_pi1_monotone_in_nu(alpha, a, b):
    lo, hi = sorted((a, b))
    assert pi1_limit(alpha, lo) <= pi1_limit(alpha, hi) + 1e-15


def test_forward_reproduces_observations():
    obs = Observation(math.exp(-1.4), pi1_limit(1.4, 0.27))
    a, nu = calibrate(obs)
    assert math.exp(-a) == pytest.approx(obs.frac_noninfected, abs=1e-10)
    assert pi1_limit(a, nu) == pytest.approx(obs.frac_once, abs=1e-10)
    lo, hi = feasible_interval(a)
    assert lo == pytest.approx(a * math.exp(-a)) and hi == pytest.approx(1 - math.exp(-a))
    assert MAX_ITER == 200
