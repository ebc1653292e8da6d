"""Recover ``(alpha, nu)`` from the fractions of never- and once-infected people."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import limit_pmf_term
from .params import ContinuousParams, DomainError

RESIDUAL_TOL = 1e-12
MAX_ITER = 200
CLAMP_MARGIN = 1e-9


class InfeasibleObservation(DomainError):
    def __init__(self, value, lo, hi, what="once-infected fraction"):
        self.value, self.interval = value, (lo, hi)
        super().__init__(f"{what} {value} outside the feasible interval [{lo}, {hi}]")


@dataclass(frozen=True)
class Observation:
    frac_noninfected: float
    frac_once: float

    def __post_init__(self):
        for name in ("frac_noninfected", "frac_once"):
            v = getattr(self, name)
            if not 0 < v < 1:
                raise DomainError(f"{name} must lie in (0, 1), got {v}")
        if self.frac_noninfected + self.frac_once > 1:
            lo, hi = feasible_interval(estimate_alpha(self.frac_noninfected))
            raise InfeasibleObservation(self.frac_once, lo, hi)


def estimate_alpha(frac_noninfected: float) -> float:
    """``-log`` of the never-infected fraction (it equals ``e^-alpha`` in the limit)."""
    if not 0 < frac_noninfected < 1:
        raise DomainError(f"non-infected fraction must lie in (0, 1), got {frac_noninfected}")
    return -math.log(frac_noninfected)


def pi1_limit(alpha: float, nu: float) -> float:
    return limit_pmf_term(ContinuousParams(alpha, nu), 1)


def feasible_interval(alpha: float) -> tuple[float, float]:
    return pi1_limit(alpha, 0.0), pi1_limit(alpha, 1.0)


def estimate_nu(alpha: float, pi1_observed: float) -> float:
    """Solve ``pi'_1(alpha, nu) = pi1_observed`` for ``nu`` in ``[0, 1]`` by bisection.

    The map is non-decreasing in ``nu`` with a flat tangent at ``nu = 1``, so
    Newton steps are avoided.  Observations within ``CLAMP_MARGIN`` outside
    the range are clamped to the nearest endpoint.
    """
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    lo_val, hi_val = feasible_interval(alpha)
    if pi1_observed < lo_val - CLAMP_MARGIN or pi1_observed > hi_val + CLAMP_MARGIN:
        raise InfeasibleObservation(pi1_observed, lo_val, hi_val)
    if pi1_observed <= lo_val:
        return 0.0
    if pi1_observed >= hi_val:
        return 1.0
    lo, hi = 0.0, 1.0
    best, best_res = lo, abs(lo_val - pi1_observed)
    if abs(hi_val - pi1_observed) < best_res:
        best, best_res = hi, abs(hi_val - pi1_observed)
    for _ in range(MAX_ITER):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        val = pi1_limit(alpha, mid)
        res = abs(val - pi1_observed)
        if res < best_res:
            best, best_res = mid, res
        if val == pi1_observed:
            break
        if val < pi1_observed:
            lo = mid
        else:
            hi = mid
    if best_res > RESIDUAL_TOL:
        raise ArithmeticError(f"bisection stalled with residual {best_res:.3g}")
    return best


def calibrate(obs: Observation) -> tuple[float, float]:
    alpha = estimate_alpha(obs.frac_noninfected)
    return alpha, estimate_nu(alpha, obs.frac_once)


def implied_immunity(nu: float, n_days: int) -> int:
    """Immunity length in days for a cycle of ``n_days`` (rounded)."""
    return round(nu * n_days)
