"""Reinfection-count distributions under a hardcore immunity constraint.

The lattice model: each of ``N`` days carries an independent exposure with
probability ``beta``.  An exposure becomes an infection unless it falls in
the ``L`` days following a previous infection.  The last immunity window may
run past day ``N``.  ``pi_r`` is the probability of exactly ``r`` infections.

Three closed routes to ``pi_r`` live here (``pmf_direct``, ``pmf_closed``,
``pmf_derivative``); the generating-function routes live in
:mod:`truncpoisson.series`.  The continuous limit ``N -> oo`` with
``beta = alpha / N`` and ``L / N -> nu`` is ``limit_pmf_term``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .params import (
    EXACT,
    FLOAT,
    ContinuousParams,
    DomainError,
    LatticeParams,
    ResourceError,
    Scalar,
    comb,
    one,
    binom_term,
    weighted_term,
    xpow,
    zero,
)

METHODS = ("direct", "closed", "derivative", "gf", "telescoped")

# tolerance for deciding that a real 1/nu is an integer
INTEGRAL_TOL = 1e-9
MAX_LIMIT_SUPPORT = 1_000_000


class UnboundedSupport(DomainError):
    """``nu = 0``: the limit is the classical Poisson law with infinite support."""


@dataclass(frozen=True)
class Pmf:
    """Finite PMF over ``r = 0..r_max``.

    ``fallbacks`` records ``(r, used_method, reason)`` for every entry that
    the requested method could not produce itself.
    """

    probs: tuple
    method: str
    mode: str
    fallbacks: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "probs", tuple(self.probs))
        for r, p in enumerate(self.probs):
            if not -1e-15 <= p <= 1 + 1e-12:
                raise DomainError(f"probability at r={r} outside [0, 1]: {p}")

    @property
    def r_max(self) -> int:
        return len(self.probs) - 1

    def __len__(self):
        return len(self.probs)

    def __getitem__(self, r):
        return self.probs[r]

    def __iter__(self):
        return iter(self.probs)

    def total(self) -> Scalar:
        # ascending r; plain sum keeps the order reproducible
        return sum(self.probs, zero(self.mode))

    def mean(self) -> Scalar:
        return sum((r * p for r, p in enumerate(self.probs)), zero(self.mode))


# -- classical laws ----------------------------------------------------------


def classical_pmf(params: LatticeParams, r: int) -> Scalar:
    """Binomial ``C(N, r) beta^r (1 - beta)^(N - r)`` (no immunity)."""
    if r < 0:
        raise DomainError("r must be non-negative")
    n = params.n_days
    if r > n:
        return zero(params.mode)
    return binom_term(n, r, params.beta, r, n - r)


def poisson_pmf(alpha: float, r: int) -> float:
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    if r < 0:
        raise DomainError("r must be non-negative")
    return math.exp(r * math.log(alpha) - alpha - math.lgamma(r + 1))


# -- lattice hardcore law ----------------------------------------------------


def support_max(n: int, l: int) -> int:
    """Largest ``r`` with ``pi_r(N, L)`` possibly nonzero: ``(N+L) // (L+1)``."""
    if n < 1 or l < 0:
        raise DomainError(f"need n >= 1 and l >= 0, got n={n}, l={l}")
    return (n + l) // (l + 1)


def hardcore_term(r: int, n: int, params: LatticeParams) -> Scalar:
    """Probability mass of ``r`` infections whose windows all end by day ``n``.

    ``C(n - L r, r) beta^r (1 - beta)^(n - L r - r)``, zero when ``r < 0`` or
    ``n < L r + r``.
    """
    L = params.immunity
    if r < 0 or n < L * r + r:
        return zero(params.mode)
    return binom_term(n - L * r, r, params.beta, r, n - L * r - r)


def pmf_direct(params: LatticeParams, r: int) -> Scalar:
    """Sum over the day on which the last window is cut by the boundary."""
    if r < 0:
        raise DomainError("r must be non-negative")
    N, L, beta = params.n_days, params.immunity, params.beta
    total = hardcore_term(r, N, params)
    if r == 0:
        return total
    # terms with N - i < (L + 1)(r - 1) vanish
    top = min(L, N - (L + 1) * (r - 1))
    tail = zero(params.mode)
    for i in range(1, top + 1):
        tail += hardcore_term(r - 1, N - i, params)
    return total + beta * tail


def pmf_closed(params: LatticeParams, r: int) -> Scalar:
    """Binomial-sum form ``beta^r sum_s C(s+r-1, r-1) (1-beta)^max(m-L, s)``.

    Here ``m = N - L(r - 1) - r``; the result is zero when ``m < 0``.
    """
    if r < 1:
        raise DomainError("pmf_closed needs r >= 1")
    N, L, beta = params.n_days, params.immunity, params.beta
    m = N - L * (r - 1) - r
    if m < 0:
        return zero(params.mode)
    if params.exact:
        acc = Fraction(0)
        for s in range(m + 1):
            acc += comb(s + r - 1, r - 1) * (1 - beta) ** max(m - L, s)
        return beta**r * acc
    acc = 0.0
    for s in range(m + 1):
        acc += binom_term(s + r - 1, r - 1, beta, r, max(m - L, s))
    return acc


def pmf_derivative(params: LatticeParams, r: int) -> Scalar:
    """Formula whose number of terms depends on ``r`` only, not on ``L``.

    The ``(r-1)``-th derivative of ``X^a (1 - X^L) / (1 - X)`` at
    ``X = 1 - beta`` (``a = N - L r``) is expanded by the Leibniz rule over the
    three factors.  Each derivative of ``1/(1-X)`` contributes ``k!/beta^(k+1)``
    which cancels against the ``beta^r/(r-1)!`` prefactor, leaving
    ``sum_{i+j<=r-1} beta^(i+j) C(a,i) X^(a-i) D_j`` with ``D_0 = 1 - X^L`` and
    ``D_j = -C(L,j) X^(L-j)``.  No division by ``beta`` ever happens.
    """
    N, L, beta = params.n_days, params.immunity, params.beta
    if r < 1:
        raise DomainError("pmf_derivative needs r >= 1")
    if L < 1:
        raise DomainError("pmf_derivative needs L >= 1")
    a = N - L * r
    if a <= 0:
        raise DomainError(f"pmf_derivative needs N - L*r > 0, got {a}")

    if params.exact:
        x = 1 - beta
        one_minus_xl = 1 - x**L
    else:
        one_minus_xl = -math.expm1(L * math.log1p(-beta)) if beta < 1 else 1.0

    def pw(e):
        return xpow(beta, e)

    def bpow(k):
        return beta**k

    total = binom_term(a, r, beta, r, a - r)
    acc = zero(params.mode)
    for i in range(r):
        ci = comb(a, i)
        if ci == 0:
            continue
        fi = ci * pw(a - i)
        for j in range(r - i):
            if j == 0:
                gj = one_minus_xl
            else:
                cj = comb(L, j)
                if cj == 0:
                    break
                gj = -cj * pw(L - j)
            acc += bpow(i + j) * fi * gj
    return total + acc


def pmf_l1_closed(params: LatticeParams, r: int) -> Scalar:
    """``L = 1`` special case: ``beta^r x^(N-2r) (C(N-r+1, r) - beta C(N-r, r-1))``.

    ``x = 1 - beta``.  Valid for ``1 <= r`` and ``2r - 1 <= N``.
    """
    if params.immunity != 1:
        raise DomainError("pmf_l1_closed needs L = 1")
    N, beta = params.n_days, params.beta
    if r < 1:
        raise DomainError("pmf_l1_closed needs r >= 1")
    if 2 * r - 1 > N:
        return zero(params.mode)
    bracket = comb(N - r + 1, r) - beta * comb(N - r, r - 1)
    if N - 2 * r >= 0:
        return beta**r * xpow(beta, N - 2 * r) * bracket
    # N = 2r - 1: the bracket carries the missing factor (1 - beta)
    return beta**r * bracket / (1 - beta)


def _entry(params: LatticeParams, r: int, method: str):
    """Return ``(value, fallback_record_or_None)`` for one PMF entry."""
    if method == "direct":
        return pmf_direct(params, r), None
    if method == "closed":
        if r == 0:
            return pmf_direct(params, 0), (0, "direct", "closed form needs r >= 1")
        return pmf_closed(params, r), None
    if method == "derivative":
        L, N = params.immunity, params.n_days
        if r == 0 or L < 1 or N - L * r <= 0:
            why = "derivative form needs r >= 1, L >= 1, N - L*r > 0"
            return pmf_direct(params, r), (r, "direct", why)
        return pmf_derivative(params, r), None
    from . import series

    if method == "gf":
        return series.pmf_from_gf(params, params.n_days, r), None
    if method == "telescoped":
        return series.pmf_telescoped(params, params.n_days, r), None
    raise DomainError(f"unknown method {method!r}; expected one of {METHODS}")


def full_pmf(params: LatticeParams, method: str = "direct") -> Pmf:
    if method not in METHODS:
        raise DomainError(f"unknown method {method!r}; expected one of {METHODS}")
    probs, fallbacks = [], []
    for r in range(support_max(params.n_days, params.immunity) + 1):
        value, fb = _entry(params, r, method)
        probs.append(value)
        if fb is not None:
            fallbacks.append(fb)
    return Pmf(tuple(probs), method, params.mode, tuple(fallbacks))


# -- continuous limit --------------------------------------------------------


def _inverse_integral(nu) -> int | None:
    """``1/nu`` as an int when it is integral (exactly for rationals)."""
    if isinstance(nu, Fraction):
        inv = 1 / nu
        return int(inv) if inv.denominator == 1 else None
    inv = 1.0 / nu
    if not math.isfinite(inv):
        raise DomainError(f"nu = {nu} is too small for a finite support bound")
    k = round(inv)
    return int(k) if abs(inv - k) < INTEGRAL_TOL else None


def limit_support(nu) -> tuple[int, int]:
    """``(r_flat, r_sharp)``: ``floor(1/nu)`` and ``r_flat + 1``.

    When ``1/nu`` is an integer the last entry ``r_sharp`` carries zero mass,
    so the effective support ends at ``r_flat``.
    """
    if nu == 0:
        raise UnboundedSupport("nu = 0 is the classical Poisson regime (unbounded support)")
    if not 0 < nu <= 1:
        raise DomainError(f"nu must lie in (0, 1], got {nu}")
    k = _inverse_integral(nu)
    r_flat = k if k is not None else math.floor(1 / nu)
    return r_flat, r_flat + 1


def _poisson_cdf_part(alpha: float, nu, r: int, r_flat: int, integral: bool) -> float:
    """``e^{(r nu - 1) alpha} sum_{k<=r} alpha^k (1 - r nu)^k / k!``."""
    if r < 0:
        return 0.0
    if integral and r == r_flat:
        rest = 0.0
    else:
        rest = max(0.0, float(1 - r * nu))
    lam = alpha * rest
    term, acc = 1.0, 1.0
    for k in range(1, r + 1):
        term *= lam / k
        acc += term
    return math.exp(-lam) * acc


def limit_pmf_term(cparams: ContinuousParams, r: int) -> float:
    alpha, nu = cparams.alpha, cparams.nu
    if r < 0:
        raise DomainError("r must be non-negative")
    if nu == 0:
        return poisson_pmf(alpha, r)
    if (r + 2) * float(nu) < 1 - 1e-6:
        # r + 1 < r_flat: neither the boundary nor the integrality rule is involved
        diff = _poisson_cdf_part(alpha, nu, r, -1, False) - _poisson_cdf_part(alpha, nu, r - 1, -1, False)
        return max(diff, 0.0)
    r_flat, r_sharp = limit_support(nu)
    integral = _inverse_integral(nu) is not None
    if r > r_sharp:
        return 0.0
    if r == r_flat + 1:
        return 1.0 - _poisson_cdf_part(alpha, nu, r_flat, r_flat, integral)
    diff = _poisson_cdf_part(alpha, nu, r, r_flat, integral) - _poisson_cdf_part(
        alpha, nu, r - 1, r_flat, integral
    )
    # Q(r) >= Q(r-1) exactly (smaller mean, larger cutoff); negatives are rounding
    return max(diff, 0.0)


def full_limit_pmf(cparams: ContinuousParams, poisson_tail: float = 1e-17) -> Pmf:
    """Limit PMF over ``r = 0..r_sharp``.

    For ``nu = 0`` the Poisson law is returned truncated once the remaining
    tail drops below ``poisson_tail``.
    """
    if cparams.nu == 0:
        probs, cum, r = [], 0.0, 0
        while True:
            p = poisson_pmf(cparams.alpha, r)
            probs.append(p)
            cum += p
            if 1.0 - cum < poisson_tail or (r > cparams.alpha and p < poisson_tail):
                break
            r += 1
        return Pmf(tuple(probs), "poisson-truncated", FLOAT)
    _, r_sharp = limit_support(cparams.nu)
    if r_sharp > MAX_LIMIT_SUPPORT:
        raise ResourceError(f"support of {r_sharp + 1:.3g} entries exceeds {MAX_LIMIT_SUPPORT}")
    probs = tuple(limit_pmf_term(cparams, r) for r in range(r_sharp + 1))
    return Pmf(probs, "limit", FLOAT)


def as_float_pmf(pmf: Pmf) -> Pmf:
    return Pmf(tuple(float(p) for p in pmf), pmf.method, FLOAT, pmf.fallbacks)


def pmf_from_sequence(probs: Sequence, method: str) -> Pmf:
    mode = EXACT if probs and all(isinstance(p, Fraction) for p in probs) else FLOAT
    return Pmf(tuple(probs), method, mode)


__all__ = [
    "METHODS",
    "Pmf",
    "UnboundedSupport",
    "as_float_pmf",
    "classical_pmf",
    "full_limit_pmf",
    "full_pmf",
    "hardcore_term",
    "limit_pmf_term",
    "limit_support",
    "one",
    "pmf_closed",
    "pmf_derivative",
    "pmf_direct",
    "pmf_l1_closed",
    "poisson_pmf",
    "support_max",
]
