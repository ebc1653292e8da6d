"""Parameter containers and the exact/float scalar abstraction.

Every computation in the package runs in one of two numeric modes:

* ``"exact"`` -- scalars are :class:`fractions.Fraction`, identities hold as
  rational equalities;
* ``"float"`` -- scalars are Python floats.

The mode travels with the parameter objects, so a function never has to be
told twice which arithmetic to use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Union

Scalar = Union[Fraction, float]

EXACT = "exact"
FLOAT = "float"
MODES = (EXACT, FLOAT)


class DomainError(ValueError):
    """An argument lies outside the domain of the requested formula."""


class ResourceError(RuntimeError):
    """The requested computation exceeds a configured size cap."""


def parse_scalar(value, mode: str | None = None) -> Scalar:
    """Coerce ``value`` (number or ``"p/q"``/decimal string) to a mode scalar.

    With ``mode=None`` the mode is inferred: ``Fraction``/``int`` inputs and
    ``"p/q"`` strings give exact scalars, everything else gives floats.
    """
    if mode is None:
        mode = infer_mode(value)
    if mode not in MODES:
        raise DomainError(f"unknown numeric mode {mode!r}")
    if mode == EXACT:
        if isinstance(value, float):
            # decimal repr, not the binary expansion: 0.001 -> 1/1000
            return Fraction(repr(value))
        if isinstance(value, str):
            return Fraction(value.strip())
        return Fraction(value)
    if isinstance(value, str):
        return float(Fraction(value.strip()))
    return float(value)


def infer_mode(value) -> str:
    if isinstance(value, (Fraction, int)) and not isinstance(value, bool):
        return EXACT
    if isinstance(value, str) and "/" in value:
        return EXACT
    return FLOAT


def mode_of(x) -> str:
    return EXACT if isinstance(x, Rational) else FLOAT


def one(mode: str) -> Scalar:
    return Fraction(1) if mode == EXACT else 1.0


def zero(mode: str) -> Scalar:
    return Fraction(0) if mode == EXACT else 0.0


def comb(n: int, k: int) -> int:
    """Binomial coefficient, zero outside ``0 <= k <= n``."""
    if k < 0 or n < 0 or k > n:
        return 0
    return math.comb(n, k)


def _log_int(c: int) -> float:
    # math.log is accurate for arbitrarily large ints
    return math.log(c)


def weighted_term(c: int, beta: Scalar, r: int, e: int) -> Scalar:
    """Return ``c * beta**r * (1 - beta)**e`` in the mode of ``beta``.

    Float mode evaluates in log space so that huge binomials times tiny
    powers neither overflow nor underflow prematurely.
    """
    if isinstance(beta, Fraction):
        if c == 0:
            return Fraction(0)
        return c * beta**r * (1 - beta) ** e
    if c == 0:
        return 0.0
    if beta == 0.0:
        return float(c) if r == 0 else 0.0
    if beta == 1.0:
        return float(c) if e == 0 else 0.0
    return math.exp(_log_int(c) + r * math.log(beta) + e * math.log1p(-beta))


def log_comb(n: int, k: int) -> float:
    """``log C(n, k)``; exact-integer route for small ``k``, log-gamma otherwise."""
    k = min(k, n - k)
    if k <= 32:
        return math.log(math.comb(n, k))
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def binom_term(n: int, k: int, beta: Scalar, r: int, e: int) -> Scalar:
    """``C(n, k) * beta**r * (1 - beta)**e`` without forming huge binomials in float mode."""
    if k < 0 or n < 0 or k > n:
        return Fraction(0) if isinstance(beta, Fraction) else 0.0
    if isinstance(beta, Fraction):
        return weighted_term(math.comb(n, k), beta, r, e)
    if beta == 0.0 or beta == 1.0:
        return weighted_term(math.comb(n, k), beta, r, e)
    return math.exp(log_comb(n, k) + r * math.log(beta) + e * math.log1p(-beta))


def xpow(beta: Scalar, e: int) -> Scalar:
    """``(1 - beta)**e``; float mode goes through ``log1p`` for accuracy."""
    if isinstance(beta, Fraction):
        return (1 - beta) ** e
    if e == 0:
        return 1.0
    if beta == 1.0:
        return 0.0
    return math.exp(e * math.log1p(-beta))


@dataclass(frozen=True)
class LatticeParams:
    """Discrete model: ``n_days`` (N), ``immunity`` (L), daily exposure ``beta``."""

    n_days: int
    immunity: int
    beta: Scalar
    mode: str = ""

    def __post_init__(self):
        mode = self.mode or infer_mode(self.beta)
        beta = parse_scalar(self.beta, mode)
        object.__setattr__(self, "mode", mode)
        object.__setattr__(self, "beta", beta)
        if int(self.n_days) != self.n_days or self.n_days < 1:
            raise DomainError(f"n_days must be a positive integer, got {self.n_days!r}")
        if int(self.immunity) != self.immunity or self.immunity < 0:
            raise DomainError(f"immunity must be a non-negative integer, got {self.immunity!r}")
        object.__setattr__(self, "n_days", int(self.n_days))
        object.__setattr__(self, "immunity", int(self.immunity))
        if not 0 <= beta <= 1:
            raise DomainError(f"beta must lie in [0, 1], got {beta}")

    @property
    def exact(self) -> bool:
        return self.mode == EXACT

    def with_n(self, n: int) -> "LatticeParams":
        return LatticeParams(n, self.immunity, self.beta, self.mode)

    def as_dict(self) -> dict:
        return {"n": self.n_days, "l": self.immunity, "beta": str(self.beta), "mode": self.mode}


@dataclass(frozen=True)
class ContinuousParams:
    """Limit model: ``alpha`` = N*beta and ``nu`` = lim L/N."""

    alpha: float
    nu: Union[float, Fraction]

    def __post_init__(self):
        if not self.alpha > 0:
            raise DomainError(f"alpha must be positive, got {self.alpha}")
        if not 0 <= self.nu <= 1:
            raise DomainError(f"nu must lie in [0, 1], got {self.nu}")
        object.__setattr__(self, "alpha", float(self.alpha))
