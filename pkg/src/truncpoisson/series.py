"""Truncated power series in ``t`` with polynomial coefficients in a marker ``u``.

The coefficient of ``t^N u^r`` of the bivariate generating function is
``pi_r(N, L)``; expanding the rational closed form and reading coefficients
gives two further routes to the distribution (:func:`pmf_from_gf` and
:func:`pmf_telescoped`), independent of the sums in :mod:`truncpoisson.core`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import zip_longest
from typing import Sequence

from .core import support_max
from .params import DomainError, LatticeParams, Scalar


class UPoly:
    """Polynomial in ``u`` with trailing zeros stripped, truncated at ``cap``.

    ``cap=None`` means no truncation.  Products are reduced modulo
    ``u^(cap+1)``, which is a ring homomorphism, so truncating early never
    changes the surviving coefficients.
    """

    __slots__ = ("coeffs", "cap")

    def __init__(self, coeffs: Sequence = (), cap: int | None = None):
        c = list(coeffs)
        if cap is not None:
            del c[cap + 1 :]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)
        self.cap = cap

    @classmethod
    def const(cls, value, cap=None):
        return cls((value,), cap)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, k):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def _cap(self, other):
        caps = [c for c in (self.cap, getattr(other, "cap", None)) if c is not None]
        return min(caps) if caps else None

    def __add__(self, other):
        if not isinstance(other, UPoly):
            other = UPoly.const(other)
        c = [a + b for a, b in zip_longest(self.coeffs, other.coeffs, fillvalue=0)]
        return UPoly(c, self._cap(other))

    __radd__ = __add__

    def __neg__(self):
        return UPoly([-a for a in self.coeffs], self.cap)

    def __sub__(self, other):
        return self + (-other if isinstance(other, UPoly) else UPoly.const(-other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, UPoly):
            return UPoly([a * other for a in self.coeffs], self.cap)
        cap = self._cap(other)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return UPoly((), cap)
        if len(b) == 1:
            return UPoly([x * b[0] for x in a], cap)
        if len(a) == 1:
            return UPoly([a[0] * y for y in b], cap)
        top = len(a) + len(b) - 2
        if cap is not None:
            top = min(top, cap)
        out = [0] * (top + 1)
        for i, x in enumerate(a):
            if x == 0 or i > top:
                continue
            for j, y in enumerate(b[: top - i + 1]):
                out[i + j] += x * y
        return UPoly(out, cap)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, UPoly):
            other = UPoly.const(other)
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __call__(self, u):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * u + c
        return acc

    def __repr__(self):
        return f"UPoly({list(self.coeffs)!r})"


def _as_upoly(x, cap=None) -> UPoly:
    return x if isinstance(x, UPoly) else UPoly.const(x, cap)


@dataclass(frozen=True)
class TruncatedSeries:
    """``sum_{n <= t_order} coeffs[n] t^n``; arithmetic is truncated at ``t_order``."""

    t_order: int
    coeffs: tuple

    def __post_init__(self):
        c = [_as_upoly(x) for x in self.coeffs[: self.t_order + 1]]
        c += [UPoly()] * (self.t_order + 1 - len(c))
        object.__setattr__(self, "coeffs", tuple(c))

    def __getitem__(self, n) -> UPoly:
        return self.coeffs[n]

    def __len__(self):
        return len(self.coeffs)

    def _order(self, other):
        return min(self.t_order, other.t_order)

    def __add__(self, other):
        n = self._order(other)
        return TruncatedSeries(n, tuple(self[i] + other[i] for i in range(n + 1)))

    def __sub__(self, other):
        n = self._order(other)
        return TruncatedSeries(n, tuple(self[i] - other[i] for i in range(n + 1)))

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            return TruncatedSeries(self.t_order, tuple(c * other for c in self.coeffs))
        n = self._order(other)
        out = [UPoly()] * (n + 1)
        for i in range(n + 1):
            a = self[i]
            if a == 0:
                continue
            for j in range(n + 1 - i):
                b = other[j]
                if b == 0:
                    continue
                out[i + j] = out[i + j] + a * b
        return TruncatedSeries(n, tuple(out))

    def reciprocal(self) -> "TruncatedSeries":
        """Inverse of a series with constant term exactly 1."""
        one_ = TruncatedSeries(self.t_order, (UPoly.const(_unit_of(self[0])),))
        return _divide(one_.coeffs, self.coeffs, self.t_order)

    def truncate(self, n: int) -> "TruncatedSeries":
        return TruncatedSeries(n, self.coeffs[: n + 1])

    def __eq__(self, other):
        return self.t_order == other.t_order and self.coeffs == other.coeffs


def _unit_of(c: UPoly):
    if c.coeffs and len(c.coeffs) == 1 and c.coeffs[0] == 1:
        return c.coeffs[0]
    raise DomainError(f"series constant term must be exactly 1, got {c!r}")


def _divide(num: Sequence[UPoly], den: Sequence[UPoly], order: int) -> TruncatedSeries:
    """``num / den`` by the incremental convolution ``c_n = num_n - sum d_k c_{n-k}``."""
    _unit_of(den[0])
    sparse_den = [(k, d) for k, d in enumerate(den) if k > 0 and d != 0]
    out: list[UPoly] = []
    for n in range(order + 1):
        c = num[n] if n < len(num) else UPoly()
        for k, d in sparse_den:
            if k > n:
                break
            prev = out[n - k]
            if prev.coeffs:
                c = c - d * prev
        out.append(c)
    return TruncatedSeries(order, tuple(out))


@dataclass(frozen=True)
class RationalGF:
    """``numerator(t) / denominator(t)``; both are coefficient lists of ``UPoly``."""

    numerator: tuple
    denominator: tuple

    def __post_init__(self):
        object.__setattr__(self, "numerator", tuple(_as_upoly(c) for c in self.numerator))
        object.__setattr__(self, "denominator", tuple(_as_upoly(c) for c in self.denominator))
        if not self.denominator:
            raise DomainError("empty denominator")
        _unit_of(self.denominator[0])


def poly_mul(a: Sequence[UPoly], b: Sequence[UPoly]) -> tuple:
    """Product of two polynomials in ``t`` (full, no truncation in ``t``)."""
    out = [UPoly()] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            if y == 0:
                continue
            out[i + j] = out[i + j] + x * y
    return tuple(out)


def series_of_rational(gf: RationalGF, t_order: int) -> TruncatedSeries:
    if t_order < 0:
        raise DomainError("t_order must be non-negative")
    return _divide(gf.numerator, gf.denominator, t_order)


def _scalars(params: LatticeParams):
    beta = params.beta
    return beta, 1 - beta, (Fraction(1) if params.exact else 1.0)


def gf_closed(params: LatticeParams, u_cap: int | None = None) -> RationalGF:
    """``(1 - t + beta u t (1 - t^L)) / ((1 - t)(1 - (1-beta) t - beta u t^(L+1)))``.

    Also valid for ``L = 0``, where it reduces to the binomial generating function.
    """
    L = params.immunity
    beta, x, one_ = _scalars(params)
    cap = support_max(params.n_days, L) if u_cap is None else u_cap
    bu = UPoly((0, beta), cap)
    num = [UPoly()] * (L + 2)
    num[0] = UPoly.const(one_, cap)
    num[1] = UPoly.const(-one_, cap) + bu
    num[L + 1] = num[L + 1] - bu
    tiling = [UPoly()] * (L + 2)
    tiling[0] = UPoly.const(one_, cap)
    tiling[1] = UPoly.const(-x, cap)
    tiling[L + 1] = tiling[L + 1] - bu
    den = poly_mul((UPoly.const(one_, cap), UPoly.const(-one_, cap)), tiling)
    return RationalGF(tuple(num), den)


def tiling_gf(params: LatticeParams, u_cap: int | None = None, weights=None) -> RationalGF:
    """``1 / (1 - a t - b u t^(L+1))``; ``weights=(a, b)`` defaults to ``(1-beta, beta)``."""
    L = params.immunity
    beta, x, one_ = _scalars(params)
    a, b = (x, beta) if weights is None else weights
    den = [UPoly()] * (L + 2)
    den[0] = UPoly.const(one_, u_cap)
    den[1] = UPoly.const(-a, u_cap)
    den[L + 1] = den[L + 1] - UPoly((0, b), u_cap)
    return RationalGF((UPoly.const(one_, u_cap),), tuple(den))


def tiling_recurrence(params: LatticeParams, n_max: int, weights=None) -> list[UPoly]:
    """Weighted monomino / (L+1)-mino tiling polynomials ``G0_0 .. G0_{n_max}``.

    ``G0_N = a G0_{N-1} + b u G0_{N-L-1}`` with ``G0_0 = 1`` and ``G0_{<0} = 0``;
    the defaults ``a = 1-beta, b = beta`` give the weighted tilings.
    """
    if n_max < 0:
        raise DomainError("n_max must be non-negative")
    L = params.immunity
    beta, x, one_ = _scalars(params)
    a, b = (x, beta) if weights is None else weights
    bu = UPoly((0, b))
    out = [UPoly.const(one_)]
    for n in range(1, n_max + 1):
        g = out[n - 1] * a
        if n - L - 1 >= 0:
            g = g + bu * out[n - L - 1]
        out.append(g)
    return out


def _bucket(n: int) -> int:
    # shared expansion orders so that repeated queries hit the cache
    order = 16
    while order < n:
        order *= 2
    return order


@lru_cache(maxsize=256)
def _gf_expansion(L: int, beta, mode: str, order: int) -> TruncatedSeries:
    p = LatticeParams(order, L, beta, mode)
    return series_of_rational(gf_closed(p), order)


def pmf_from_gf(params: LatticeParams, n: int | None = None, r: int = 0) -> Scalar:
    """Coefficient of ``t^n u^r`` in the expanded closed-form generating function."""
    n = params.n_days if n is None else n
    if n < 0 or r < 0:
        raise DomainError("n and r must be non-negative")
    order = _bucket(n)
    cap = support_max(order, params.immunity)
    if r > cap:
        raise DomainError(f"r={r} exceeds the u-cap {cap} of the expansion")
    series = _gf_expansion(params.immunity, params.beta, params.mode, order)
    value = series[n][r]
    return value if value != 0 else (Fraction(0) if params.exact else 0.0)


def tail_gf(params: LatticeParams, r: int) -> RationalGF:
    """``beta^r t^((L+1) r - L) / ((1 - t)(1 - (1-beta) t)^r)``; ``r = 0`` gives ``1/(1-t)``."""
    L = params.immunity
    beta, x, one_ = _scalars(params)
    one_minus_t = (UPoly.const(one_, 0), UPoly.const(-one_, 0))
    if r == 0:
        return RationalGF((UPoly.const(one_, 0),), one_minus_t)
    den = one_minus_t
    for _ in range(r):
        den = poly_mul(den, (UPoly.const(one_, 0), UPoly.const(-x, 0)))
    shift = (L + 1) * r - L
    num = [UPoly()] * shift + [UPoly.const(beta**r, 0)]
    return RationalGF(tuple(num), den)


@lru_cache(maxsize=4096)
def _tail_expansion(L: int, beta, mode: str, r: int, order: int) -> TruncatedSeries:
    return series_of_rational(tail_gf(LatticeParams(1, L, beta, mode), r), order)


def tail_probability(params: LatticeParams, n: int, r: int) -> Scalar:
    """``P(at least r infections in n days)`` read off the telescoping series."""
    value = _tail_expansion(params.immunity, params.beta, params.mode, r, _bucket(n))[n][0]
    return value if value != 0 else (Fraction(0) if params.exact else 0.0)


def pmf_telescoped(params: LatticeParams, n: int | None = None, r: int = 0) -> Scalar:
    """Coefficient of ``t^n`` in ``Pi_r - Pi_{r+1}``."""
    n = params.n_days if n is None else n
    if n < 0 or r < 0:
        raise DomainError("n and r must be non-negative")
    if (params.immunity + 1) * (r + 1) - params.immunity > n:
        # Pi_{r+1} starts beyond t^n
        return tail_probability(params, n, r)
    return tail_probability(params, n, r) - tail_probability(params, n, r + 1)


__all__ = [
    "RationalGF",
    "TruncatedSeries",
    "UPoly",
    "gf_closed",
    "pmf_from_gf",
    "pmf_telescoped",
    "poly_mul",
    "series_of_rational",
    "tail_gf",
    "tail_probability",
    "tiling_gf",
    "tiling_recurrence",
]
