"""Several concurrent strains with their own exposure rates and immunity lengths.

Each day has a categorical outcome: no exposure (``beta0``) or an exposure
to strain ``i`` (``beta_i``).  Any infection blocks all strains for that
strain's ``L_i`` days.  The joint law of the per-strain counts is the
coefficient of ``t^N u_1^r_1 ... u_k^r_k`` in

    (1 + sum_i u_i beta_i (t + ... + t^L_i)) / (1 - beta0 t - sum_i u_i beta_i t^(L_i + 1)).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .core import Pmf, support_max
from .params import (
    EXACT,
    DomainError,
    LatticeParams,
    ResourceError,
    Scalar,
    infer_mode,
    mode_of,
    parse_scalar,
    zero,
)

DEFAULT_MAX_WORK = 20_000_000


@dataclass(frozen=True)
class StrainSet:
    """``strains`` is a sequence of ``(beta_i, L_i)`` pairs."""

    strains: tuple
    mode: str = ""

    def __post_init__(self):
        raw = tuple((b, int(l)) for b, l in self.strains)
        if not raw:
            raise DomainError("need at least one strain")
        mode = self.mode or (EXACT if all(infer_mode(b) == EXACT for b, _ in raw) else "float")
        strains = tuple((parse_scalar(b, mode), l) for b, l in raw)
        for b, l in strains:
            if not 0 <= b <= 1:
                raise DomainError(f"strain probability {b} outside [0, 1]")
            if l < 0:
                raise DomainError(f"immunity length must be non-negative, got {l}")
        if sum(b for b, _ in strains) > 1:
            raise DomainError("strain probabilities sum to more than 1")
        object.__setattr__(self, "strains", strains)
        object.__setattr__(self, "mode", mode)

    @classmethod
    def single(cls, params: LatticeParams) -> "StrainSet":
        return cls(((params.beta, params.immunity),), params.mode)

    @property
    def k(self) -> int:
        return len(self.strains)

    @property
    def betas(self) -> tuple:
        return tuple(b for b, _ in self.strains)

    @property
    def immunities(self) -> tuple:
        return tuple(l for _, l in self.strains)

    @property
    def beta0(self) -> Scalar:
        return (Fraction(1) if self.mode == EXACT else 1.0) - sum(self.betas)

    def permuted(self, order: Sequence[int]) -> "StrainSet":
        return StrainSet(tuple(self.strains[i] for i in order), self.mode)

    def axis_bounds(self, n: int) -> tuple:
        return tuple(support_max(n, l) for l in self.immunities)


@dataclass(frozen=True)
class JointPmf:
    """Dense joint table: ``probs[(r_1, .., r_k)]`` for every index in ``shape``."""

    shape: tuple
    probs: dict
    mode: str
    method: str = "series"

    def __getitem__(self, key):
        return self.probs.get(tuple(key), zero(self.mode))

    def keys(self):
        return itertools.product(*(range(s) for s in self.shape))

    def total(self) -> Scalar:
        return sum((self[k] for k in self.keys()), zero(self.mode))

    def marginal(self, axis: int) -> tuple:
        out = [zero(self.mode)] * self.shape[axis]
        for key in self.keys():
            out[key[axis]] += self[key]
        return tuple(out)

    def total_count(self) -> tuple:
        """Distribution of ``r_1 + ... + r_k``."""
        out = [zero(self.mode)] * (sum(s - 1 for s in self.shape) + 1)
        for key in self.keys():
            out[sum(key)] += self[key]
        while len(out) > 1 and out[-1] == 0:
            out.pop()
        return tuple(out)

    def permuted(self, order: Sequence[int]) -> "JointPmf":
        shape = tuple(self.shape[i] for i in order)
        probs = {tuple(k[i] for i in order): v for k, v in self.probs.items()}
        return JointPmf(shape, probs, self.mode, self.method)

    def as_array(self) -> np.ndarray:
        arr = np.empty(self.shape, dtype=object)
        for key in self.keys():
            arr[key] = self[key]
        return arr


class _MPoly:
    """Sparse polynomial in ``u_1..u_k`` capped per axis."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = terms or {}

    def scaled(self, c) -> dict:
        return {e: v * c for e, v in self.terms.items()}

    def add_shifted(self, other: "_MPoly", c, axis: int, bounds: tuple):
        """``self += c * u_axis * other`` (dropping exponents past the bound)."""
        for e, v in other.terms.items():
            if e[axis] + 1 > bounds[axis]:
                continue
            e2 = e[:axis] + (e[axis] + 1,) + e[axis + 1 :]
            self.terms[e2] = self.terms.get(e2, 0) + c * v


def tiling_series(ss: StrainSet, n: int) -> list:
    """``G0_0 .. G0_n`` with ``G0_m = beta0 G0_{m-1} + sum_i beta_i u_i G0_{m - L_i - 1}``."""
    bounds = ss.axis_bounds(max(n, 1))
    one_ = Fraction(1) if ss.mode == EXACT else 1.0
    out = [_MPoly({(0,) * ss.k: one_})]
    b0 = ss.beta0
    for m in range(1, n + 1):
        g = _MPoly(out[m - 1].scaled(b0))
        for i, (b, l) in enumerate(ss.strains):
            if m - l - 1 >= 0 and b != 0:
                g.add_shifted(out[m - l - 1], b, i, bounds)
        out.append(g)
    return out


def multi_pmf(ss: StrainSet, n: int, max_work: int = DEFAULT_MAX_WORK) -> JointPmf:
    """Joint law of the per-strain infection counts after ``n`` days."""
    if n < 0:
        raise DomainError("n must be non-negative")
    bounds = ss.axis_bounds(max(n, 1))
    cells = 1
    for b in bounds:
        cells *= b + 1
    work = cells * (n + 1) * (1 + sum(ss.immunities) + ss.k)
    if work > max_work:
        raise ResourceError(f"joint table needs ~{work} operations (cap {max_work})")
    tiles = tiling_series(ss, n)
    g = _MPoly(dict(tiles[n].terms))
    # boundary numerator: last infection of strain i on day n - j + 1, j = 1..L_i
    for i, (b, l) in enumerate(ss.strains):
        if b == 0:
            continue
        for j in range(1, l + 1):
            if n - j < 0:
                break
            g.add_shifted(tiles[n - j], b, i, bounds)
    shape = tuple(b + 1 for b in bounds)
    probs = {}
    for key in itertools.product(*(range(s) for s in shape)):
        probs[key] = g.terms.get(key, zero(ss.mode))
    return JointPmf(shape, probs, ss.mode)


def total_count_pmf(ss: StrainSet, n: int, r: int, route: str = "table") -> Scalar:
    """``P(r_1 + ... + r_k = r)``.

    ``route="series"`` (two strains, ``r = 1`` only) reads the coefficient of an
    independent closed form for the one-infection generating function.
    """
    if route == "table":
        dist = multi_pmf(ss, n).total_count()
        return dist[r] if r < len(dist) else zero(ss.mode)
    if route == "series":
        if ss.k != 2 or r != 1:
            raise DomainError("series route covers exactly two strains and r = 1")
        return one_infection_series(ss, n)
    raise DomainError(f"unknown route {route!r}")


def one_infection_series(ss: StrainSet, n: int) -> Scalar:
    """Coefficient of ``t^n`` in

        t (b1+b2) (1 - t x - b1 t^(L1+1) - b2 t^(L2+1)) / ((1 - t)(1 - t x)^2),

    ``x = 1 - b1 - b2``, the generating function of exactly one infection.
    """
    from .series import RationalGF, UPoly, poly_mul, series_of_rational

    (b1, l1), (b2, l2) = ss.strains
    one_ = Fraction(1) if ss.mode == EXACT else 1.0
    x = one_ - b1 - b2
    c = lambda v: UPoly.const(v, 0)  # noqa: E731
    inner = [c(0)] * (max(l1, l2) + 2)
    inner[0] = c(one_)
    inner[1] = inner[1] - c(x)
    inner[l1 + 1] = inner[l1 + 1] - c(b1)
    inner[l2 + 1] = inner[l2 + 1] - c(b2)
    num = (c(0),) + tuple(v * (b1 + b2) for v in inner)
    den = (c(one_), c(-one_))
    for _ in range(2):
        den = poly_mul(den, (c(one_), c(-x)))
    series = series_of_rational(RationalGF(num, den), n)
    value = series[n][0]
    return value if value != 0 else zero(ss.mode)


def pi1_two_strain_explicit(n: int, l1: int, l2: int, b1, b2) -> Scalar:
    """Evaluate the explicit one-infection formula for ``L1 <= L2`` term by term.

    The bracket holds ``L2 + 1`` powers of ``x = 1 - b1 - b2``:

        (n - L2)(1 - b1),
        x^j (1 - (n - L2 + j) b1)   for j = 1 .. L2 - L1 - 1,
        x^j                         for j = L2 - L1 .. L2,

    (when ``L1 = L2`` the last group starts at ``x^0``),

    times ``x^(n - L2 - 1)`` and ``beta0 = x``.  For ``n <= L2`` only the top
    ``n`` terms (largest powers) are kept.  This is a verification target;
    it is reported against :func:`multi_pmf`, not trusted.
    """
    if l1 > l2:
        raise DomainError("pi1_two_strain_explicit needs L1 <= L2")
    if n < 1:
        raise DomainError("n must be positive")
    mode = EXACT if infer_mode(b1) == EXACT and infer_mode(b2) == EXACT else "float"
    b1, b2 = parse_scalar(b1, mode), parse_scalar(b2, mode)
    x = 1 - b1 - b2
    terms = [(0, (n - l2) * (1 - b1))]
    for j in range(1, l2 - l1):
        terms.append((j, 1 - (n - l2 + j) * b1))
    for j in range(l2 - l1, l2 + 1):
        terms.append((j, 1))
    if n <= l2:
        terms = terms[-n:]
    bracket = sum((c * x**j for j, c in terms), zero(mode))
    return x * x ** (n - l2 - 1) * bracket if x != 0 else zero(mode)


def pi1_reference(n: int, l1: int, l2: int, b1, b2) -> Scalar:
    """``P(exactly one infection)`` for two strains from :func:`multi_pmf`."""
    ss = StrainSet(((b1, l1), (b2, l2)))
    return total_count_pmf(ss, n, 1)


def pi1_comparison_rows(grid: Iterable[tuple]) -> list[dict]:
    """Report the explicit formula against the joint table on ``(n, l1, l2, b1, b2)`` points."""
    rows = []
    for n, l1, l2, b1, b2 in grid:
        ref = pi1_reference(n, l1, l2, b1, b2)
        try:
            val = pi1_two_strain_explicit(n, l1, l2, b1, b2)
        except (DomainError, ZeroDivisionError) as exc:
            rows.append(dict(n=n, l1=l1, l2=l2, b1=str(b1), b2=str(b2), reference=str(ref),
                             explicit=None, match=False, note=str(exc)))
            continue
        # diagnostic reading: prefactor (b1 + b2) in place of beta0 = x
        x = 1 - parse_scalar(b1, mode_of(ref)) - parse_scalar(b2, mode_of(ref))
        rescaled = val * (1 - x) / x if x != 0 else None
        rows.append(
            dict(n=n, l1=l1, l2=l2, b1=str(b1), b2=str(b2), reference=str(ref),
                 explicit=str(val), difference=float(val - ref), match=val == ref,
                 rescaled=None if rescaled is None else str(rescaled),
                 rescaled_match=rescaled == ref)
        )
    return rows


def dominance_report(ss: StrainSet, n: int) -> dict:
    """Per-strain chance of at least one infection and of exactly that single infection."""
    table = multi_pmf(ss, n)
    report = {"n": n, "strains": []}
    for i in range(ss.k):
        marg = table.marginal(i)
        unit = tuple(1 if j == i else 0 for j in range(ss.k))
        report["strains"].append(
            {
                "beta": ss.betas[i],
                "immunity": ss.immunities[i],
                "p_at_least_one": sum(marg[1:], zero(ss.mode)),
                "p_single_only": table[unit] if all(s > u for s, u in zip(table.shape, unit)) else zero(ss.mode),
            }
        )
    scores = [s["p_at_least_one"] for s in report["strains"]]
    report["dominant"] = max(range(ss.k), key=lambda i: scores[i])
    return report


def single_strain_pmf(ss: StrainSet, n: int) -> Pmf:
    """Total-count law as a :class:`Pmf`, for comparison with the one-strain routes."""
    return Pmf(multi_pmf(ss, n).total_count(), "multistrain", ss.mode)
