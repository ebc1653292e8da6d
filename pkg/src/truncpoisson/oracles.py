"""Formula-free sources of truth: exhaustive enumeration and Monte Carlo.

Neither route uses any of the closed forms.  Enumeration walks every daily
outcome sequence and applies the immunity rule day by day; simulation draws
such sequences at random.
"""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Union

import numpy as np
from scipy import stats

from .core import Pmf
from .multistrain import JointPmf, StrainSet
from .params import EXACT, DomainError, LatticeParams, ResourceError

Model = Union[LatticeParams, StrainSet]

DEFAULT_MAX_SEQUENCES = 1 << 16
BLOCK_SIZE = 1 << 16


def _as_strains(model: Model) -> StrainSet:
    if isinstance(model, LatticeParams):
        return StrainSet.single(model)
    return model


def _default_n(model: Model, n):
    if n is not None:
        return n
    if isinstance(model, LatticeParams):
        return model.n_days
    raise DomainError("n is required for a StrainSet")


# -- exhaustive enumeration ----------------------------------------------------


@lru_cache(maxsize=512)
def _count_outcomes(immunities: tuple, n: int) -> Counter:
    """Tally every length-``n`` outcome sequence by (count vector, outcome multiset).

    Outcome 0 is "no exposure", ``i >= 1`` is an exposure to strain ``i``.
    The key ``(r, e)`` gives the per-strain infection counts ``r`` and the
    number of days with each outcome ``e``; the sequence weight is
    ``prod_j beta_j ** e_j`` so the tally is independent of the betas.
    """
    k = len(immunities)
    tally: Counter = Counter()
    r = [0] * k
    e = [0] * (k + 1)

    def walk(day: int, blocked: int):
        if day == n:
            tally[(tuple(r), tuple(e))] += 1
            return
        e[0] += 1
        walk(day + 1, max(blocked - 1, 0))
        e[0] -= 1
        for i in range(k):
            e[i + 1] += 1
            if blocked > 0:
                # exposure inside an immunity window: no infection
                walk(day + 1, blocked - 1)
            else:
                r[i] += 1
                walk(day + 1, immunities[i])
                r[i] -= 1
            e[i + 1] -= 1

    walk(0, 0)
    return tally


def enumerate_exact(model: Model, n: int | None = None, max_sequences: int = DEFAULT_MAX_SEQUENCES):
    """Exact law by brute force over all ``(k+1)^n`` daily outcome sequences.

    Returns a :class:`Pmf` for :class:`LatticeParams` and a :class:`JointPmf`
    for a :class:`StrainSet`.  Only exact (rational) inputs are accepted.
    """
    n = _default_n(model, n)
    ss = _as_strains(model)
    if ss.mode != EXACT:
        raise DomainError("enumeration runs in exact mode only; pass rational probabilities")
    if n < 0:
        raise DomainError("n must be non-negative")
    if (ss.k + 1) ** n > max_sequences:
        raise ResourceError(f"{(ss.k + 1) ** n} sequences exceed the cap {max_sequences}")
    weights = (ss.beta0,) + ss.betas
    table: dict = {}
    for (r, e), count in _count_outcomes(ss.immunities, n).items():
        w = Fraction(count)
        for b, p in zip(weights, e):
            if p:
                w *= b**p
        table[r] = table.get(r, Fraction(0)) + w
    shape = ss.axis_bounds(max(n, 1))
    shape = tuple(s + 1 for s in shape)
    if isinstance(model, LatticeParams):
        probs = [table.get((r,), Fraction(0)) for r in range(shape[0])]
        return Pmf(tuple(probs), "enumeration", EXACT)
    for key, v in table.items():
        if v != 0 and any(a >= s for a, s in zip(key, shape)):
            raise AssertionError(f"count vector {key} outside support {shape}")
    full = {}
    for key in JointPmf(shape, {}, EXACT).keys():
        full[key] = table.get(key, Fraction(0))
    return JointPmf(shape, full, EXACT, "enumeration")


# -- Monte Carlo ---------------------------------------------------------------


@dataclass(frozen=True)
class SimConfig:
    """``trials`` and ``seed`` fix the result; ``workers`` only changes wall time."""

    trials: int
    seed: int = 0
    workers: int = 1
    engine: str = "skip"
    block_size: int = BLOCK_SIZE

    def __post_init__(self):
        if self.trials < 1:
            raise DomainError("trials must be positive")
        if self.workers < 1:
            raise DomainError("workers must be positive")
        if self.engine not in ("skip", "daywalk"):
            raise DomainError(f"unknown engine {self.engine!r}")


@dataclass
class SimReport:
    histogram: dict
    trials: int
    shape: tuple
    config: SimConfig
    stderr: dict = field(default_factory=dict)

    @property
    def empirical(self) -> dict:
        return {key: c / self.trials for key, c in self.histogram.items()}

    def pmf(self) -> Pmf:
        """Empirical law of the total count (one-strain view)."""
        counts = [0] * (sum(s - 1 for s in self.shape) + 1)
        for key, c in self.histogram.items():
            counts[sum(key)] += c
        return Pmf(tuple(c / self.trials for c in counts), "simulation", "float")

    def counts_1d(self) -> list:
        counts = [0] * (sum(s - 1 for s in self.shape) + 1)
        for key, c in self.histogram.items():
            counts[sum(key)] += c
        return counts


def _block_rng(seed: int, block: int) -> np.random.Generator:
    # counter-based: the stream of block b starts at counter b * 2^192
    return np.random.Generator(np.random.Philox(key=seed % (1 << 64), counter=block << 192))


def _simulate_skip(rng, m: int, n: int, betas, immunities):
    """Jump from one infection to the next with geometric waiting times.

    Away from immunity windows every day is an independent trial with success
    probability ``1 - beta0``, so the wait for the next infection is geometric
    and the strain is drawn categorically.
    """
    k = len(betas)
    counts = np.zeros((m, k), dtype=np.int64)
    p_any = float(sum(betas))
    if p_any <= 0.0:
        return counts
    probs = np.asarray(betas, dtype=float) / p_any
    lengths = np.asarray(immunities, dtype=np.int64)
    last = np.zeros(m, dtype=np.int64)  # last blocked day so far
    active = np.arange(m)
    while active.size:
        day = last[active] + rng.geometric(min(p_any, 1.0), size=active.size)
        hit = day <= n
        active, day = active[hit], day[hit]
        if not active.size:
            break
        strain = rng.choice(k, size=active.size, p=probs) if k > 1 else np.zeros(active.size, dtype=np.int64)
        np.add.at(counts, (active, strain), 1)
        last[active] = day + lengths[strain]
    return counts


def _simulate_daywalk(rng, m: int, n: int, betas, immunities):
    """Literal day-by-day walk with a categorical draw per day."""
    k = len(betas)
    counts = np.zeros((m, k), dtype=np.int64)
    edges = np.cumsum(np.asarray(betas, dtype=float))
    lengths = np.asarray(immunities, dtype=np.int64)
    blocked = np.zeros(m, dtype=np.int64)
    rows = np.arange(m)
    for _ in range(n):
        u = rng.random(m)
        strain = np.searchsorted(edges, u, side="right")  # k means no exposure
        infected = (strain < k) & (blocked == 0)
        blocked = np.maximum(blocked - 1, 0)
        if infected.any():
            s = strain[infected]
            np.add.at(counts, (rows[infected], s), 1)
            blocked[infected] = lengths[s]
    return counts


def _run_block(args):
    seed, block, m, n, betas, immunities, engine = args
    rng = _block_rng(seed, block)
    fn = _simulate_skip if engine == "skip" else _simulate_daywalk
    counts = fn(rng, m, n, betas, immunities)
    keys, freq = np.unique(counts, axis=0, return_counts=True)
    return {tuple(int(v) for v in key): int(c) for key, c in zip(keys, freq)}


def simulate(model: Model, cfg: SimConfig, n: int | None = None) -> SimReport:
    n = _default_n(model, n)
    ss = _as_strains(model)
    betas = tuple(float(b) for b in ss.betas)
    immunities = ss.immunities
    nblocks = -(-cfg.trials // cfg.block_size)
    jobs = []
    for b in range(nblocks):
        m = min(cfg.block_size, cfg.trials - b * cfg.block_size)
        jobs.append((cfg.seed, b, m, n, betas, immunities, cfg.engine))
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            parts = list(pool.map(_run_block, jobs))
    else:
        parts = [_run_block(j) for j in jobs]
    hist: Counter = Counter()
    for part in parts:
        hist.update(part)
    shape = tuple(s + 1 for s in ss.axis_bounds(max(n, 1)))
    full = {key: hist.get(key, 0) for key in JointPmf(shape, {}, "float").keys()}
    if sum(full.values()) != cfg.trials:
        raise AssertionError("simulated count vector outside the support bound")
    se = {}
    for key, c in full.items():
        p = c / cfg.trials
        se[key] = math.sqrt(p * (1 - p) / cfg.trials)
    return SimReport(full, cfg.trials, shape, cfg, se)


# -- comparison harness --------------------------------------------------------


@dataclass
class BinCheck:
    key: tuple
    observed: object
    expected: object
    flagged: bool
    z: float | None = None


@dataclass
class Verdict:
    passed: bool
    policy: str
    bins: list
    chi2: float | None = None
    dof: int | None = None
    p_value: float | None = None

    @property
    def failed_bins(self) -> list:
        return [b.key for b in self.bins if b.flagged]


def _flatten(d) -> dict:
    if isinstance(d, Pmf):
        return {(r,): p for r, p in enumerate(d.probs)}
    if isinstance(d, JointPmf):
        return {key: d[key] for key in d.keys()}
    raise DomainError(f"cannot compare object of type {type(d).__name__}")


def compare(observed, expected, policy: str = "exact", z_max: float = 3.0) -> Verdict:
    """Bin-by-bin check of ``observed`` against ``expected``.

    ``"exact"`` requires equality in every bin; ``"stat"`` takes a
    :class:`SimReport` and flags bins more than ``z_max`` standard errors away
    (errors from the expected probability, widened by half a count), also
    reporting a chi-square test.
    """
    exp = _flatten(expected)
    if policy == "exact":
        obs = _flatten(observed)
        if obs.keys() != exp.keys():
            raise DomainError(f"support mismatch: {sorted(obs)} vs {sorted(exp)}")
        bins = [BinCheck(k, obs[k], exp[k], obs[k] != exp[k]) for k in sorted(exp)]
        return Verdict(not any(b.flagged for b in bins), policy, bins)
    if policy != "stat":
        raise DomainError(f"unknown policy {policy!r}")
    if not isinstance(observed, SimReport):
        raise DomainError("statistical comparison needs a SimReport")
    if isinstance(expected, Pmf):
        counts = observed.counts_1d()
        obs_counts = {(r,): counts[r] if r < len(counts) else 0 for r in range(len(expected))}
        extra = sum(counts[len(expected):])
        if extra:
            raise DomainError("simulated counts outside the expected support")
    else:
        obs_counts = dict(observed.histogram)
        if obs_counts.keys() != exp.keys():
            raise DomainError("support mismatch between simulation and expected table")
    trials = observed.trials
    bins, chi2, used = [], 0.0, 0
    for key in sorted(exp):
        p = float(exp[key])
        p_hat = obs_counts[key] / trials
        se = math.sqrt(p * (1 - p) / trials)
        if se == 0:
            z = None
            flagged = p_hat != p
        else:
            z = (p_hat - p) / se
            # half-count continuity correction: bins with E << 1 are discrete
            flagged = abs(p_hat - p) > z_max * se + 0.5 / trials
        bins.append(BinCheck(key, p_hat, p, flagged, z))
        if p > 0:
            chi2 += (obs_counts[key] - trials * p) ** 2 / (trials * p)
            used += 1
    dof = max(used - 1, 1)
    p_value = float(stats.chi2.sf(chi2, dof))
    return Verdict(not any(b.flagged for b in bins), policy, bins, chi2, dof, p_value)
