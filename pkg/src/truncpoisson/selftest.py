"""Identity suites run by ``truncpoisson selftest``."""

from __future__ import annotations

import time
from fractions import Fraction

from .core import (
    METHODS,
    classical_pmf,
    full_limit_pmf,
    full_pmf,
    pmf_direct,
    support_max,
)
from .params import ContinuousParams, LatticeParams

BETAS = (Fraction(1, 7), Fraction(1, 3), Fraction(9, 10))
IMMUNITIES = (0, 1, 2, 3, 5, 11)


def _grid(max_n):
    for L in IMMUNITIES:
        for b in BETAS:
            for n in range(1, max_n + 1):
                yield LatticeParams(n, L, b)


def suite_normalization(max_n):
    bad = [p for p in _grid(max_n) if full_pmf(p).total() != 1]
    return not bad, f"{len(bad)} grid points fail exact normalization"


def suite_methods(max_n):
    bad = []
    for p in _grid(max_n):
        ref = full_pmf(p).probs
        for m in METHODS[1:]:
            if full_pmf(p, m).probs != ref:
                bad.append((p.n_days, p.immunity, str(p.beta), m))
    return not bad, f"{len(bad)} (point, method) pairs disagree" + (f": {bad[:3]}" if bad else "")


def suite_degenerate(max_n):
    bad = 0
    for b in BETAS:
        for n in range(1, max_n + 1):
            p0 = LatticeParams(n, 0, b)
            bad += any(pmf_direct(p0, r) != classical_pmf(p0, r) for r in range(n + 1))
            big = LatticeParams(n, n + 1, b)
            bad += pmf_direct(big, 1) != 1 - (1 - b) ** n or support_max(n, n + 1) != 1
    return bad == 0, f"{bad} degenerate-case failures"


def suite_limit():
    worst = 0.0
    for a in (0.25, 0.693, 1.0, 2.0):
        for nu in (0.1, 0.15, Fraction(1, 3), 0.5, 1.0):
            worst = max(worst, abs(full_limit_pmf(ContinuousParams(a, nu)).total() - 1))
    return worst <= 1e-12, f"max |sum - 1| = {worst:.3g}"


def suite_oracle(max_n):
    from .oracles import enumerate_exact

    bad = [p for p in _grid(min(max_n, 12)) if enumerate_exact(p).probs != full_pmf(p).probs]
    return not bad, f"{len(bad)} grid points disagree with enumeration"


def run(max_n=20, oracle=False, quick=False):
    plan = [("normalization", lambda: suite_normalization(max_n)), ("limit-normalization", suite_limit)]
    if not quick:
        plan += [("cross-method", lambda: suite_methods(max_n)), ("degenerate", lambda: suite_degenerate(max_n))]
        if oracle:
            plan.append(("oracle-enumeration", lambda: suite_oracle(max_n)))
    results = []
    for name, fn in plan:
        t0 = time.perf_counter()
        ok, detail = fn()
        results.append({"suite": name, "passed": bool(ok), "detail": detail,
                        "seconds": round(time.perf_counter() - t0, 3)})
    return results

