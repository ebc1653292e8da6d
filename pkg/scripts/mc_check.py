"""Monte Carlo check of the lattice law, with timing for several worker counts."""

import argparse
import time

from truncpoisson import LatticeParams, SimConfig, compare, full_pmf, simulate


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--l", type=int, default=150)
    ap.add_argument("--beta", type=float, default=0.001)
    ap.add_argument("--trials", type=int, default=10**6)
    ap.add_argument("--seed", type=int, default=12345)
    ap.add_argument("--workers", type=int, nargs="+", default=[1, 4])
    args = ap.parse_args()

    params = LatticeParams(args.n, args.l, args.beta)
    exact = full_pmf(params)
    hists = []
    for w in args.workers:
        t0 = time.perf_counter()
        rep = simulate(params, SimConfig(args.trials, args.seed, w))
        hists.append(rep.histogram)
        print(f"workers={w}: {time.perf_counter() - t0:.2f}s")
    verdict = compare(rep, exact, "stat")
    print(f"{'r':>3} {'exact':>10} {'empirical':>10} {'z':>7}")
    for b in verdict.bins:
        z = "" if b.z is None else f"{b.z:7.2f}"
        print(f"{b.key[0]:>3} {b.expected:10.6f} {b.observed:10.6f} {z:>7}{'  *' if b.flagged else ''}")
    print(f"chi2={verdict.chi2:.2f} dof={verdict.dof} p={verdict.p_value:.3f}")
    print("verdict:", "pass" if verdict.passed else "fail")
    print("worker-invariant:", all(h == hists[0] for h in hists))


if __name__ == "__main__":
    main()
