"""Distance between the lattice law and its continuous limit as N doubles."""

import argparse
import csv
import sys

from truncpoisson import ContinuousParams, LatticeParams, limit_pmf_term, pmf_direct


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha", type=float, default=1.0)
    ap.add_argument("--nu", type=float, default=0.15)
    ap.add_argument("--sizes", type=int, nargs="+", default=[1000, 2000, 4000, 8000, 16000])
    ap.add_argument("--rmax", type=int, default=3)
    args = ap.parse_args()

    cp = ContinuousParams(args.alpha, args.nu)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["n", "l"] + [f"err_r{r}" for r in range(args.rmax + 1)])
    for n in args.sizes:
        p = LatticeParams(n, round(args.nu * n), args.alpha / n)
        errs = [abs(pmf_direct(p, r) - limit_pmf_term(cp, r)) for r in range(args.rmax + 1)]
        w.writerow([n, p.immunity] + [f"{e:.3e}" for e in errs])


if __name__ == "__main__":
    main()
