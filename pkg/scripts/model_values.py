"""Tabulate classical, lattice and limit laws side by side for alpha = 1 and log 2."""

import argparse
import json
import math
from pathlib import Path

from truncpoisson import ContinuousParams, LatticeParams, full_limit_pmf, full_pmf, poisson_pmf


def table(alpha: float, n: int, nu: float, rows: int) -> list[dict]:
    lattice = full_pmf(LatticeParams(n, round(nu * n), alpha / n))
    limit = full_limit_pmf(ContinuousParams(alpha, nu))
    out = []
    for r in range(rows):
        out.append({
            "r": r,
            "poisson": poisson_pmf(alpha, r),
            "lattice": lattice[r] if r < len(lattice) else 0.0,
            "limit": limit[r] if r < len(limit) else 0.0,
        })
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--nu", type=float, default=0.15)
    ap.add_argument("--rows", type=int, default=6)
    ap.add_argument("--out", default="reports/model_values.json")
    args = ap.parse_args()

    result = {}
    for name, alpha in (("alpha=1", 1.0), ("alpha=log2", math.log(2))):
        rows = table(alpha, args.n, args.nu, args.rows)
        result[name] = rows
        print(f"{name}  (N={args.n}, L={round(args.nu * args.n)})")
        print(f"{'r':>3} {'poisson':>10} {'lattice':>10} {'limit':>10}")
        for row in rows:
            print(f"{row['r']:>3} {row['poisson']:10.5f} {row['lattice']:10.5f} {row['limit']:10.5f}")
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    Path(args.out).write_text(json.dumps(result, indent=2) + "\n")


if __name__ == "__main__":
    main()
