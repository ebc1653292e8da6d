"""Command-line front end.

Data goes to stdout (or ``--output``), diagnostics to stderr.  Exit codes:
0 success, 1 an internal check failed, 2 usage error, 3 infeasible or
out-of-domain parameters, 4 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction

from . import selftest
from .calibration import InfeasibleObservation, Observation, calibrate, implied_immunity
from .core import METHODS, full_limit_pmf, full_pmf, limit_support, support_max
from .multistrain import StrainSet, dominance_report, multi_pmf
from .oracles import SimConfig, compare, simulate
from .params import EXACT, FLOAT, MODES, ContinuousParams, DomainError, LatticeParams, ResourceError

MODE_ENV = "TRUNCPOISSON_MODE"

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_DOMAIN, EXIT_RESOURCE = 0, 1, 2, 3, 4

FLOAT_SUM_TOL = 1e-9


def render_prob(p):
    if isinstance(p, Fraction):
        return str(p)
    return float(format(float(p), ".15g"))


def resolve_mode(requested, *literals) -> str:
    if requested:
        return requested
    if any(isinstance(v, str) and "/" in v for v in literals):
        return EXACT
    env = os.environ.get(MODE_ENV, "").strip().lower()
    if env in MODES:
        return env
    return FLOAT


def _sum_ok(total, mode) -> bool:
    if mode == EXACT:
        return total == 1
    return abs(total - 1) <= FLOAT_SUM_TOL


def _document(params, method, mode, rows, total, diagnostics):
    return {
        "params": params,
        "method": method,
        "mode": mode,
        "rows": rows,
        "sum": None if total is None else render_prob(total),
        "diagnostics": diagnostics,
    }


def _render(doc, fmt, columns=None) -> str:
    if fmt == "json":
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    rows = doc["rows"]
    columns = columns or (list(rows[0].keys()) if rows else ["r", "p"])
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_csv_cell(row.get(c)) for c in columns])
    return buf.getvalue()


def _csv_cell(v):
    if isinstance(v, (list, tuple)):
        return ";".join(str(x) for x in v)
    if isinstance(v, float):
        return repr(v)
    return "" if v is None else str(v)


def _emit(text: str, output):
    if output:
        with open(output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_strain(text: str):
    try:
        beta, length = text.split(":")
        return beta.strip(), int(length)
    except ValueError:
        raise argparse.ArgumentTypeError(f"strain must look like BETA:L, got {text!r}") from None


# -- subcommands ---------------------------------------------------------------


def cmd_pmf(args):
    mode = resolve_mode(args.mode, args.beta)
    params = LatticeParams(args.n, args.l, args.beta, mode)
    pmf = full_pmf(params, args.method)
    total = pmf.total()
    rows = [{"r": r, "p": render_prob(p)} for r, p in enumerate(pmf.probs)]
    diag = {
        "support_max": support_max(params.n_days, params.immunity),
        "fallbacks": [list(f) for f in pmf.fallbacks],
        "sum_check": _sum_ok(total, mode),
    }
    doc = _document(params.as_dict(), args.method, mode, rows, total, diag)
    return doc, diag["sum_check"]


def _parse_nu(text: str):
    return Fraction(text) if "/" in text else float(text)


def cmd_limit(args):
    nu = _parse_nu(args.nu)
    cp = ContinuousParams(args.alpha, nu)
    pmf = full_limit_pmf(cp)
    total = pmf.total()
    if nu == 0:
        diag = {"r_flat": None, "r_sharp": None, "unbounded": True}
    else:
        r_flat, r_sharp = limit_support(nu)
        diag = {"r_flat": r_flat, "r_sharp": r_sharp, "unbounded": False}
    ok = abs(total - 1) <= 1e-12
    diag["sum_check"] = ok
    rows = [{"r": r, "p": render_prob(p)} for r, p in enumerate(pmf.probs)]
    doc = _document({"alpha": cp.alpha, "nu": str(nu)}, pmf.method, FLOAT, rows, total, diag)
    return doc, ok


def _strain_set(args, mode):
    if args.strain:
        return StrainSet(tuple(args.strain), mode)
    if args.l is None or args.beta is None:
        raise DomainError("give --l and --beta, or one or more --strain BETA:L")
    return StrainSet(((args.beta, args.l),), mode)


def cmd_simulate(args):
    ss = _strain_set(args, FLOAT)
    cfg = SimConfig(args.trials, args.seed, args.workers, args.engine)
    report = simulate(ss, cfg, n=args.n)
    if ss.k == 1:
        b, l = ss.strains[0]
        expected = full_pmf(LatticeParams(args.n, l, b, FLOAT))
    else:
        table = multi_pmf(ss, args.n)
        expected = table
    verdict = compare(report, expected, "stat")
    rows = []
    for check in verdict.bins:
        key = check.key
        rows.append({
            "r": key[0] if len(key) == 1 else list(key),
            "p": render_prob(check.observed),
            "expected": render_prob(check.expected),
            "stderr": render_prob((check.expected * (1 - check.expected) / report.trials) ** 0.5),
            "count": report.counts_1d()[key[0]] if len(key) == 1 else report.histogram[key],
            "flagged": check.flagged,
        })
    diag = {
        "trials": report.trials,
        "seed": args.seed,
        "engine": args.engine,
        "verdict": "pass" if verdict.passed else "fail",
        "failed_bins": [list(k) for k in verdict.failed_bins],
        "chi2": render_prob(verdict.chi2),
        "dof": verdict.dof,
        "p_value": render_prob(verdict.p_value),
    }
    params = {"n": args.n, "strains": [[str(b), l] for b, l in ss.strains]}
    total = sum(c.observed for c in verdict.bins)
    doc = _document(params, "simulation", FLOAT, rows, total, diag)
    return doc, verdict.passed


def cmd_fit(args):
    alpha, nu = calibrate(Observation(args.frac0, args.frac1))
    diag = {
        "alpha": render_prob(alpha),
        "nu": render_prob(nu),
        "implied_l": implied_immunity(nu, args.n),
        "n": args.n,
    }
    rows = [{"alpha": diag["alpha"], "nu": diag["nu"], "implied_l": diag["implied_l"]}]
    doc = _document({"frac0": args.frac0, "frac1": args.frac1, "n": args.n}, "calibrate", FLOAT, rows, None, diag)
    return doc, True


def cmd_multi(args):
    mode = resolve_mode(args.mode, *(b for b, _ in args.strain))
    ss = StrainSet(tuple(args.strain), mode)
    table = multi_pmf(ss, args.n)
    total = table.total()
    rows = [{"r": list(k), "p": render_prob(table[k])} for k in table.keys()]
    dom = dominance_report(ss, args.n)
    diag = {
        "shape": list(table.shape),
        "marginals": [[render_prob(p) for p in table.marginal(i)] for i in range(ss.k)],
        "total_count": [render_prob(p) for p in table.total_count()],
        "dominant_strain": dom["dominant"],
        "p_at_least_one": [render_prob(s["p_at_least_one"]) for s in dom["strains"]],
        "sum_check": _sum_ok(total, mode),
    }
    params = {"n": args.n, "strains": [[str(b), l] for b, l in ss.strains], "mode": mode}
    doc = _document(params, "series", mode, rows, total, diag)
    return doc, diag["sum_check"]


def cmd_selftest(args):
    results = selftest.run(max_n=args.max_n, oracle=args.oracle, quick=args.quick)
    ok = all(r["passed"] for r in results)
    for r in results:
        print(f"{'PASS' if r['passed'] else 'FAIL'} {r['suite']}: {r['detail']}", file=sys.stderr)
    rows = [{"suite": r["suite"], "passed": r["passed"], "detail": r["detail"]} for r in results]
    doc = _document({"max_n": args.max_n, "oracle": args.oracle, "quick": args.quick},
                    "selftest", EXACT, rows, None, {"passed": ok})
    return doc, ok


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="truncpoisson", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--output", "-o", default=None, help="write here instead of stdout")

    p = sub.add_parser("pmf", help="lattice distribution of the infection count")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--beta", required=True, help="decimal or p/q")
    p.add_argument("--method", choices=METHODS, default="direct")
    p.add_argument("--mode", choices=MODES, default=None)
    common(p)
    p.set_defaults(func=cmd_pmf)

    p = sub.add_parser("limit", help="continuous-limit distribution")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--nu", required=True, help="decimal or p/q")
    common(p)
    p.set_defaults(func=cmd_limit)

    p = sub.add_parser("simulate", help="Monte Carlo against the exact distribution")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--l", type=int, default=None)
    p.add_argument("--beta", default=None)
    p.add_argument("--strain", type=_parse_strain, action="append", help="BETA:L, repeatable")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--engine", choices=("skip", "daywalk"), default="skip")
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", help="recover alpha and nu from observed fractions")
    p.add_argument("--frac0", type=float, required=True, help="never-infected fraction")
    p.add_argument("--frac1", type=float, required=True, help="once-infected fraction")
    p.add_argument("--n", type=int, default=1000, help="cycle length for the implied immunity")
    common(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("multi", help="joint table for several strains")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--strain", type=_parse_strain, action="append", required=True, help="BETA:L, repeatable")
    p.add_argument("--mode", choices=MODES, default=None)
    common(p)
    p.set_defaults(func=cmd_multi)

    p = sub.add_parser("selftest", help="run the identity suites")
    p.add_argument("--max-n", type=int, default=20)
    p.add_argument("--oracle", action="store_true", help="include exhaustive enumeration")
    p.add_argument("--quick", action="store_true", help="normalization checks only")
    common(p)
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        doc, ok = args.func(args)
    except InfeasibleObservation as exc:
        print(f"infeasible observation: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (DomainError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ResourceError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    _emit(_render(doc, args.format), args.output)
    if not ok:
        print("internal check failed", file=sys.stderr)
        return EXIT_CHECK
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
