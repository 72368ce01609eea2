"""Command line entry point: ``thetaforge <command> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from . import construct, explore, stats, theta
from .ffield import field
from .graph import graph_report
from .io import read_edgelist, write_edgelist, write_json

log = logging.getLogger("thetaforge")


def _report_path(args, default_stem):
    if args.report:
        return Path(args.report)
    if args.output:
        return Path(str(args.output) + ".json")
    return Path(default_stem + ".json")


def _emit(obj, path):
    if path is None or str(path) == "-":
        json.dump(obj, sys.stdout, indent=2, default=str)
        sys.stdout.write("\n")
    else:
        write_json(obj, path)
        log.info("wrote %s", path)


def cmd_generate(args):
    g, system = construct.generate(args.ell, field(args.q), args.dpoly, args.seed,
                                   max_vertices=args.max_vertices)
    out = Path(args.output or f"ram_l{args.ell}_q{args.q}_s{args.seed}.txt")
    write_edgelist(g, out, {"d_poly": system.d_poly})
    system.save(str(out) + ".poly.json")
    report = graph_report(g)
    report.update(expected_edges=args.q ** (args.ell + 1), edgelist=str(out),
                  sidecar=str(out) + ".poly.json")
    _emit(report, _report_path(args, str(out)))
    return 0


def _params(args):
    return construct.ConstructionParams(
        ell=args.ell, t=args.t, n=args.n, T_eff=args.T, d_poly=args.dpoly,
        h=getattr(args, "h", None), m=getattr(args, "m", None), seed=args.seed, q=args.q,
        max_vertices=args.max_vertices, cross_only=args.cross_only,
        count_in_union=not getattr(args, "simple_count", False),
        estimate_seeds=args.estimate_seeds)


def _build(args, fn, stem):
    g, report = fn(_params(args))
    out = Path(args.output or f"{stem}_l{args.ell}_t{args.t}_s{args.seed}.txt")
    write_edgelist(g, out, {"t": args.t})
    report["edgelist"] = str(out)
    if args.verify:
        res = theta.contains_theta(g, args.ell, args.t)
        report["theta_check"] = res.certificate()
    _emit(report, _report_path(args, str(out)))
    return 0


def cmd_build_odd(args):
    return _build(args, construct.build_odd_construction, "odd")


def cmd_build_even(args):
    return _build(args, construct.build_even_construction, "even")


def cmd_verify_theta(args):
    g = read_edgelist(args.input)
    res = theta.contains_theta(g, args.ell, args.t, max_candidates=args.max_candidates,
                               node_budget=args.node_budget, full_maxima=args.full)
    cert = res.certificate()
    cert["input"] = str(args.input)
    _emit(cert, args.output)
    return 0 if res.exact else 2


def cmd_explore(args):
    g = read_edgelist(args.input)
    res = explore.run_certifier(g, args.ell, args.t, root=args.root,
                                max_attempts=args.max_attempts)
    cert = res.certificate
    cert["input"] = str(args.input)
    _emit(cert, args.output)
    return 0


def _parse_grid(specs):
    grid = []
    for spec in specs:
        ell, qs = spec.split(":")
        grid.extend((int(ell), int(q)) for q in qs.split(","))
    return grid


def cmd_stats(args):
    grid = _parse_grid(args.grid or ["2:5,7,11"])
    rows, summary = [], []
    for ell, q in grid:
        if args.experiment == "badpairs":
            T = args.T if args.T is not None else construct.estimate_T(ell, q, args.dpoly)
            res = stats.estimate_bad_pair_expectation(ell, q, args.h, T, args.seeds, args.dpoly)
            rows.extend(res.pop("rows"))
        elif args.experiment == "dichotomy":
            res = stats.dichotomy_scan(ell, q, list(range(args.seeds)), args.T_probe, args.h,
                                       args.dpoly)
            rows.extend(res.pop("rows"))
        else:
            res = stats.moment_scan(ell, q, args.seeds, args.pairs, d_poly=args.dpoly)
            for r, v in res["by_length"].items():
                rows.append({"ell": ell, "q": q, "r": r, **v})
        summary.append(res)
    stats.write_csv(rows, args.csv or f"stats_{args.experiment}.csv")
    _emit(summary, args.output)
    return 0


def run_bench(seed=0, estimate_seeds=5) -> dict:
    """Density ratios of small odd and even constructions, with timings."""
    out = []
    for ell, q, t in [(3, 3, 0), (3, 3, 1)]:
        T = construct.estimate_T(ell, q, num_seeds=estimate_seeds)
        t_val = T * (t + 2) + 1
        start = time.perf_counter()
        g, rep = construct.build_odd_construction(
            construct.ConstructionParams(ell=ell, t=t_val, q=q, T_eff=T, seed=seed))
        out.append({"construction": "odd", "ell": ell, "q": q, "t": t_val, "T_eff": T,
                    "m": rep["m"], "vertices": rep["vertices"], "edges": rep["edges"],
                    "ratio_upper": rep["density_ratio_upper"],
                    "ratio_even_lower": rep["density_ratio_even_lower"],
                    "seconds": round(time.perf_counter() - start, 3)})
    for q, t_mult in [(5, 1), (7, 4), (11, 4)]:
        T = construct.estimate_T(2, q, num_seeds=estimate_seeds)
        t_val = T * t_mult
        start = time.perf_counter()
        g, rep = construct.build_even_construction(
            construct.ConstructionParams(ell=2, t=t_val, q=q, T_eff=T, seed=seed))
        out.append({"construction": "even", "ell": 2, "q": q, "t": t_val, "T_eff": T,
                    "h": rep["h"], "vertices": rep["vertices"], "edges": rep["edges"],
                    "M": rep["multiple_edges_M"],
                    "ratio_upper": rep["density_ratio_upper"],
                    "ratio_even_lower": rep["density_ratio_even_lower"],
                    "seconds": round(time.perf_counter() - start, 3)})
    return {"rows": out, "note": "ratios are edges / (t^a n^(1+1/ell)); no pass/fail threshold"}


def cmd_bench(args):
    res = run_bench(args.seed, args.estimate_seeds)
    if args.csv:
        stats.write_csv(res["rows"], args.csv)
    _emit(res, args.output)
    return 0


def _common_build(p):
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--n", type=int, help="vertex budget")
    p.add_argument("--q", type=int, help="field order (overrides --n)")
    p.add_argument("--T", type=int, help="bad-pair threshold; estimated when omitted")
    p.add_argument("--dpoly", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-vertices", type=int, default=10**5)
    p.add_argument("--cross-only", action="store_true", help="only remove cross-side bad pairs")
    p.add_argument("--estimate-seeds", type=int, default=10)
    p.add_argument("--verify", action="store_true", help="run the exact theta detector")
    p.add_argument("--output", "-o")
    p.add_argument("--report")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="thetaforge", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="random algebraic graph")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--dpoly", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-vertices", type=int, default=10**5)
    p.add_argument("--output", "-o")
    p.add_argument("--report")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("build-odd", help="blowup construction for odd ell")
    _common_build(p)
    p.add_argument("--m", type=int, help="override the blowup factor")
    p.set_defaults(func=cmd_build_odd)

    p = sub.add_parser("build-even", help="union construction for even ell")
    _common_build(p)
    p.add_argument("--h", type=int, help="override the number of graphs in the union")
    p.add_argument("--simple-count", action="store_true",
                   help="count bad-pair paths in the simplified graph")
    p.set_defaults(func=cmd_build_even)

    p = sub.add_parser("verify-theta", help="exact theta detection")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--output", "-o", default="-")
    p.add_argument("--max-candidates", type=int, default=theta.DEFAULT_MAX_CANDIDATES)
    p.add_argument("--node-budget", type=int, default=theta.DEFAULT_NODE_BUDGET)
    p.add_argument("--full", action="store_true", help="exact maxima for every pair")
    p.set_defaults(func=cmd_verify_theta)

    p = sub.add_parser("explore", help="layered exploration certificate")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--root", default="auto")
    p.add_argument("--max-attempts", type=int, default=explore.DEFAULT_EMBED_ATTEMPTS)
    p.add_argument("--output", "-o", default="-")
    p.set_defaults(func=cmd_explore)

    p = sub.add_parser("stats", help="Monte Carlo path statistics")
    p.add_argument("--experiment", choices=["badpairs", "dichotomy", "moments"], required=True)
    p.add_argument("--grid", action="append", help="ELL:Q1,Q2,... (repeatable)")
    p.add_argument("--h", type=int, default=1)
    p.add_argument("--T", type=int)
    p.add_argument("--T-probe", type=int, default=3)
    p.add_argument("--seeds", type=int, default=10)
    p.add_argument("--pairs", type=int, default=200)
    p.add_argument("--dpoly", type=int)
    p.add_argument("--csv")
    p.add_argument("--output", "-o", default="-")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("bench", help="density ratios of small constructions")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--estimate-seeds", type=int, default=5)
    p.add_argument("--csv")
    p.add_argument("--output", "-o", default="-")
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValueError, RuntimeError) as err:
        log.error("%s", err)
        return 1


if __name__ == "__main__":
    sys.exit(main())
