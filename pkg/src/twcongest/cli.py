"""Command line front end: treewidth, disjoint-paths, solve, validate, gen."""

from __future__ import annotations

import argparse
import json
import sys

from .aggregation import DirectAggregator
from .decomposition import TreeDecomposition
from .dp import PROBLEMS, solve_problem
from .generators import FAMILIES, generate
from .graph import Graph, GraphFormatError, read_graph, serialize_graph
from .oracles import (MIS_ORACLE_MAX_N, SMALL_ORACLE_MAX_N, TREEWIDTH_ORACLE_MAX_N, oracle_bruteforce,
                      oracle_treewidth_exact, oracle_vertex_maxflow)
from .paths import disjoint_paths
from .treewidth import TwExceeded, TwStats, approx_treewidth, decompose
from .validators import validate_decomposition, validate_paths, validate_st_cut


class UsageError(Exception):
    pass


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True) + "\n")


def _write_stats(path: str | None, stats: dict) -> None:
    if path:
        with open(path, "w") as fh:
            json.dump(stats, fh, sort_keys=True, indent=2)
            fh.write("\n")


def _load(path: str):
    try:
        return read_graph(path)
    except FileNotFoundError:
        raise UsageError(f"no such file: {path}") from None
    except GraphFormatError as exc:
        raise UsageError(f"{path}: {exc}") from None


def cmd_treewidth(args) -> int:
    g = _load(args.graph)
    agg = DirectAggregator(g, seed=args.seed)
    tw_stats = TwStats()
    if args.k is not None and args.approx:
        raise UsageError("--k and --approx are mutually exclusive")
    if args.k is not None:
        if args.k < 1:
            raise UsageError("--k must be at least 1")
        k = args.k
        res = decompose(g, k, agg, tw_stats)
    else:
        k, res = approx_treewidth(g, agg, tw_stats)
    if isinstance(res, TwExceeded):
        _emit(res.to_json())
    else:
        out = res.to_json()
        out["k"] = k
        _emit(out)
    _write_stats(args.stats_json, {"rounds": agg.stats.to_json(), "treewidth": tw_stats.to_json()})
    if not isinstance(res, TwExceeded):
        report = validate_decomposition(g, res, 7 * k + 4)
        if not report:
            print(f"decomposition invalid: {report.violated} {report.witness}", file=sys.stderr)
            return 1
    if args.oracle_check and g.n <= TREEWIDTH_ORACLE_MAX_N:
        tw = oracle_treewidth_exact(g)
        if isinstance(res, TwExceeded) and tw <= k:
            print(f"oracle mismatch: tw={tw} but verdict says > {k}", file=sys.stderr)
            return 1
    return 0


def cmd_disjoint_paths(args) -> int:
    g = _load(args.graph)
    for name in ("s", "t"):
        v = getattr(args, name)
        if not 0 <= v < g.n:
            raise UsageError(f"--{name} {v} is not a node")
    if args.s == args.t or args.k < 1:
        raise UsageError("need distinct --s and --t and --k >= 1")
    agg = DirectAggregator(g, seed=args.seed)
    res = disjoint_paths(g, args.s, args.t, args.k, agg)
    out = res.to_json()
    out["direct_edge"] = res.direct_edge
    _emit(out)
    _write_stats(args.stats_json, {"rounds": res.stats.to_json(), "augmentations": res.augmentations})
    if res.kind == "paths":
        ok = validate_paths(g, res.paths, {args.s}, {args.t}).ok
    else:
        h = g
        if res.direct_edge:
            h = Graph.from_edges(g.n, [e for e in g.edges() if set(e) != {args.s, args.t}])
        ok = validate_st_cut(h, args.s, args.t, res.cut).ok
    if not ok:
        print("returned witness failed validation", file=sys.stderr)
        return 1
    if args.oracle_check:
        flow, _ = oracle_vertex_maxflow(g, args.s, args.t)
        expect = "paths" if flow >= args.k else "cut"
        cut_ok = res.kind == "paths" or len(res.cut) + int(res.direct_edge) == flow
        if res.kind != expect or not cut_ok:
            print(f"oracle mismatch: flow={flow}", file=sys.stderr)
            return 1
    return 0


def cmd_solve(args) -> int:
    g = _load(args.graph)
    if args.decomp:
        decomp = _load_decomp(args.decomp)
        k = None
    else:
        k, decomp = approx_treewidth(g, DirectAggregator(g, seed=args.seed))
    try:
        sol = solve_problem(g, decomp, args.problem)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    _emit(sol.to_json())
    _write_stats(args.stats_json, {"dp": sol.stats.to_json(), "width": decomp.width, "k": k})
    if args.oracle_check:
        cap = MIS_ORACLE_MAX_N if args.problem in ("mis", "vc") else SMALL_ORACLE_MAX_N
        if g.n <= cap:
            ref = oracle_bruteforce(g, args.problem)
            if ref.value != sol.value:
                print(f"oracle mismatch: expected {ref.value}, got {sol.value}", file=sys.stderr)
                return 1
    return 0


def _load_decomp(path: str) -> TreeDecomposition:
    try:
        with open(path) as fh:
            return TreeDecomposition.from_json(json.load(fh))
    except FileNotFoundError:
        raise UsageError(f"no such file: {path}") from None
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"{path}: malformed decomposition ({exc})") from None


def cmd_validate(args) -> int:
    g = _load(args.graph)
    decomp = _load_decomp(args.decomp)
    report = validate_decomposition(g, decomp, args.max_width)
    witness = report.witness
    if isinstance(witness, (set, frozenset, tuple)):
        witness = sorted(witness) if not isinstance(witness, tuple) else list(witness)
    _emit({"ok": report.ok, "violated": report.violated, "witness": witness, "width": decomp.width})
    _write_stats(args.stats_json, {"width": decomp.width, "bags": len(decomp.bags)})
    return 0 if report.ok else 1


def _parse_params(items: list[str]) -> dict:
    params = {}
    for item in items:
        if "=" not in item:
            raise UsageError(f"parameter {item!r} must look like key=value")
        key, value = item.split("=", 1)
        params[key] = value
    return params


def cmd_gen(args) -> int:
    try:
        g = generate(args.family, _parse_params(args.params), args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    text = serialize_graph(g)
    if args.output:
        with open(args.output, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    _write_stats(args.stats_json, {"n": g.n, "m": g.m, "family": args.family})
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for generators and aggregation coins")
    common.add_argument("--stats-json", metavar="FILE", help="write round/primitive accounting here")
    common.add_argument("--oracle-check", action="store_true",
                        help="compare with the sequential oracle when the instance is small enough")
    parser = argparse.ArgumentParser(prog="twcongest", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("treewidth", parents=[common], help="decompose, or decide tw > k")
    p.add_argument("graph")
    p.add_argument("--k", type=int)
    p.add_argument("--approx", action="store_true", help="search k = 1, 2, ... (default without --k)")
    p.set_defaults(func=cmd_treewidth)

    p = sub.add_parser("disjoint-paths", parents=[common], help="k disjoint s-t paths or a cut")
    p.add_argument("graph")
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=cmd_disjoint_paths)

    p = sub.add_parser("solve", parents=[common], help="optimise over a tree decomposition")
    p.add_argument("graph")
    p.add_argument("--problem", choices=PROBLEMS, required=True)
    p.add_argument("--decomp", help="decomposition JSON; computed when omitted")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("validate", parents=[common], help="check a decomposition")
    p.add_argument("graph")
    p.add_argument("decomp")
    p.add_argument("--max-width", type=int)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("gen", parents=[common], help=f"generate a graph ({', '.join(FAMILIES)})")
    p.add_argument("family", choices=FAMILIES)
    p.add_argument("params", nargs="*", help="key=value, e.g. n=20 k=2 p=0.3")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)
    return parser


def run_cli(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_cli())
