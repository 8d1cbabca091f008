"""Command-line entry point tying the toolkit together.

Every subcommand writes a machine-readable result JSON and, where a peel
runs, a trace CSV. Identical configuration and input produce identical
outputs; all randomness flows from the seed flag. The slack parameter is
accepted as an exact rational ("1/2") or a decimal ("0.5"), which is
converted to the exact fraction it denotes in base 10.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import __version__
from .directed import DirectedResult, densest_directed, sweep_c
from .errors import DensePeelError, InfeasibleParameterError
from .generators import clique_plus_star, preferential_attachment_weighted, regular_layers
from .graph_io import open_edge_stream
from .mapreduce import mr_densest_undirected
from .oracle import brute_force_undirected, exact_flow_undirected
from .peel import DenseResult, densest_at_least_k, densest_undirected
from .sketch import densest_undirected_sketched

USAGE_ERROR = 2
RUN_ERROR = 1


def _parse_eps(text: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"cannot parse eps {text!r} as a rational")
    if value < 0:
        raise argparse.ArgumentTypeError("eps must be >= 0")
    return value


def _add_io_flags(sub, *, needs_eps=True):
    sub.add_argument("--input", required=True, help="edge-list file (.gz accepted)")
    if needs_eps:
        sub.add_argument(
            "--eps", type=_parse_eps, required=True, help="slack, rational p/q or decimal"
        )
    sub.add_argument(
        "--policy", choices=["dedupe", "multigraph"], default="dedupe",
        help="duplicate edge handling (default dedupe)",
    )
    sub.add_argument("--out", default="run", help="output prefix (default 'run')")
    sub.add_argument("--nodes-out", default=None, help="optional node list file, one label per line")
    sub.add_argument("--dump-config", action="store_true", help="print resolved config JSON and exit")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="densepeel",
        description="approximately densest subgraphs by multi-pass peeling",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--seed", type=int, default=0, help="master seed for all randomness")
    subs = parser.add_subparsers(dest="subcommand", required=True)

    p = subs.add_parser("undirected", help="threshold peel of an undirected graph")
    _add_io_flags(p)
    p.add_argument("--engine", choices=["stream", "inmemory"], default="stream")

    p = subs.add_parser("atleast-k", help="quota peel targeting at least k nodes")
    _add_io_flags(p)
    p.add_argument("--k", type=int, required=True)

    p = subs.add_parser("directed", help="directed peel at a fixed |S|/|T| ratio")
    _add_io_flags(p)
    p.add_argument("--c", type=float, required=True)

    p = subs.add_parser("sweep", help="directed peel over a geometric ratio grid")
    _add_io_flags(p)
    p.add_argument("--delta", type=float, required=True, help="grid resolution, > 1")

    p = subs.add_parser("sketch", help="undirected peel with sketched degrees")
    _add_io_flags(p)
    p.add_argument("--sketch-b", type=int, required=True, help="buckets per table")
    p.add_argument("--sketch-t", type=int, default=5, help="tables (default 5)")
    p.add_argument("--sketch-seed", type=int, default=None, help="defaults to --seed")

    p = subs.add_parser("exact", help="exact optimum by oracle")
    _add_io_flags(p, needs_eps=False)
    p.add_argument("--method", choices=["brute", "flow"], default="flow")
    p.add_argument("--k", type=int, default=None, help="size floor (brute only)")

    p = subs.add_parser("mr", help="sharded two-phase peel")
    _add_io_flags(p)
    p.add_argument("--shards", type=int, required=True)
    p.add_argument("--literal-marks", action="store_true",
                   help="shuffle per-node marker records instead of broadcasting a bitset")
    p.add_argument("--work-dir", default=None, help="externalize shard files here")

    p = subs.add_parser("verify", help="run the peel and the oracle, report the ratio")
    _add_io_flags(p)
    p.add_argument("--method", choices=["brute", "flow"], default="flow")

    p = subs.add_parser("gen", help="emit a deterministic test graph")
    gen_subs = p.add_subparsers(dest="generator", required=True)
    g = gen_subs.add_parser("layers", help="regular layers with geometric degrees")
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--out", default=None, help="file (default stdout)")
    g.add_argument("--dump-config", action="store_true")
    g = gen_subs.add_parser("pa", help="deterministic weighted preferential attachment")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--out", default=None)
    g.add_argument("--dump-config", action="store_true")
    g = gen_subs.add_parser("cliquestar", help="disjoint clique plus star")
    g.add_argument("--q", type=int, required=True)
    g.add_argument("--leaves", type=int, required=True)
    g.add_argument("--out", default=None)
    g.add_argument("--dump-config", action="store_true")
    return parser


def _config_dict(args) -> dict:
    config = {}
    for key, value in sorted(vars(args).items()):
        if value is None:
            continue
        if isinstance(value, Fraction):
            value = f"{value.numerator}/{value.denominator}"
        config[key] = value
    return config


def _write_trace_csv(path: str, result, directed: bool) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        if directed:
            fh.write("pass,n_alive,edges_alive,density,removed,side,nT\n")
            for row in result.trace:
                fh.write(
                    f"{row.pass_index},{row.n_s},{row.edges_alive},"
                    f"{row.density!r},{row.removed},{row.side},{row.n_t}\n"
                )
        else:
            fh.write("pass,n_alive,edges_alive,density,removed\n")
            for row in result.trace:
                fh.write(
                    f"{row.pass_index},{row.n_alive},{row.edges_alive},"
                    f"{float(row.density)!r},{row.removed}\n"
                )


def _labels(stream, ids) -> list[str]:
    return [stream.nodes.label_of(i) for i in ids]


def _emit(args, payload: dict) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    with open(f"{args.out}.result.json", "w", encoding="utf-8") as fh:
        fh.write(text + "\n")
    print(text)


def _finish_undirected(args, stream, result: DenseResult, extra: dict | None = None) -> None:
    _write_trace_csv(f"{args.out}.trace.csv", result, directed=False)
    payload = {
        "density": float(result.best_density),
        "size": len(result.best_set),
        "passes": result.passes,
        "nodes": _labels(stream, result.best_set),
    }
    if extra:
        payload.update(extra)
    if args.nodes_out:
        with open(args.nodes_out, "w", encoding="utf-8") as fh:
            for label in payload["nodes"]:
                fh.write(label + "\n")
    _emit(args, payload)


def _finish_directed(args, stream, result: DirectedResult) -> None:
    _write_trace_csv(f"{args.out}.trace.csv", result, directed=True)
    payload = {
        "density": result.best_density,
        "size": {"S": len(result.best_s), "T": len(result.best_t)},
        "passes": result.passes,
        "c_used": result.c_used,
        "S_nodes": _labels(stream, result.best_s),
        "T_nodes": _labels(stream, result.best_t),
    }
    if args.nodes_out:
        with open(args.nodes_out, "w", encoding="utf-8") as fh:
            for label in payload["S_nodes"] + payload["T_nodes"]:
                fh.write(label + "\n")
    _emit(args, payload)


def _run_gen(args) -> int:
    if args.generator == "layers":
        graph = regular_layers(args.k)
    elif args.generator == "pa":
        graph = preferential_attachment_weighted(args.n)
    else:
        graph = clique_plus_star(args.q, args.leaves)
    text = graph.format_edge_list()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {graph.m} edges on {graph.n} nodes to {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def run(args) -> int:
    if args.subcommand == "gen":
        return _run_gen(args)

    directed_input = args.subcommand in ("directed", "sweep")
    stream = open_edge_stream(args.input, directed=directed_input, policy=args.policy)

    if args.subcommand == "undirected":
        result = densest_undirected(stream, args.eps, engine=args.engine)
        _finish_undirected(args, stream, result)
    elif args.subcommand == "atleast-k":
        if args.eps == 0:
            raise InfeasibleParameterError("atleast-k requires eps > 0")
        result = densest_at_least_k(stream, args.k, args.eps)
        _finish_undirected(args, stream, result)
    elif args.subcommand == "directed":
        result = densest_directed(stream, args.c, args.eps)
        _finish_directed(args, stream, result)
    elif args.subcommand == "sweep":
        if not args.delta > 1:
            raise InfeasibleParameterError(f"delta must be > 1, got {args.delta}")
        result = sweep_c(stream, args.delta, args.eps)
        _finish_directed(args, stream, result)
    elif args.subcommand == "sketch":
        seed = args.sketch_seed if args.sketch_seed is not None else args.seed
        result = densest_undirected_sketched(
            stream, args.eps, buckets=args.sketch_b, tables=args.sketch_t, seed=seed
        )
        ratio = args.sketch_t * args.sketch_b / stream.n
        print(f"sketch memory ratio t*b/n = {ratio:.3f}")
        _finish_undirected(args, stream, result, extra={"memory_ratio": ratio})
    elif args.subcommand == "exact":
        u, v, _ = stream.edge_arrays()
        edges = list(zip(u.tolist(), v.tolist()))
        if args.method == "brute":
            oracle = brute_force_undirected(stream.n, edges, size_floor=args.k)
        else:
            if args.k is not None:
                raise InfeasibleParameterError("--k is only supported with --method brute")
            oracle = exact_flow_undirected(stream.n, edges)
        payload = {
            "optimum_num": oracle.optimum.numerator,
            "optimum_den": oracle.optimum.denominator,
            "witness": _labels(stream, oracle.witness),
            "method": oracle.method,
        }
        _emit(args, payload)
    elif args.subcommand == "mr":
        result, metrics = mr_densest_undirected(
            stream,
            args.eps,
            args.shards,
            literal_marks=args.literal_marks,
            work_dir=args.work_dir,
        )
        with open(f"{args.out}.metrics.json", "w", encoding="utf-8") as fh:
            json.dump(metrics.as_dict(), fh, indent=2)
        _finish_undirected(args, stream, result)
    elif args.subcommand == "verify":
        result = densest_undirected(stream, args.eps)
        u, v, _ = stream.edge_arrays()
        edges = list(zip(u.tolist(), v.tolist()))
        if args.method == "brute":
            oracle = brute_force_undirected(stream.n, edges)
        else:
            oracle = exact_flow_undirected(stream.n, edges)
        approx = float(result.best_density)
        optimum = float(oracle.optimum)
        ratio = optimum / approx if approx else float("inf")
        bound = float(2 * (1 + args.eps))
        print(f"optimum={optimum:.4f} achieved={approx:.4f} ratio={ratio:.4f} bound={bound:.4f}")
        payload = {
            "optimum": optimum,
            "achieved": approx,
            "ratio": ratio,
            "bound": bound,
            "passes": result.passes,
        }
        _emit(args, payload)
    else:  # pragma: no cover
        raise AssertionError(args.subcommand)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "dump_config", False):
        print(json.dumps(_config_dict(args), indent=2, sort_keys=True))
        return 0
    try:
        return run(args)
    except InfeasibleParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except DensePeelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return RUN_ERROR


if __name__ == "__main__":
    sys.exit(main())
