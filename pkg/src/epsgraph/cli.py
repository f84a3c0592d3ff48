"""Command-line interface.

Subcommands: ``build`` (construct a neighbor graph), ``oracle`` (exhaustive
reference), ``compare`` (diff two edge files), ``estimate`` (parameter
selection report), ``project`` (emit one replicate's bit pool), and ``bench``
(prefix-size timing sweep).  Every command prints a single JSON record to
stdout; files carry the actual results.

Exit codes: 0 success, 1 usage error, 2 data error, 3 infeasible parameters.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from .edges import EdgeList
from .errors import DataError, InfeasibleError
from .exact import brute_force_cosine, measure_errors
from .io import read_dataset, read_edges, write_edges, write_pool
from .lsh import ProjectionSpec, VectorDataset, collision_prob, project
from .pipeline import build_graph, build_graph_lsh_only
from .tuning import (MsmParams, auto_params_detailed, estimate_output_size,
                     min_replicates, missing_edge_bound)

__all__ = ["main"]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # noqa: D102 - argparse hook
        raise _UsageError(message)


def _ints_csv(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated int list: {text}")


def _floats_csv(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated float list: {text}")


def _build_parser() -> _Parser:
    parser = _Parser(prog="epsgraph",
                     description="Neighbor graphs by sorted Hamming joins "
                                 "over sign random projections.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, output=True):
        p.add_argument("input", help="dataset file (binary or headerless CSV)")
        if output:
            p.add_argument("--output", "-o", required=True,
                           help="edge-list file to write")

    p = sub.add_parser("build", help="construct the neighbor graph")
    common(p)
    p.add_argument("--epsilon", type=float, required=True,
                   help="cosine-distance radius")
    p.add_argument("--gamma", type=float, default=1e-6,
                   help="missing-edge-ratio budget (default 1e-6)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: CPU count); results do "
                        "not depend on this")
    p.add_argument("--length", type=int, default=None,
                   help="override: projection bits per replicate")
    p.add_argument("--mismatch", type=int, default=None,
                   help="override: Hamming budget d")
    p.add_argument("--blocks", type=int, default=None,
                   help="override: block count k")
    p.add_argument("--replicates", type=int, default=None,
                   help="override: replicate count Q")
    p.add_argument("--normalize", action="store_true",
                   help="center columns and scale rows to unit norm first")
    p.add_argument("--lsh-only", action="store_true",
                   help="baseline mode: mismatch 0, 300 replicates, widest "
                        "feasible length")
    p.add_argument("--chunk-bits", type=int, default=16)
    p.add_argument("--sample-pairs", type=int, default=10_000,
                   help="pair samples for output-size estimation")
    p.set_defaults(func=_cmd_build)

    p = sub.add_parser("oracle", help="exhaustive exact enumeration")
    common(p)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--limit", type=int, default=50_000,
                   help="refuse more rows than this (O(n^2) guard)")
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("compare", help="diff an edge file against a reference")
    p.add_argument("approx", help="edge file under test")
    p.add_argument("exact", help="reference edge file")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("estimate", help="report auto-chosen parameters")
    common(p, output=False)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--gamma", type=float, default=1e-6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sample-pairs", type=int, default=10_000)
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("project", help="emit one replicate's bit pool")
    p.add_argument("input")
    p.add_argument("--output", "-o", required=True, help="pool file to write")
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--replicate", type=int, default=1)
    p.set_defaults(func=_cmd_project)

    p = sub.add_parser("bench", help="prefix-size timing sweep")
    p.add_argument("input")
    p.add_argument("--epsilon-list", type=_floats_csv, required=True,
                   help="comma-separated cosine radii")
    p.add_argument("--sizes", type=_ints_csv, required=True,
                   help="comma-separated prefix sizes")
    p.add_argument("--gamma", type=float, default=1e-6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--chunk-bits", type=int, default=16)
    p.add_argument("--sample-pairs", type=int, default=10_000)
    p.set_defaults(func=_cmd_bench)

    return parser


def _params_record(params: MsmParams) -> dict:
    return {
        "epsilon": params.epsilon,
        "gamma": params.gamma,
        "length": params.length,
        "mismatch": params.mismatch,
        "blocks": params.blocks,
        "replicates": params.replicates,
        "seed": params.seed,
    }


def _stats_record(stats) -> dict:
    return {
        "candidates": stats.candidate_count,
        "edges": stats.edge_count,
        "false_candidates": stats.false_candidate_count,
        "per_replicate_raw": list(stats.per_replicate_raw),
        "per_replicate_new": list(stats.per_replicate_new),
        "bound": stats.achieved_bound,
        "timings": {k: round(v, 6) for k, v in stats.timings.items()},
    }


def _edge_metadata(nodes: int, params: MsmParams, stats,
                   extra: dict | None = None) -> dict:
    # Everything here must be a pure function of (data, flags, seed): the
    # same build at any thread count has to produce identical bytes.
    meta = {"nodes": nodes}
    meta.update(_params_record(params))
    meta.update({
        "bound": stats.achieved_bound,
        "candidates": stats.candidate_count,
        "edges": stats.edge_count,
    })
    meta.update(extra or {})
    return meta


def _emit(record: dict) -> None:
    print(json.dumps(record))


def _cmd_build(args) -> int:
    data = read_dataset(args.input)
    n = data.count
    overrides = {name: getattr(args, name) for name in
                 ("length", "mismatch", "blocks", "replicates")
                 if getattr(args, name) is not None}
    if args.lsh_only and overrides:
        raise _UsageError(
            f"--lsh-only conflicts with --{sorted(overrides)[0]}")
    if n < 2:
        write_edges(args.output, EdgeList(),
                    {"nodes": n, "epsilon": args.epsilon})
        _emit({"command": "build", "nodes": n, "edges": 0,
               "output": args.output})
        return 0

    estimate = None
    auto_report = None
    if args.lsh_only:
        graph = build_graph_lsh_only(
            data, args.epsilon, args.gamma, seed=args.seed,
            threads=args.threads, chunk_bits=args.chunk_bits,
            normalize=args.normalize)
        params = graph.params
    else:
        if len(overrides) == 4:
            params = MsmParams(epsilon=args.epsilon, gamma=args.gamma,
                               seed=args.seed, **overrides)
        else:
            estimate = estimate_output_size(data, args.epsilon,
                                            sample_pairs=args.sample_pairs,
                                            seed=args.seed)
            params, auto_report = auto_params_detailed(
                n, args.epsilon, args.gamma, estimate, seed=args.seed)
            if overrides:
                length = overrides.get("length", params.length)
                mismatch = overrides.get("mismatch", params.mismatch)
                blocks = overrides.get("blocks", max(2 * mismatch, 1))
                p = collision_prob(args.epsilon)
                replicates = overrides.get(
                    "replicates", min_replicates(length, mismatch, p,
                                                 args.gamma))
                params = MsmParams(epsilon=args.epsilon, gamma=args.gamma,
                                   length=length, mismatch=mismatch,
                                   blocks=blocks, replicates=replicates,
                                   seed=args.seed)
        graph = build_graph(data, params, threads=args.threads,
                            chunk_bits=args.chunk_bits,
                            normalize=args.normalize)

    meta_extra = {"normalize": args.normalize, "lsh_only": args.lsh_only}
    write_edges(args.output, graph.edge_list,
                _edge_metadata(n, params, graph.stats, meta_extra))
    record = {
        "command": "build",
        "input": args.input,
        "output": args.output,
        "nodes": n,
        "dim": data.dim,
        "params": _params_record(params),
        "stats": _stats_record(graph.stats),
        "lsh_only": args.lsh_only,
        "normalize": args.normalize,
    }
    if auto_report is not None:
        record["auto"] = {
            "collision_p": auto_report.collision_p,
            "initial_length": auto_report.initial_length,
            "halved": auto_report.halved,
            "q_gamma": auto_report.q_gamma,
            "replicate_cap": auto_report.replicate_cap,
            "cap_applied": auto_report.cap_applied,
            "achieved_bound": auto_report.achieved_bound,
        }
    if estimate is not None:
        record["estimate"] = {
            "sampled_pairs": estimate.sampled_pairs,
            "hits": estimate.hits,
            "estimate_s": estimate.estimate_s,
            "ci": [estimate.ci_low, estimate.ci_high],
        }
    _emit(record)
    return 0


def _cmd_oracle(args) -> int:
    data = read_dataset(args.input)
    edges = brute_force_cosine(data, args.epsilon, limit=args.limit)
    write_edges(args.output, edges,
                {"nodes": data.count, "epsilon": args.epsilon,
                 "method": "exhaustive"})
    _emit({"command": "oracle", "input": args.input, "output": args.output,
           "nodes": data.count, "dim": data.dim, "edges": len(edges)})
    return 0


def _cmd_compare(args) -> int:
    approx, _ = read_edges(args.approx)
    exact, _ = read_edges(args.exact)
    report = measure_errors(approx, exact)
    _emit({
        "command": "compare",
        "approx": args.approx,
        "exact": args.exact,
        "true_edges": report.true_edge_count,
        "missing": report.missing_count,
        "missing_ratio": report.missing_ratio,
        "extra": report.false_candidate_count,
    })
    return 0


def _cmd_estimate(args) -> int:
    data = read_dataset(args.input)
    estimate = estimate_output_size(data, args.epsilon,
                                    sample_pairs=args.sample_pairs,
                                    seed=args.seed)
    params, report = auto_params_detailed(data.count, args.epsilon,
                                          args.gamma, estimate,
                                          seed=args.seed)
    _emit({
        "command": "estimate",
        "input": args.input,
        "nodes": data.count,
        "dim": data.dim,
        "params": _params_record(params),
        "collision_p": report.collision_p,
        "initial_length": report.initial_length,
        "halved": report.halved,
        "q_gamma": report.q_gamma,
        "replicate_cap": report.replicate_cap,
        "cap_applied": report.cap_applied,
        "achieved_bound": report.achieved_bound,
        "estimate_s": estimate.estimate_s,
        "ci": [estimate.ci_low, estimate.ci_high],
        "sampled_pairs": estimate.sampled_pairs,
        "hits": estimate.hits,
    })
    return 0


def _cmd_project(args) -> int:
    data = read_dataset(args.input)
    spec = ProjectionSpec(length=args.length, seed=args.seed,
                          replicate_id=args.replicate)
    pool = project(data, spec)
    write_pool(args.output, pool)
    _emit({"command": "project", "input": args.input, "output": args.output,
           "nodes": pool.count, "length": pool.length})
    return 0


def _cmd_bench(args) -> int:
    data = read_dataset(args.input)
    sizes = sorted(args.sizes)
    if not sizes or sizes[0] < 2:
        raise _UsageError("--sizes needs values >= 2")
    if sizes[-1] > data.count:
        raise _UsageError(f"--sizes includes {sizes[-1]} but the dataset has "
                          f"only {data.count} rows")
    rows = []
    for epsilon in args.epsilon_list:
        # One parameter bundle per radius, tuned at the largest prefix and
        # reused across the sweep so timings reflect scaling, not retuning.
        top = VectorDataset(data.vectors[:sizes[-1]])
        estimate = estimate_output_size(top, epsilon,
                                        sample_pairs=args.sample_pairs,
                                        seed=args.seed)
        params, _ = auto_params_detailed(sizes[-1], epsilon, args.gamma,
                                         estimate, seed=args.seed)
        for size in sizes:
            prefix = VectorDataset(data.vectors[:size])
            t0 = time.perf_counter()
            graph = build_graph(prefix, params, threads=args.threads,
                                chunk_bits=args.chunk_bits)
            wall = time.perf_counter() - t0
            m = graph.edge_count
            rows.append({
                "size": size,
                "epsilon": epsilon,
                "params": _params_record(params),
                "edges": m,
                "candidates": graph.stats.candidate_count,
                "seconds": round(wall, 6),
                "seconds_per_10k_pairs":
                    round(wall / (m / 10_000.0), 6) if m else None,
                "stages": {k: round(v, 6)
                           for k, v in graph.stats.timings.items()},
            })
    _emit({"command": "bench", "input": args.input, "rows": rows})
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
