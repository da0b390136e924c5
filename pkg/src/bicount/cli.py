"""Command line driver: load or synthesize a graph, run the pipeline, report.

Pipeline order is load -> optional reorder -> index/bitmap build -> count
(whole-graph or partitioned). The count goes to stdout on its own line so
scripts can capture it; everything else rides on --stats-json.
"""

import argparse
import json
import sys
import warnings
from contextlib import contextmanager
from dataclasses import asdict
from time import perf_counter

import numpy as np

from .engine import CountReport, EngineConfig, count_bicliques, prepare_structures
from .graph import (
    BipartiteGraph,
    build_two_hop_index,
    from_edges,
    load_edge_list,
    relabel,
    select_anchor_layer,
)
from .oracle import brute_force_count, enumerate_bicliques
from .partition import budgeted_partition, count_partitioned
from .reorder import border_reorder, degree_order

# synthesis knobs: floor of the power-law 2-hop targets, the chance a
# neighbor pick follows current popularity instead of uniform, and how many
# fruitless picks end a vertex's fill loop
TARGET_FLOOR = 40
SHARE_BIAS = 0.55
STALL_LIMIT = 24


class StageError(RuntimeError):
    """Wraps any pipeline failure with the module that raised it."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"error[{stage}]: {cause}")
        self.stage = stage
        self.cause = cause


@contextmanager
def _stage(name: str):
    try:
        yield
    except StageError:
        raise
    except Exception as exc:  # surfaced with a module tag, per the CLI contract
        raise StageError(name, exc) from exc


def synth_generate(u_count: int, v_count: int, power_law_exponent: float,
                   seed: int) -> BipartiteGraph:
    """Random bipartite graph with power-law 2-hop neighborhood sizes.

    Each layer-U vertex draws a 2-hop-neighbor target from a truncated
    power law, then picks V-neighbors until the target is roughly met.
    Picks favor already popular V-vertices, so targets are reached by
    sharing neighbors rather than by raw degree; that is what pushes the
    2-hop tail well past a degree-matched uniform graph. Fully
    deterministic per seed.
    """
    if u_count < 1 or v_count < 1:
        raise ValueError("layer sizes must be >= 1")
    if power_law_exponent <= 1:
        raise ValueError("power-law exponent must be > 1")
    rng = np.random.default_rng(seed)
    cap = max(1, u_count - 1)
    raw = np.floor(
        TARGET_FLOOR * (1.0 - rng.random(u_count))
        ** (-1.0 / (power_law_exponent - 1.0))).astype(np.int64)
    over = int((raw > cap).sum())
    if over:
        warnings.warn(f"{over} of {u_count} two-hop targets exceed {cap} "
                      "and were clipped", RuntimeWarning)
    targets = np.minimum(raw, cap).tolist()

    members: list[list[int]] = [[] for _ in range(v_count)]
    pool: list[int] = []  # one entry per edge; sampling it weights by degree
    eu: list[int] = []
    ev: list[int] = []
    for u in range(u_count):
        want = targets[u]
        reached: set[int] = set()
        chosen: set[int] = set()
        stall = 0
        while len(reached) < want and stall < STALL_LIMIT and len(chosen) < v_count:
            if pool and rng.random() < SHARE_BIAS:
                v = pool[int(rng.integers(len(pool)))]
            else:
                v = int(rng.integers(v_count))
            if v in chosen:
                stall += 1
                continue
            before = len(reached)
            chosen.add(v)
            reached.update(members[v])
            members[v].append(u)
            pool.append(v)
            stall = 0 if len(reached) > before else stall + 1
        for v in sorted(chosen):
            eu.append(u)
            ev.append(v)
    return from_edges(u_count, v_count, eu, ev)


def _parse_synth(text: str):
    parts = text.split(",")
    if len(parts) != 4:
        raise ValueError("--synth wants u,v,alpha,seed")
    return int(parts[0]), int(parts[1]), float(parts[2]), int(parts[3])


def _anchor_flag(value: str) -> str:
    return {"auto": "auto", "u": "U", "v": "V"}[value]


def apply_reorder(g: BipartiteGraph, kind: str, iters: int, p: int, q: int,
                  anchor: str) -> BipartiteGraph:
    """Degree presort, then for `border` a greedy pass per layer.

    The anchor layer is reordered first (it populates the 2-hop bitmap
    words), then the opposite layer (the 1-hop words).
    """
    if kind == "none":
        return g
    g = relabel(g, degree_order(g, "U"), degree_order(g, "V"))
    if kind == "degree":
        return g
    force = None if anchor == "auto" else anchor
    first = select_anchor_layer(g, p, q, force=force).layer
    for layer in (first, "V" if first == "U" else "U"):
        res = border_reorder(g, layer, iters)
        ident_u = np.arange(g.u_count)
        ident_v = np.arange(g.v_count)
        if layer == "U":
            g = relabel(g, res.permutation, ident_v)
        else:
            g = relabel(g, ident_u, res.permutation)
    return g


def _oracle_report(g: BipartiteGraph, p: int, q: int, anchor: str,
                   want_pairs: bool) -> CountReport:
    choice = select_anchor_layer(g, p, q,
                                 force=None if anchor == "auto" else anchor)
    t0 = perf_counter()
    pairs = None
    if want_pairs:
        pairs = enumerate_bicliques(g, p, q)
        count = len(pairs)
    else:
        count = brute_force_count(g, p, q)
    return CountReport(count=count, time_1hop=0.0, time_2hop=0.0,
                       batches_executed=0, tasks_stolen=0, roots_filtered=0,
                       wall_time=perf_counter() - t0, tasks_emitted=0,
                       tasks_consumed=0, workers=1,
                       anchor_layer=choice.layer, bicliques=pairs)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="bicount",
        description="count (p,q)-bicliques in a bipartite graph")
    src = ap.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", metavar="PATH",
                     help="edge list file, two integer columns")
    src.add_argument("--synth", metavar="U,V,ALPHA,SEED",
                     help="generate a power-law instance instead of loading")
    ap.add_argument("--p", type=int, required=True)
    ap.add_argument("--q", type=int, required=True)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--mode", choices=("oracle", "dfs", "hybrid"),
                    default="hybrid")
    ap.add_argument("--anchor", choices=("auto", "u", "v"), default="auto")
    ap.add_argument("--reorder", choices=("none", "degree", "border"),
                    default="none")
    ap.add_argument("--border-iters", type=int, default=1000, metavar="N")
    ap.add_argument("--batch-words", type=int, default=4096, metavar="N")
    ap.add_argument("--partition-budget", type=int, default=None, metavar="M",
                    help="closure entry budget; turns on partitioned counting")
    ap.add_argument("--enumerate", dest="list_results", action="store_true",
                    help="also print each biclique, left ids then right ids")
    ap.add_argument("--stats-json", metavar="PATH", default=None)
    return ap


def run_pipeline(args) -> tuple[int, CountReport | None]:
    try:
        with _stage("cli"):
            if args.synth is not None:
                u, v, alpha, seed = _parse_synth(args.synth)
        if args.synth is not None:
            with _stage("cli"):
                g = synth_generate(u, v, alpha, seed)
        else:
            with _stage("graph"):
                with open(args.input) as fh:
                    g = load_edge_list(fh)

        with _stage("reorder"):
            if args.border_iters < 0:
                raise ValueError("--border-iters must be >= 0")
            g = apply_reorder(g, args.reorder, args.border_iters,
                              args.p, args.q, _anchor_flag(args.anchor))

        anchor = _anchor_flag(args.anchor)
        if args.mode == "oracle":
            if args.partition_budget is not None:
                raise StageError("cli", ValueError(
                    "partitioned counting needs --mode dfs or hybrid"))
            with _stage("oracle"):
                report = _oracle_report(g, args.p, args.q, anchor,
                                        args.list_results)
        elif args.partition_budget is not None:
            if args.list_results:
                raise StageError("cli", ValueError(
                    "--enumerate is not available with partitioned counting"))
            cfg = EngineConfig(worker_count=args.workers,
                               batch_buffer_capacity=args.batch_words,
                               mode=args.mode)
            with _stage("engine"):
                cfg.validate()
                choice = select_anchor_layer(
                    g, args.p, args.q, force=None if anchor == "auto" else anchor)
                structures = prepare_structures(g, args.p, args.q,
                                                anchor=choice.layer)
            with _stage("partition"):
                und = build_two_hop_index(g, choice.layer, choice.q_eff)
                parts = budgeted_partition(g, und, args.partition_budget)
                report = count_partitioned(g, parts, args.p, args.q, cfg,
                                           structures=structures)
        else:
            cfg = EngineConfig(worker_count=args.workers,
                               batch_buffer_capacity=args.batch_words,
                               mode=args.mode, anchor=anchor,
                               enumerate_results=args.list_results)
            with _stage("engine"):
                report = count_bicliques(g, args.p, args.q, cfg)

        print(report.count)
        if args.list_results and report.bicliques is not None:
            for left, right in report.bicliques:
                print(",".join(str(x) for x in left) + " "
                      + ",".join(str(x) for x in right))
        if args.stats_json is not None:
            with _stage("cli"):
                payload = {"schema": 1, **asdict(report)}
                with open(args.stats_json, "w") as fh:
                    json.dump(payload, fh, indent=2, default=int)
                    fh.write("\n")
        return 0, report
    except StageError as err:
        print(str(err), file=sys.stderr)
        return 2, None


def main(argv=None) -> None:
    args = build_parser().parse_args(argv)
    code, _ = run_pipeline(args)
    sys.exit(code)


if __name__ == "__main__":
    main()
