"""Hybrid DFS-BFS (p,q)-biclique counting.

Search roots live on the anchor layer. Each task is a (root, second) pair
of 2-hop neighbors with strictly decreasing priority; deeper levels extend
the left side through directed 2-hop candidate sets (c_l) while the shared
right side shrinks through 1-hop intersections (c_r). A leaf at |L| = p
contributes C(|c_r|, q). Candidate sets stay bitmap-encoded end to end.

Workers are forked processes sharing the read-only graph structures; the
only shared mutable state is the progress board driving work stealing.
"""

from __future__ import annotations

import multiprocessing as mp
from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from multiprocessing.sharedctypes import RawArray
from time import perf_counter

import numpy as np

from bicount.graph import (
    AnchorChoice,
    BipartiteGraph,
    PriorityOrder,
    TwoHopIndex,
    build_two_hop_index,
    directed_from_undirected,
    select_anchor_layer,
    transpose,
    vertex_priority,
)
from bicount.htb import Htb, HtbSlice, htb_build, htb_intersect

DONE = 0xFFFFFFFF

MODES = ("dfs", "hybrid")
ANCHOR_FLAGS = ("auto", "U", "V")


@dataclass
class EngineConfig:
    worker_count: int = 1
    batch_buffer_capacity: int = 4096  # scratch words per worker per level
    mode: str = "hybrid"
    anchor: str = "auto"
    enumerate_results: bool = False
    track_tasks: bool = False
    check_nesting: bool = False

    def validate(self) -> None:
        if self.worker_count < 1:
            raise ValueError("worker_count must be >= 1")
        if self.batch_buffer_capacity < 1:
            raise ValueError("batch_buffer_capacity must be >= 1")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.anchor not in ANCHOR_FLAGS:
            raise ValueError(f"anchor must be one of {ANCHOR_FLAGS}")


@dataclass
class CountReport:
    count: int
    time_1hop: float
    time_2hop: float
    batches_executed: int
    tasks_stolen: int
    roots_filtered: int
    wall_time: float
    tasks_emitted: int
    tasks_consumed: int
    workers: int
    anchor_layer: str
    bicliques: list | None = None
    task_tally: list | None = None
    task_counts: list | None = None


@dataclass
class SearchStructures:
    """Everything the workers share read-only, built once per (g, p, q)."""

    choice: AnchorChoice
    work: BipartiteGraph
    und_sizes: np.ndarray
    order: PriorityOrder
    dir2: TwoHopIndex
    adj_htb: Htb
    dir2_htb: Htb


@dataclass
class SearchShared:
    p_eff: int
    q_eff: int
    capacity: int
    mode: str
    adj_slices: list[HtbSlice]
    dir2_slices: list[HtbSlice]
    degrees: list[int]
    comb_q: list[int]
    enumerate_results: bool = False
    check_nesting: bool = False
    record_children: bool = False


def prune_keep(cr_card: int, cl_card: int, level: int, p_eff: int, q_eff: int) -> bool:
    """Child at `level` survives iff it can still reach a full biclique."""
    return cr_card >= q_eff and cl_card >= p_eff - level - 1


def prepare_structures(g: BipartiteGraph, p: int, q: int, anchor: str = "auto",
                       rank=None) -> SearchStructures:
    """Anchor the graph, build 2-hop index, priority, and bitmap encodings.

    rank overrides the priority order (used for partitioned counting, where
    every part must agree on one global order); values need only be
    distinct, higher meaning higher priority.
    """
    if p < 1 or q < 1:
        raise ValueError("p and q must be >= 1")
    choice = select_anchor_layer(g, p, q, force=None if anchor == "auto" else anchor)
    work = g if choice.layer == "U" else transpose(g)
    und = build_two_hop_index(work, "U", choice.q_eff)
    if rank is None:
        order = vertex_priority(work, "U", choice.q_eff, index=und)
    else:
        rank = np.asarray(rank, dtype=np.int64)
        if len(rank) != work.u_count or len(np.unique(rank)) != len(rank):
            raise ValueError("rank override must give one distinct value per anchor vertex")
        order = PriorityOrder(rank, np.argsort(-rank, kind="stable"))
    dir2 = directed_from_undirected(und, order)
    return SearchStructures(
        choice=choice,
        work=work,
        und_sizes=und.sizes,
        order=order,
        dir2=dir2,
        adj_htb=htb_build(work.u_adj),
        dir2_htb=htb_build(dir2.lists),
    )


def pre_runtime_tasks(dir2: TwoHopIndex, order: PriorityOrder, p_eff: int,
                      worker_count: int, und_sizes, roots=None):
    """Edge-oriented task lists, round-robin so counts differ by <= 1.

    One task per directed 2-hop pair (root-only when p_eff = 1); roots whose
    2-hop neighborhood cannot host p_eff - 1 partners emit nothing.
    Returns (per-worker lists, emitted, roots_filtered).
    """
    allowed = None if roots is None else {int(r) for r in roots}
    lists: list[list[tuple[int, int]]] = [[] for _ in range(worker_count)]
    emitted = 0
    filtered = 0
    need = p_eff - 1
    for root in order.order.tolist():
        if allowed is not None and root not in allowed:
            continue
        if und_sizes[root] < need:
            filtered += 1
            continue
        if p_eff == 1:
            lists[emitted % worker_count].append((root, -1))
            emitted += 1
        else:
            for second in dir2.lists[root].tolist():
                lists[emitted % worker_count].append((root, second))
                emitted += 1
    return lists, emitted, filtered


class ProgressBoard:
    """Per-worker claim counters in shared memory with per-entry latches.

    A counter walks 0..n_tasks then parks at the DONE sentinel; claims are
    read-increment under the latch so each index is handed out once.
    """

    def __init__(self, sizes: list[int], ctx):
        self.sizes = sizes
        self.counters = RawArray("I", len(sizes))
        self.latches = [ctx.Lock() for _ in sizes]

    @property
    def n(self) -> int:
        return len(self.sizes)

    def peek(self, e: int) -> int:
        # unlatched read; stale values only cost a wasted claim attempt
        return self.counters[e]

    def claim(self, e: int) -> int | None:
        with self.latches[e]:
            c = self.counters[e]
            if c == DONE:
                return None
            if c >= self.sizes[e]:
                self.counters[e] = DONE
                return None
            self.counters[e] = c + 1
            return c

    def snapshot(self) -> list[int]:
        return list(self.counters)


def drain_board(board: ProgressBoard, me: int, lists, handle, track: bool = False):
    """Consume tasks: own entry first, then scan others skipping DONE.

    Returns (consumed, stolen, claimed pairs when track). Terminates only
    when a full scan finds every entry DONE, so no task is left behind.
    """
    consumed = stolen = 0
    claimed: list[tuple[int, int]] = []
    n = board.n
    while True:
        alive = False
        got = False
        for k in range(n):
            e = (me + k) % n
            if board.peek(e) == DONE:
                continue
            alive = True
            i = board.claim(e)
            if i is None:
                continue
            handle(lists[e][i])
            consumed += 1
            if e != me:
                stolen += 1
            if track:
                claimed.append((e, i))
            got = True
            break
        if not alive:
            return consumed, stolen, claimed
        if not got:
            continue  # raced with another worker finishing an entry


class Searcher:
    """Per-worker search state: scratch arenas, counters, timings."""

    def __init__(self, shared: SearchShared):
        self.sh = shared
        cap = shared.capacity
        levels = max(2, shared.p_eff)
        self.cl_idx = [[0] * cap for _ in range(levels)]
        self.cl_val = [[0] * cap for _ in range(levels)]
        self.cr_idx = [[0] * cap for _ in range(levels)]
        self.cr_val = [[0] * cap for _ in range(levels)]
        self.count = 0
        self.time_1hop = 0.0
        self.time_2hop = 0.0
        self.batches = 0
        self.found: list = []
        self.children_log: list = []
        self.chain: list[int] = []
        self._root_cl: set | None = None

    def run_task(self, root: int, second: int) -> None:
        sh = self.sh
        if sh.p_eff == 1:
            card = sh.degrees[root]
            if card >= sh.q_eff:
                self.count += sh.comb_q[card]
                if sh.enumerate_results:
                    ids = sh.adj_slices[root].decode()
                    for r in combinations(ids, sh.q_eff):
                        self.found.append(((root,), r))
            return
        t0 = perf_counter()
        cr = htb_intersect(sh.adj_slices[root], sh.adj_slices[second],
                           HtbSlice(self.cr_idx[1], self.cr_val[1], 0, 0))
        cr_card = cr.cardinality()
        self.time_1hop += perf_counter() - t0
        self.batches += 1
        if cr_card < sh.q_eff:
            return
        if sh.p_eff == 2:
            self.count += sh.comb_q[cr_card]
            if sh.enumerate_results:
                self._emit((root, second), cr)
            return
        t1 = perf_counter()
        cl = htb_intersect(sh.dir2_slices[root], sh.dir2_slices[second],
                           HtbSlice(self.cl_idx[1], self.cl_val[1], 0, 0))
        cl_card = cl.cardinality()
        self.time_2hop += perf_counter() - t1
        if not prune_keep(cr_card, cl_card, 1, sh.p_eff, sh.q_eff):
            return
        if sh.check_nesting:
            self._root_cl = set(sh.dir2_slices[root].decode())
        self.chain = [root, second]
        self._descend(1, cl, cr)

    def _emit(self, left, cr: HtbSlice) -> None:
        l_sorted = tuple(sorted(left))
        for r in combinations(cr.decode(), self.sh.q_eff):
            self.found.append((l_sorted, r))

    def batch_size(self, cl_words: int, cr_words: int, leaf: bool) -> int:
        if self.sh.mode == "dfs":
            return 1
        cap = self.sh.capacity
        b = cap // max(1, cr_words)
        if not leaf:
            b = min(b, cap // max(1, cl_words))
        return max(1, b)

    def _descend(self, level: int, cl: HtbSlice, cr: HtbSlice) -> None:
        sh = self.sh
        cands = cl.decode()
        child_level = level + 1
        leaf = child_level == sh.p_eff - 1
        batch = self.batch_size(len(cl), len(cr), leaf)
        ci, cv = self.cr_idx[child_level], self.cr_val[child_level]
        li, lv = self.cl_idx[child_level], self.cl_val[child_level]
        adj = sh.adj_slices
        dir2 = sh.dir2_slices
        q_eff = sh.q_eff
        comb_q = sh.comb_q
        lo = 0
        n_cands = len(cands)
        while lo < n_cands:
            hi = min(lo + batch, n_cands)
            self.batches += 1
            # 1-hop phase for the whole batch
            t0 = perf_counter()
            pos = 0
            batch_cr = []
            for k in range(lo, hi):
                u = cands[k]
                out = htb_intersect(cr, adj[u], HtbSlice(ci, cv, pos, pos))
                pos = out.hi
                batch_cr.append((u, out, out.cardinality()))
            self.time_1hop += perf_counter() - t0
            if leaf:
                for u, out, card in batch_cr:
                    if sh.record_children:
                        self.children_log.append((tuple(self.chain), u, card, -1))
                    if card >= q_eff:
                        self.count += comb_q[card]
                        if sh.enumerate_results:
                            self._emit(self.chain + [u], out)
            else:
                # 2-hop phase for the batch survivors
                t1 = perf_counter()
                pos = 0
                batch_cl = []
                for u, out, card in batch_cr:
                    if card < q_eff:
                        if sh.record_children:
                            self.children_log.append((tuple(self.chain), u, card, -1))
                        continue
                    lout = htb_intersect(cl, dir2[u], HtbSlice(li, lv, pos, pos))
                    pos = lout.hi
                    lcard = lout.cardinality()
                    if sh.record_children:
                        self.children_log.append((tuple(self.chain), u, card, lcard))
                    if sh.check_nesting:
                        assert set(lout.decode()) <= self._root_cl
                    batch_cl.append((u, out, card, lout, lcard))
                self.time_2hop += perf_counter() - t1
                for u, out, card, lout, lcard in batch_cl:
                    if prune_keep(card, lcard, child_level, sh.p_eff, q_eff):
                        self.chain.append(u)
                        self._descend(child_level, lout, out)
                        self.chain.pop()
            lo = hi


def _build_shared(s: SearchStructures, cfg: EngineConfig, record_children: bool = False):
    work = s.work
    adj_slices = [s.adj_htb.slice(u) for u in range(work.u_count)]
    dir2_slices = [s.dir2_htb.slice(u) for u in range(work.u_count)]
    degrees = [len(a) for a in work.u_adj]
    max_words = 0
    for sl in adj_slices:
        max_words = max(max_words, len(sl))
    for sl in dir2_slices:
        max_words = max(max_words, len(sl))
    if cfg.batch_buffer_capacity < max_words:
        raise ValueError(
            f"batch_buffer_capacity {cfg.batch_buffer_capacity} words is below "
            f"the largest candidate slice ({max_words} words); raise --batch-words"
        )
    max_deg = max(degrees, default=0)
    comb_q = [comb(c, s.choice.q_eff) for c in range(max_deg + 1)]
    return SearchShared(
        p_eff=s.choice.p_eff,
        q_eff=s.choice.q_eff,
        capacity=cfg.batch_buffer_capacity,
        mode=cfg.mode,
        adj_slices=adj_slices,
        dir2_slices=dir2_slices,
        degrees=degrees,
        comb_q=comb_q,
        enumerate_results=cfg.enumerate_results,
        check_nesting=cfg.check_nesting,
        record_children=record_children,
    )


def _worker_main(wid, shared, lists, board, track, queue):
    searcher = Searcher(shared)
    consumed, stolen, claimed = drain_board(
        board, wid, lists, lambda t: searcher.run_task(t[0], t[1]), track=track)
    queue.put((wid, searcher.count, searcher.time_1hop, searcher.time_2hop,
               searcher.batches, consumed, stolen,
               claimed if track else None,
               searcher.found if shared.enumerate_results else None))


def count_bicliques(g: BipartiteGraph, p: int, q: int, cfg: EngineConfig | None = None,
                    *, structures: SearchStructures | None = None,
                    roots=None) -> CountReport:
    """Count (p,q)-bicliques of g. See EngineConfig for the knobs.

    structures lets callers reuse prebuilt indices; roots restricts which
    anchor vertices may root tasks (partitioned counting). wall_time covers
    the counting phase, not structure preparation.
    """
    cfg = cfg if cfg is not None else EngineConfig()
    cfg.validate()
    s = structures if structures is not None else prepare_structures(g, p, q, cfg.anchor)
    shared = _build_shared(s, cfg)
    t_start = perf_counter()
    lists, emitted, filtered = pre_runtime_tasks(
        s.dir2, s.order, s.choice.p_eff, cfg.worker_count, s.und_sizes, roots)
    task_counts = [len(l) for l in lists]

    if cfg.worker_count == 1:
        searcher = Searcher(shared)
        for t in lists[0]:
            searcher.run_task(t[0], t[1])
        count = searcher.count
        t1, t2 = searcher.time_1hop, searcher.time_2hop
        batches = searcher.batches
        stolen = 0
        consumed = len(lists[0])
        tally = [(0, i) for i in range(len(lists[0]))] if cfg.track_tasks else None
        found = searcher.found if cfg.enumerate_results else None
    else:
        ctx = mp.get_context("fork")
        board = ProgressBoard(task_counts, ctx)
        queue = ctx.SimpleQueue()
        procs = [
            ctx.Process(target=_worker_main,
                        args=(w, shared, lists, board, cfg.track_tasks, queue))
            for w in range(cfg.worker_count)
        ]
        for pr in procs:
            pr.start()
        count = 0
        t1 = t2 = 0.0
        batches = stolen = consumed = 0
        tally = [] if cfg.track_tasks else None
        found = [] if cfg.enumerate_results else None
        for _ in procs:
            (_, w_count, w_t1, w_t2, w_batches, w_consumed, w_stolen,
             w_claimed, w_found) = queue.get()
            count += w_count
            t1 += w_t1
            t2 += w_t2
            batches += w_batches
            consumed += w_consumed
            stolen += w_stolen
            if cfg.track_tasks:
                tally.extend(w_claimed)
            if cfg.enumerate_results:
                found.extend(w_found)
        for pr in procs:
            pr.join()

    if cfg.enumerate_results and found is not None:
        if s.choice.layer == "V":
            found = [(r, l) for (l, r) in found]
        found.sort()

    return CountReport(
        count=count,
        time_1hop=t1,
        time_2hop=t2,
        batches_executed=batches,
        tasks_stolen=stolen,
        roots_filtered=filtered,
        wall_time=perf_counter() - t_start,
        tasks_emitted=emitted,
        tasks_consumed=consumed,
        workers=cfg.worker_count,
        anchor_layer=s.choice.layer,
        bicliques=found,
        task_tally=tally,
        task_counts=task_counts if cfg.track_tasks else None,
    )
