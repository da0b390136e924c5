"""Memory-budgeted partitioning of the anchor layer into self-contained groups.

Each group of search roots carries a closure: the roots plus every 2-hop
neighbor any of them can reach. All counting work rooted in the group stays
inside the closure and its 1-hop fringe, so groups never need data from one
another. Growth is greedy: seed with the root whose 2-hop neighborhood is
heaviest on average, then keep admitting the candidate whose closure overlaps
the group's the most, until the admission would push the entry cost past the
budget.
"""

import heapq
import warnings
from dataclasses import dataclass

import numpy as np

from .engine import (
    CountReport,
    EngineConfig,
    SearchStructures,
    count_bicliques,
    prepare_structures,
)
from .graph import (
    BipartiteGraph,
    TwoHopIndex,
    build_two_hop_index,
    from_edges,
    select_anchor_layer,
    transpose,
    vertex_priority,
)


class PartitionError(RuntimeError):
    """Partition does not fit the graph it is being applied to."""


@dataclass
class PartitionSet:
    """Disjoint root groups covering one layer, with their closures.

    costs count adjacency entries: for every closure member, its 1-hop list
    length plus its 2-hop list length. oversize marks singleton groups whose
    minimal closure alone exceeds the budget they were built under.
    """

    layer: str
    k: int
    budget: int
    groups: list[list[int]]
    closures: list[list[int]]
    costs: list[int]
    oversize: list[bool]

    @property
    def group_count(self) -> int:
        return len(self.groups)


def entry_weight(g: BipartiteGraph, index: TwoHopIndex) -> np.ndarray:
    """Per-vertex entry cost: 1-hop plus 2-hop list lengths."""
    adj = g.adj(index.layer)
    return np.array([len(adj[u]) + len(index.lists[u]) for u in range(len(adj))],
                    dtype=np.int64)


def closure_cost(g: BipartiteGraph, index: TwoHopIndex, closure) -> int:
    """Recount a closure's cost from scratch (audit path)."""
    return int(entry_weight(g, index)[np.asarray(list(closure), dtype=np.int64)].sum())


def budgeted_partition(g: BipartiteGraph, index: TwoHopIndex,
                       budget: int) -> PartitionSet:
    """Split the indexed layer into groups whose closures fit `budget` entries.

    Seeds are taken in descending average neighbor weight. A max-heap ranks
    expansion candidates by how much of the current closure they already
    cover; admitting one pays only for closure members it adds. A group
    closes when the best candidate would overrun the budget, or when no
    candidate reaches the closure at all. A seed whose own closure overruns
    the budget stays a singleton group, flagged oversize.
    """
    if index.directed:
        raise ValueError("partitioning needs the undirected 2-hop index")
    if budget < 1:
        raise ValueError("budget must be >= 1")
    layer = index.layer
    adj = g.adj(layer)
    n = len(adj)
    if len(index.lists) != n:
        raise ValueError("index does not match the graph layer")
    two = index.lists
    w = entry_weight(g, index)

    avg = np.zeros(n, dtype=np.float64)
    for u in range(n):
        if len(two[u]):
            avg[u] = float(w[two[u]].sum()) / len(two[u])
    # reverse 2-hop reach: rin[x] lists the roots whose closure would pull x in
    rin: list[list[int]] = [[] for _ in range(n)]
    for v in range(n):
        for x in two[v].tolist():
            rin[x].append(v)

    seeds = np.lexsort((np.arange(n), -avg))
    assigned = np.zeros(n, dtype=bool)
    groups: list[list[int]] = []
    closures: list[list[int]] = []
    costs: list[int] = []
    oversize: list[bool] = []

    for seed in seeds.tolist():
        if assigned[seed]:
            continue
        assigned[seed] = True
        group = [seed]
        closure = {seed}
        closure.update(two[seed].tolist())
        cost = int(w[list(closure)].sum())

        benefit: dict[int, int] = {}
        heap: list[tuple[int, int]] = []

        def credit(x: int) -> None:
            # x just entered the closure; roots that reach x now save w(x)
            wx = int(w[x])
            for v in rin[x]:
                if not assigned[v]:
                    b = benefit.get(v, 0) + wx
                    benefit[v] = b
                    heapq.heappush(heap, (-b, v))

        for x in sorted(closure):
            credit(x)

        while True:
            cand = None
            while heap:
                nb, v = heapq.heappop(heap)
                if not assigned[v] and benefit.get(v) == -nb:
                    cand = v
                    break
            if cand is None:
                break
            fresh = [x for x in [cand] + two[cand].tolist() if x not in closure]
            added = int(w[fresh].sum()) if fresh else 0
            if cost + added > budget:
                break
            assigned[cand] = True
            del benefit[cand]
            group.append(cand)
            cost += added
            closure.update(fresh)
            for x in fresh:
                credit(x)

        over = cost > budget
        if over:
            warnings.warn(
                f"vertex {seed} needs {cost} entries alone, over budget "
                f"{budget}; kept as its own oversize group", RuntimeWarning)
        groups.append(group)
        closures.append(sorted(closure))
        costs.append(cost)
        oversize.append(over)

    return PartitionSet(layer=layer, k=index.k, budget=budget, groups=groups,
                        closures=closures, costs=costs, oversize=oversize)


def closure_subgraph(work: BipartiteGraph, closure, group):
    """Induced subgraph for one group: closure rows plus their whole 1-hop
    fringe, every incident edge kept. Returns (subgraph, anchor ids as an
    array, local root ids).

    `work` must already have the partitioned layer as U.
    """
    anchor = np.asarray(closure, dtype=np.int64)
    m = len(anchor)
    rows = [work.u_adj[int(u)] for u in anchor]
    if m and sum(len(r) for r in rows):
        flat = np.concatenate(rows).astype(np.int64)
        vids = np.unique(flat)
        vmap = np.full(work.v_count, -1, dtype=np.int64)
        vmap[vids] = np.arange(len(vids))
        eu = np.repeat(np.arange(m, dtype=np.int64),
                       [len(r) for r in rows])
        ev = vmap[flat]
    else:
        vids = np.empty(0, dtype=np.int64)
        eu = np.empty(0, dtype=np.int64)
        ev = np.empty(0, dtype=np.int64)
    amap = np.full(work.u_count, -1, dtype=np.int64)
    amap[anchor] = np.arange(m)
    roots_local = amap[np.asarray(group, dtype=np.int64)]
    if np.any(roots_local < 0):
        raise PartitionError("integrity: group member missing from its closure")
    return from_edges(m, len(vids), eu, ev), anchor, roots_local


def count_partitioned(g: BipartiteGraph, parts: PartitionSet, p: int, q: int,
                      cfg: EngineConfig | None = None, *,
                      structures: SearchStructures | None = None) -> CountReport:
    """Count (p,q)-bicliques group by group and sum.

    Each group is counted on its own closure subgraph with the global
    priority order carried in, restricted to the group's roots, so every
    biclique lands in exactly one group's tally. Groups run sequentially;
    the engine's workers are active inside each one. Passing structures
    reuses an already built whole-graph index for the global order.
    """
    cfg = cfg if cfg is not None else EngineConfig()
    cfg.validate()
    choice = select_anchor_layer(g, p, q, force=parts.layer)
    if parts.k != choice.q_eff:
        raise PartitionError(
            f"partition was built on k={parts.k} 2-hop lists but counting "
            f"({p},{q}) anchored on {parts.layer} needs k={choice.q_eff}")
    work = g if parts.layer == "U" else transpose(g)
    n = work.u_count
    flat = (np.concatenate([np.asarray(gr, dtype=np.int64) for gr in parts.groups])
            if parts.groups else np.empty(0, dtype=np.int64))
    if not np.array_equal(np.sort(flat), np.arange(n)):
        raise PartitionError("groups must cover the anchor layer exactly once")

    if structures is not None:
        if (structures.choice.layer != parts.layer
                or structures.choice.q_eff != choice.q_eff):
            raise PartitionError("supplied structures disagree with the partition")
        grank = structures.order.rank
    else:
        und = build_two_hop_index(work, "U", choice.q_eff)
        grank = vertex_priority(work, "U", choice.q_eff, index=und).rank

    sub_cfg = EngineConfig(worker_count=cfg.worker_count,
                           batch_buffer_capacity=cfg.batch_buffer_capacity,
                           mode=cfg.mode, anchor="U",
                           check_nesting=cfg.check_nesting)
    total = 0
    t1 = t2 = wall = 0.0
    batches = stolen = emitted = consumed = filtered = 0
    for group, closure in zip(parts.groups, parts.closures):
        sub, anchor, roots_local = closure_subgraph(work, closure, group)
        ss = prepare_structures(sub, choice.p_eff, choice.q_eff, anchor="U",
                                rank=grank[anchor])
        rep = count_bicliques(sub, choice.p_eff, choice.q_eff, sub_cfg,
                              structures=ss, roots=roots_local.tolist())
        total += rep.count
        t1 += rep.time_1hop
        t2 += rep.time_2hop
        wall += rep.wall_time
        batches += rep.batches_executed
        stolen += rep.tasks_stolen
        emitted += rep.tasks_emitted
        consumed += rep.tasks_consumed
        filtered += rep.roots_filtered

    return CountReport(
        count=total,
        time_1hop=t1,
        time_2hop=t2,
        batches_executed=batches,
        tasks_stolen=stolen,
        roots_filtered=filtered,
        wall_time=wall,
        tasks_emitted=emitted,
        tasks_consumed=consumed,
        workers=cfg.worker_count,
        anchor_layer=parts.layer,
    )


def write_manifest(parts: PartitionSet, path) -> None:
    """Audit dump: one line per group with id, cost, oversize flag, roots."""
    with open(path, "w") as fh:
        fh.write(f"# layer {parts.layer} k {parts.k} budget {parts.budget} "
                 f"groups {parts.group_count}\n")
        fh.write("# group cost oversize roots...\n")
        for i, group in enumerate(parts.groups):
            roots = " ".join(str(u) for u in group)
            fh.write(f"{i} {parts.costs[i]} {int(parts.oversize[i])} {roots}\n")
