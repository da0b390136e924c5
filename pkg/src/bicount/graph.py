"""Bipartite graph container, edge-list ingestion, 2-hop index, priority order.

All structures here are built once and shared read-only across workers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LAYERS = ("U", "V")


@dataclass
class BipartiteGraph:
    """Adjacency in both directions; lists are sorted int32 arrays.

    u_orig / v_orig carry the pre-remap ids so results can be traced back
    to the input file. Identity for generated graphs.
    """

    u_adj: list[np.ndarray]
    v_adj: list[np.ndarray]
    u_orig: np.ndarray | None = None
    v_orig: np.ndarray | None = None

    @property
    def u_count(self) -> int:
        return len(self.u_adj)

    @property
    def v_count(self) -> int:
        return len(self.v_adj)

    @property
    def edge_count(self) -> int:
        return sum(len(a) for a in self.u_adj)

    def adj(self, layer: str) -> list[np.ndarray]:
        _check_layer(layer)
        return self.u_adj if layer == "U" else self.v_adj

    def layer_count(self, layer: str) -> int:
        _check_layer(layer)
        return self.u_count if layer == "U" else self.v_count

    def degrees(self, layer: str) -> np.ndarray:
        return np.array([len(a) for a in self.adj(layer)], dtype=np.int64)


@dataclass
class TwoHopIndex:
    """Per-anchor-vertex lists of 2-hop neighbors with >= k shared 1-hop
    neighbors. With directed=True only lower-priority neighbors are kept."""

    k: int
    layer: str
    lists: list[np.ndarray]
    directed: bool

    @property
    def sizes(self) -> np.ndarray:
        return np.array([len(a) for a in self.lists], dtype=np.int64)


@dataclass
class PriorityOrder:
    """rank maps vertex id to its priority in [1, n]; order lists vertices
    from highest priority (rank n) down to rank 1."""

    rank: np.ndarray
    order: np.ndarray


@dataclass
class AnchorChoice:
    layer: str
    p_eff: int
    q_eff: int


def _check_layer(layer: str) -> None:
    if layer not in LAYERS:
        raise ValueError(f"layer must be one of {LAYERS}, got {layer!r}")


def from_edges(u_count: int, v_count: int, eu, ev) -> BipartiteGraph:
    """Build both adjacency views from parallel edge arrays.

    Duplicate edges collapse; lists come out sorted.
    """
    eu = np.asarray(eu, dtype=np.int64)
    ev = np.asarray(ev, dtype=np.int64)
    if eu.shape != ev.shape:
        raise ValueError("edge arrays must have equal length")
    if eu.size:
        if eu.min() < 0 or eu.max() >= u_count:
            raise ValueError("u id out of range")
        if ev.min() < 0 or ev.max() >= v_count:
            raise ValueError("v id out of range")
    key = np.unique(eu * np.int64(v_count) + ev)
    su = (key // v_count).astype(np.int64)
    sv = (key % v_count).astype(np.int64)
    u_adj = _split_adjacency(su, sv.astype(np.int32), u_count)
    rev = np.argsort(sv, kind="stable")
    v_adj = _split_adjacency(sv[rev], su[rev].astype(np.int32), v_count)
    return BipartiteGraph(u_adj, v_adj)


def _split_adjacency(group: np.ndarray, member: np.ndarray, n: int) -> list[np.ndarray]:
    counts = np.bincount(group, minlength=n)
    bounds = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=bounds[1:])
    return [member[bounds[i]:bounds[i + 1]] for i in range(n)]


def load_edge_list(lines) -> BipartiteGraph:
    """Parse an edge-list text stream into a graph with dense per-layer ids.

    Lines starting with '%' or '#' are comments. Each data line holds two
    integer tokens. Ids are remapped in first-appearance order; the original
    ids are kept on the graph for traceability.
    """
    u_map: dict[int, int] = {}
    v_map: dict[int, int] = {}
    eu: list[int] = []
    ev: list[int] = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line[0] in "%#":
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected two tokens, got {len(parts)}")
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise ValueError(f"line {lineno}: non-integer token in {line!r}") from None
        u = u_map.setdefault(a, len(u_map))
        v = v_map.setdefault(b, len(v_map))
        eu.append(u)
        ev.append(v)
    g = from_edges(len(u_map), len(v_map), eu, ev)
    g.u_orig = np.fromiter(u_map.keys(), dtype=np.int64, count=len(u_map))
    g.v_orig = np.fromiter(v_map.keys(), dtype=np.int64, count=len(v_map))
    return g


def write_remap_table(g: BipartiteGraph, path) -> None:
    """Persist the dense-id -> original-id map, one layer per section."""
    with open(path, "w") as f:
        for layer, orig, n in (("U", g.u_orig, g.u_count), ("V", g.v_orig, g.v_count)):
            f.write(f"# layer {layer}\n")
            ids = orig if orig is not None else range(n)
            for dense, old in enumerate(ids):
                f.write(f"{dense} {old}\n")


def transpose(g: BipartiteGraph) -> BipartiteGraph:
    return BipartiteGraph(g.v_adj, g.u_adj, g.v_orig, g.u_orig)


def _check_permutation(perm: np.ndarray, n: int, name: str) -> None:
    if len(perm) != n or not np.array_equal(np.sort(perm), np.arange(n)):
        raise ValueError(f"{name} is not a bijection on [0, {n})")


def relabel(g: BipartiteGraph, perm_u, perm_v) -> BipartiteGraph:
    """Rename vertices: new id of u is perm_u[u]. Adjacency is re-sorted."""
    pu = np.asarray(perm_u, dtype=np.int64)
    pv = np.asarray(perm_v, dtype=np.int64)
    _check_permutation(pu, g.u_count, "perm_u")
    _check_permutation(pv, g.v_count, "perm_v")
    u_adj: list[np.ndarray] = [None] * g.u_count  # type: ignore[list-item]
    for u, nbrs in enumerate(g.u_adj):
        u_adj[pu[u]] = np.sort(pv[nbrs]).astype(np.int32)
    v_adj: list[np.ndarray] = [None] * g.v_count  # type: ignore[list-item]
    for v, nbrs in enumerate(g.v_adj):
        v_adj[pv[v]] = np.sort(pu[nbrs]).astype(np.int32)
    u_orig = None if g.u_orig is None else _permuted_orig(g.u_orig, pu)
    v_orig = None if g.v_orig is None else _permuted_orig(g.v_orig, pv)
    return BipartiteGraph(u_adj, v_adj, u_orig, v_orig)


def _permuted_orig(orig: np.ndarray, perm: np.ndarray) -> np.ndarray:
    out = np.empty_like(orig)
    out[perm] = orig
    return out


def build_two_hop_index(g: BipartiteGraph, layer: str, k: int,
                        order: PriorityOrder | None = None) -> TwoHopIndex:
    """2-hop neighbor lists over one layer, thresholded at k shared 1-hop
    neighbors. With a priority order supplied, keeps only lower-priority
    neighbors (the directed form used for exactly-once rooting)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    _check_layer(layer)
    fwd = g.adj(layer)
    back = g.adj("V" if layer == "U" else "U")
    rank = order.rank if order is not None else None
    lists: list[np.ndarray] = []
    for u, nbrs in enumerate(fwd):
        if len(nbrs) == 0:
            lists.append(np.empty(0, dtype=np.int32))
            continue
        pool = np.concatenate([back[v] for v in nbrs])
        two_hop, hits = np.unique(pool, return_counts=True)
        keep = two_hop[hits >= k]
        keep = keep[keep != u]
        if rank is not None:
            keep = keep[rank[keep] < rank[u]]
        lists.append(keep.astype(np.int32))
    return TwoHopIndex(k, layer, lists, directed=order is not None)


def directed_from_undirected(idx: TwoHopIndex, order: PriorityOrder) -> TwoHopIndex:
    """Filter an undirected index down to lower-priority members only."""
    if idx.directed:
        raise ValueError("index is already directed")
    rank = order.rank
    lists = [lst[rank[lst] < rank[u]] for u, lst in enumerate(idx.lists)]
    return TwoHopIndex(idx.k, idx.layer, lists, directed=True)


def vertex_priority(g: BipartiteGraph, layer: str, k: int,
                    index: TwoHopIndex | None = None) -> PriorityOrder:
    """Priority by ascending |N_2^k|, ties to the smaller id.

    Bigger 2-hop neighborhoods rank lower, so search roots with heavy
    neighborhoods sit late in the order and directed lists stay shallow.
    """
    if index is None:
        index = build_two_hop_index(g, layer, k)
    elif index.directed or index.k != k or index.layer != layer:
        raise ValueError("supplied index does not match (layer, k) undirected")
    sizes = index.sizes
    n = len(sizes)
    order = np.lexsort((np.arange(n), sizes))
    rank = np.empty(n, dtype=np.int64)
    rank[order] = np.arange(n, 0, -1)
    return PriorityOrder(rank, order)


def wedge_mass(g: BipartiteGraph, layer: str) -> int:
    """Sum of C(d, 2) over a layer; the 2-hop construction cost proxy."""
    d = g.degrees(layer)
    return int((d * (d - 1) // 2).sum())


def select_anchor_layer(g: BipartiteGraph, p: int, q: int,
                        force: str | None = None) -> AnchorChoice:
    """Pick the layer that roots the search.

    Heuristic: anchor the layer whose opposite side has the smaller wedge
    mass, since the opposite layer's wedges drive 2-hop index cost. Ties go
    to U. force ("U" or "V") overrides.
    """
    if p < 1 or q < 1:
        raise ValueError("p and q must be >= 1")
    if force is not None:
        _check_layer(force)
        layer = force
    else:
        layer = "U" if wedge_mass(g, "V") <= wedge_mass(g, "U") else "V"
    if layer == "U":
        return AnchorChoice("U", p, q)
    return AnchorChoice("V", q, p)
