"""Ground-truth biclique counters, kept structurally independent of the
search engine: subset recursion over one layer plus closed-form formulas.
"""

from __future__ import annotations

from collections import Counter
from itertools import combinations
from math import comb

from bicount.graph import BipartiteGraph

PAIR_GUARD = 10**8
ENUM_GUARD = 10**6


def _check_pq(p: int, q: int) -> None:
    if p < 1 or q < 1:
        raise ValueError("p and q must be >= 1")


def _guard(g: BipartiteGraph, p: int, q: int) -> None:
    pairs = comb(g.u_count, p) * comb(g.v_count, q)
    if pairs > PAIR_GUARD:
        raise ValueError(
            f"refusing brute force: C({g.u_count},{p}) * C({g.v_count},{q}) "
            f"= {pairs} candidate pairs exceeds guard {PAIR_GUARD}"
        )


def brute_force_count(g: BipartiteGraph, p: int, q: int) -> int:
    """Exact (p,q)-biclique count by recursing over p-subsets of U.

    The common neighborhood shrinks monotonically along a subset chain, so
    branches with fewer than q shared neighbors are cut without loss.
    """
    _check_pq(p, q)
    _guard(g, p, q)
    if p > g.u_count or q > g.v_count:
        return 0
    adj = [frozenset(a.tolist()) for a in g.u_adj]
    n = g.u_count
    total = 0

    def rec(start: int, depth: int, common):
        nonlocal total
        if depth == p:
            total += comb(len(common), q)
            return
        for u in range(start, n - (p - depth) + 1):
            c = adj[u] if common is None else common & adj[u]
            if len(c) >= q:
                rec(u + 1, depth + 1, c)

    rec(0, 0, None)
    return total


def closed_form_count(g: BipartiteGraph, p: int, q: int):
    """Analytic count where one exists, else None.

    (1,q): sum of C(d(u), q) over U. (p,1): sum of C(d(v), p) over V.
    (2,2): sum over U-pairs of C(shared neighbor count, 2), accumulated
    from wedges centered in V.
    """
    _check_pq(p, q)
    if p == 1:
        return sum(comb(len(a), q) for a in g.u_adj)
    if q == 1:
        return sum(comb(len(a), p) for a in g.v_adj)
    if p == 2 and q == 2:
        shared: Counter = Counter()
        for nbrs in g.v_adj:
            lst = nbrs.tolist()
            for i in range(len(lst)):
                for j in range(i + 1, len(lst)):
                    shared[lst[i], lst[j]] += 1
        return sum(comb(c, 2) for c in shared.values())
    return None


def enumerate_bicliques(g: BipartiteGraph, p: int, q: int) -> list[tuple[tuple, tuple]]:
    """All (L, R) pairs in lexicographic order; refuses above 10^6 results."""
    _check_pq(p, q)
    count = brute_force_count(g, p, q)
    if count > ENUM_GUARD:
        raise ValueError(f"refusing enumeration: {count} results exceeds guard {ENUM_GUARD}")
    adj = [frozenset(a.tolist()) for a in g.u_adj]
    n = g.u_count
    out: list[tuple[tuple, tuple]] = []
    left: list[int] = []

    def rec(start: int, common):
        if len(left) == p:
            for right in combinations(sorted(common), q):
                out.append((tuple(left), right))
            return
        for u in range(start, n - (p - len(left)) + 1):
            c = adj[u] if common is None else common & adj[u]
            if len(c) >= q:
                left.append(u)
                rec(u + 1, c)
                left.pop()

    rec(0, None)
    return out
