"""Shared test fixtures: the hand-pinned example graph and seeded corpora."""

import numpy as np

from bicount.graph import BipartiteGraph, from_edges

# 4x5 graph reproducing every pinned pairwise-intersection fact:
# shared 1-hop sets u2&u3 -> {v1,v2}, u2&u4 -> {v0,v2,v4}, u3&u4 -> {v2,v3},
# and exactly two (3,2)-bicliques.
RECON_U_NEIGHBORS = [
    [0, 1, 2],
    [0, 1, 2, 4],
    [1, 2, 3],
    [0, 2, 3, 4],
]


def recon_graph() -> BipartiteGraph:
    eu, ev = [], []
    for u, nbrs in enumerate(RECON_U_NEIGHBORS):
        for v in nbrs:
            eu.append(u)
            ev.append(v)
    return from_edges(4, 5, eu, ev)


def random_bipartite(nu: int, nv: int, density: float, seed) -> BipartiteGraph:
    rng = np.random.default_rng(seed)
    mask = rng.random((nu, nv)) < density
    eu, ev = np.nonzero(mask)
    return from_edges(nu, nv, eu, ev)


CORPUS_SEED = 20260822


def corpus300() -> list[BipartiteGraph]:
    """300 seeded graphs, <= 30+30 vertices, density 0.1 to 0.5.

    Layer sizes are resampled until the largest brute-force job the corpus
    faces, (4,4), stays inside the oracle's refusal guard of 1e8 candidate
    pairs; everything in the corpus can therefore be cross-checked exactly.
    """
    from math import comb

    rng = np.random.default_rng(CORPUS_SEED)
    out = []
    while len(out) < 300:
        nu = int(rng.integers(2, 31))
        nv = int(rng.integers(2, 31))
        if comb(nu, 4) * comb(nv, 4) > 10**8:
            continue
        density = float(rng.uniform(0.1, 0.5))
        out.append(random_bipartite(nu, nv, density, rng.integers(0, 2**31)))
    return out
