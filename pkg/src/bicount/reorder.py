"""Column reordering of one layer to pack adjacency bits into fewer words.

The layer being reordered supplies matrix columns grouped in 32-column
blocks; the other layer supplies rows. A 1-block is a stored word holding
exactly one bit, the wasteful case for bitmap intersections. The greedy
pass repeatedly swaps the worst column toward a partner whose rows mesh,
accepting only swaps that strictly reduce the 1-block total.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from bicount.graph import BipartiteGraph

WORD = 32


@dataclass
class BlockMatrix:
    """Sparse block view: (row, block ordinal) -> nonzero 32-bit mask.

    pos maps a column vertex to its current position, colv is the inverse.
    rows_of keeps each column's row set; row_cols each row's column list.
    """

    n_rows: int
    n_cols: int
    blocks: dict
    pos: np.ndarray
    colv: np.ndarray
    rows_of: list[set]
    row_cols: list[np.ndarray]


@dataclass
class ReorderResult:
    permutation: np.ndarray
    one_block_history: list[int]


def build_block_matrix(g: BipartiteGraph, layer: str) -> BlockMatrix:
    cols_adj = g.adj(layer)
    rows_adj = g.adj("V" if layer == "U" else "U")
    n_cols = len(cols_adj)
    n_rows = len(rows_adj)
    blocks: dict = {}
    for c, rows in enumerate(cols_adj):
        b, j = divmod(c, WORD)
        bit = 1 << j
        for r in rows.tolist():
            key = (r, b)
            blocks[key] = blocks.get(key, 0) | bit
    return BlockMatrix(
        n_rows=n_rows,
        n_cols=n_cols,
        blocks=blocks,
        pos=np.arange(n_cols, dtype=np.int64),
        colv=np.arange(n_cols, dtype=np.int64),
        rows_of=[set(a.tolist()) for a in cols_adj],
        row_cols=rows_adj,
    )


def count_one_blocks(m: BlockMatrix) -> int:
    return sum(1 for w in m.blocks.values() if w.bit_count() == 1)


def count_one_blocks_per_vertex(m: BlockMatrix) -> np.ndarray:
    """1-blocks attributed to the unique column whose bit is set."""
    out = np.zeros(m.n_cols, dtype=np.int64)
    colv = m.colv
    for (r, b), w in m.blocks.items():
        if w.bit_count() == 1:
            out[colv[b * WORD + (w.bit_length() - 1)]] += 1
    return out


def swap_profit(m: BlockMatrix, v_m: int, v_n: int) -> int:
    """1-blocks removed minus created if columns v_m and v_n trade places.

    Only rows where the two columns differ change any word; within one
    block a swap permutes bits without touching popcounts.
    """
    if v_m == v_n:
        return 0
    bm, jm = divmod(int(m.pos[v_m]), WORD)
    bn, jn = divmod(int(m.pos[v_n]), WORD)
    if bm == bn:
        return 0
    bit_m = 1 << jm
    bit_n = 1 << jn
    rows_m = m.rows_of[v_m]
    rows_n = m.rows_of[v_n]
    blocks = m.blocks
    profit = 0
    for r in rows_m ^ rows_n:
        wm = blocks.get((r, bm), 0)
        wn = blocks.get((r, bn), 0)
        if r in rows_m:
            wm2 = wm & ~bit_m
            wn2 = wn | bit_n
        else:
            wm2 = wm | bit_m
            wn2 = wn & ~bit_n
        profit += ((wm.bit_count() == 1) + (wn.bit_count() == 1)
                   - (wm2.bit_count() == 1) - (wn2.bit_count() == 1))
    return profit


def apply_swap(m: BlockMatrix, v_m: int, v_n: int) -> None:
    if v_m == v_n:
        return
    pm, pn = int(m.pos[v_m]), int(m.pos[v_n])
    bm, jm = divmod(pm, WORD)
    bn, jn = divmod(pn, WORD)
    bit_m = 1 << jm
    bit_n = 1 << jn
    blocks = m.blocks
    for r in m.rows_of[v_m] ^ m.rows_of[v_n]:
        if r in m.rows_of[v_m]:
            src, sb, db, dbit = (r, bm), bit_m, (r, bn), bit_n
        else:
            src, sb, db, dbit = (r, bn), bit_n, (r, bm), bit_m
        w = blocks[src] & ~sb
        if w:
            blocks[src] = w
        else:
            del blocks[src]
        blocks[db] = blocks.get(db, 0) | dbit
    m.pos[v_m], m.pos[v_n] = pn, pm
    m.colv[pm], m.colv[pn] = v_n, v_m


def degree_order(g: BipartiteGraph, layer: str) -> np.ndarray:
    """Permutation placing high-degree vertices first, ties by id."""
    deg = g.degrees(layer)
    order = np.lexsort((np.arange(len(deg)), -deg))
    perm = np.empty(len(deg), dtype=np.int64)
    perm[order] = np.arange(len(deg))
    return perm


def border_reorder(g: BipartiteGraph, layer: str, iterations: int) -> ReorderResult:
    """Greedy 1-block reduction by column swaps.

    Each round: take the column owning the most 1-blocks, gather the
    columns overlapping it on the fewest rows, and swap with the partner
    of highest positive profit. Stops early when no swap helps.
    """
    if iterations < 0:
        raise ValueError("iterations must be >= 0")
    m = build_block_matrix(g, layer)
    total = count_one_blocks(m)
    history = [total]
    if m.n_cols < 2:
        return ReorderResult(permutation=m.pos.copy(), one_block_history=history)
    for _ in range(iterations):
        per_vertex = count_one_blocks_per_vertex(m)
        v_m = int(per_vertex.argmax())
        overlap = _row_overlap(m, v_m)
        overlap[v_m] = np.iinfo(np.int64).max
        floor = overlap.min()
        best_profit = 0
        best = -1
        for v_n in np.flatnonzero(overlap == floor).tolist():
            profit = swap_profit(m, v_m, v_n)
            if profit > best_profit:
                best_profit = profit
                best = v_n
        if best < 0:
            break
        apply_swap(m, v_m, best)
        total -= best_profit
        history.append(total)
    return ReorderResult(permutation=m.pos.copy(), one_block_history=history)


def _row_overlap(m: BlockMatrix, v_m: int) -> np.ndarray:
    """Common-row counts between column v_m and every other column."""
    rows = m.rows_of[v_m]
    if not rows:
        return np.zeros(m.n_cols, dtype=np.int64)
    stacked = np.concatenate([m.row_cols[r] for r in rows])
    return np.bincount(stacked, minlength=m.n_cols).astype(np.int64)


def write_permutation(perm, path) -> None:
    """Two columns per line: old id, new id."""
    with open(path, "w") as f:
        for old, new in enumerate(perm):
            f.write(f"{old} {new}\n")
