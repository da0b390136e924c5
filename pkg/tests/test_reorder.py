import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bicount.graph import from_edges, relabel
from bicount.oracle import brute_force_count
from bicount.reorder import (
    apply_swap,
    border_reorder,
    build_block_matrix,
    count_one_blocks,
    count_one_blocks_per_vertex,
    degree_order,
    swap_profit,
    write_permutation,
)
from helpers import random_bipartite, recon_graph


def test_degree_order_recon():
    # degrees (3,4,3,4): u1 and u3 lead on the tie-break
    perm = degree_order(recon_graph(), "U")
    assert perm.tolist() == [2, 0, 3, 1]


def test_degree_order_uniform_is_identity():
    g = from_edges(3, 3, [0, 1, 2], [0, 1, 2])
    assert degree_order(g, "U").tolist() == [0, 1, 2]


@settings(max_examples=40)
@given(st.integers(0, 2**31 - 1))
def test_degree_order_sequence_non_increasing(seed):
    g = random_bipartite(20, 15, 0.3, seed)
    perm = degree_order(g, "U")
    assert sorted(perm.tolist()) == list(range(20))
    r = relabel(g, perm, np.arange(15))
    degs = r.degrees("U").tolist()
    assert all(degs[i] >= degs[i + 1] for i in range(len(degs) - 1))


def test_single_edge_is_one_block():
    g = from_edges(1, 1, [0], [0])
    m = build_block_matrix(g, "U")
    assert count_one_blocks(m) == 1
    assert count_one_blocks_per_vertex(m).tolist() == [1]


def test_two_bits_same_block_is_two_block():
    # columns 3 and 9 sit in block 0; together on one row they form a 2-block
    g = from_edges(10, 1, [3, 9], [0, 0])
    m = build_block_matrix(g, "U")
    assert count_one_blocks(m) == 0


def test_mask_popcounts_sum_to_edges():
    g = random_bipartite(40, 70, 0.2, 8)
    m = build_block_matrix(g, "V")
    assert sum(w.bit_count() for w in m.blocks.values()) == g.edge_count
    assert all(w != 0 for w in m.blocks.values())


def test_per_vertex_attribution():
    # column 40 alone on row 0; columns 1,2 share row 1's block
    g = from_edges(64, 2, [40, 1, 2], [0, 1, 1])
    m = build_block_matrix(g, "U")
    per = count_one_blocks_per_vertex(m)
    assert per[40] == 1
    assert per[1] == 0 and per[2] == 0
    assert count_one_blocks(m) == per.sum() == 1


def test_swap_profit_self_is_zero():
    g = random_bipartite(40, 10, 0.3, 2)
    m = build_block_matrix(g, "U")
    assert swap_profit(m, 7, 7) == 0


def test_swap_profit_same_block_is_zero():
    g = random_bipartite(40, 10, 0.3, 2)
    m = build_block_matrix(g, "U")
    assert swap_profit(m, 3, 17) == 0  # both inside block 0


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_swap_profit_matches_recount_oracle(seed):
    rng = np.random.default_rng(seed)
    g = random_bipartite(70, 30, 0.15, seed)
    m = build_block_matrix(g, "U")
    before = count_one_blocks(m)
    v_m, v_n = rng.choice(70, size=2, replace=False).tolist()
    profit = swap_profit(m, v_m, v_n)
    apply_swap(m, v_m, v_n)
    after = count_one_blocks(m)
    assert profit == before - after
    # swap back restores the original matrix
    apply_swap(m, v_m, v_n)
    assert count_one_blocks(m) == before


def test_apply_swap_updates_positions():
    g = random_bipartite(70, 30, 0.2, 4)
    m = build_block_matrix(g, "U")
    apply_swap(m, 5, 40)
    assert m.pos[5] == 40 and m.pos[40] == 5
    assert m.colv[40] == 5 and m.colv[5] == 40
    assert sum(w.bit_count() for w in m.blocks.values()) == g.edge_count


def test_border_zero_iterations_identity():
    g = recon_graph()
    res = border_reorder(g, "U", 0)
    assert res.permutation.tolist() == [0, 1, 2, 3]
    m = build_block_matrix(g, "U")
    assert res.one_block_history == [count_one_blocks(m)]


def test_border_rejects_negative_iterations():
    with pytest.raises(ValueError):
        border_reorder(recon_graph(), "U", -1)


def test_border_merges_lone_bits():
    # two isolated bits in different blocks; one swap packs them together
    g = from_edges(64, 1, [0, 32], [0, 0])
    res = border_reorder(g, "U", 10)
    assert res.one_block_history[0] == 2
    assert res.one_block_history[-1] == 0
    assert len(res.one_block_history) == 2  # one profitable swap, then stop


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_border_history_monotone_and_final_recount(seed):
    g = random_bipartite(50, 90, 0.08, seed)
    res = border_reorder(g, "V", 10)
    h = res.one_block_history
    assert all(h[i] >= h[i + 1] for i in range(len(h) - 1))
    assert sorted(res.permutation.tolist()) == list(range(90))
    relabeled = relabel(g, np.arange(50), res.permutation)
    m = build_block_matrix(relabeled, "V")
    assert count_one_blocks(m) == h[-1]


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_border_preserves_biclique_counts(seed):
    g = random_bipartite(12, 12, 0.35, seed)
    res = border_reorder(g, "U", 8)
    r = relabel(g, res.permutation, np.arange(12))
    for p, q in ((2, 2), (3, 2), (2, 3)):
        assert brute_force_count(r, p, q) == brute_force_count(g, p, q)


def test_border_tiny_layers():
    res = border_reorder(from_edges(1, 3, [0, 0], [0, 2]), "U", 5)
    assert res.permutation.tolist() == [0]
    res2 = border_reorder(from_edges(0, 0, [], []), "U", 5)
    assert res2.permutation.tolist() == []


def test_write_permutation(tmp_path):
    p = tmp_path / "perm.txt"
    write_permutation(np.array([2, 0, 1]), p)
    assert p.read_text().splitlines() == ["0 2", "1 0", "2 1"]
