import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bicount.graph import (
    build_two_hop_index,
    directed_from_undirected,
    from_edges,
    load_edge_list,
    relabel,
    select_anchor_layer,
    transpose,
    vertex_priority,
    wedge_mass,
    write_remap_table,
)
from helpers import RECON_U_NEIGHBORS, random_bipartite, recon_graph


def two_hop_oracle(g, layer, k):
    adj = [set(a.tolist()) for a in g.adj(layer)]
    n = len(adj)
    return [
        sorted(w for w in range(n) if w != u and len(adj[u] & adj[w]) >= k)
        for u in range(n)
    ]


def test_load_tiny():
    g = load_edge_list(io.StringIO("0 0\n0 1\n1 1"))
    assert g.u_count == 2 and g.v_count == 2 and g.edge_count == 3


def test_load_collapses_duplicates():
    g = load_edge_list(io.StringIO("0 0\n0 0"))
    assert g.edge_count == 1


def test_load_skips_comments_and_blanks():
    g = load_edge_list(io.StringIO("% header\n# note\n\n0 0\n1 0"))
    assert g.edge_count == 2


def test_load_remaps_first_appearance():
    g = load_edge_list(io.StringIO("5 9\n3 9\n5 7"))
    assert g.u_orig.tolist() == [5, 3]
    assert g.v_orig.tolist() == [9, 7]
    assert g.u_adj[0].tolist() == [0, 1]
    assert g.u_adj[1].tolist() == [0]


def test_load_reports_line_numbers():
    with pytest.raises(ValueError, match="line 2"):
        load_edge_list(io.StringIO("0 0\n0 1 2"))
    with pytest.raises(ValueError, match="line 3"):
        load_edge_list(io.StringIO("0 0\n1 1\nx 2"))


def test_load_empty_accepted():
    g = load_edge_list(io.StringIO("# nothing\n"))
    assert g.u_count == 0 and g.v_count == 0 and g.edge_count == 0


def test_recon_degrees():
    g = recon_graph()
    assert g.degrees("U").tolist() == [3, 4, 3, 4]
    assert g.degrees("V").tolist() == [3, 3, 4, 2, 2]


def test_recon_adjacency_matches_pinned_sets():
    g = recon_graph()
    assert [a.tolist() for a in g.u_adj] == RECON_U_NEIGHBORS


def test_from_edges_rejects_out_of_range():
    with pytest.raises(ValueError):
        from_edges(2, 2, [0, 2], [0, 0])
    with pytest.raises(ValueError):
        from_edges(2, 2, [0], [-1])


def test_write_remap_table(tmp_path):
    g = load_edge_list(io.StringIO("5 9\n3 9"))
    p = tmp_path / "remap.txt"
    write_remap_table(g, p)
    lines = p.read_text().splitlines()
    assert lines == ["# layer U", "0 5", "1 3", "# layer V", "0 9"]


def test_transpose_involution():
    g = recon_graph()
    t = transpose(transpose(g))
    assert [a.tolist() for a in t.u_adj] == [a.tolist() for a in g.u_adj]
    assert transpose(g).edge_count == g.edge_count
    assert transpose(g).degrees("U").tolist() == g.degrees("V").tolist()


def test_relabel_identity():
    g = recon_graph()
    r = relabel(g, np.arange(4), np.arange(5))
    assert [a.tolist() for a in r.u_adj] == [a.tolist() for a in g.u_adj]


def test_relabel_rejects_non_bijection():
    g = recon_graph()
    with pytest.raises(ValueError):
        relabel(g, [0, 0, 1, 2], np.arange(5))
    with pytest.raises(ValueError):
        relabel(g, np.arange(4), np.arange(4))


@settings(max_examples=50)
@given(st.integers(0, 2**31 - 1))
def test_relabel_preserves_degree_multiset(seed):
    g = random_bipartite(8, 9, 0.3, seed)
    rng = np.random.default_rng(seed + 1)
    r = relabel(g, rng.permutation(8), rng.permutation(9))
    assert sorted(r.degrees("U").tolist()) == sorted(g.degrees("U").tolist())
    assert sorted(r.degrees("V").tolist()) == sorted(g.degrees("V").tolist())


def test_relabel_tracks_orig_ids():
    g = load_edge_list(io.StringIO("5 9\n3 9\n3 7"))
    r = relabel(g, [1, 0], [0, 1])
    assert r.u_orig.tolist() == [3, 5]
    # neighbor sets follow the renamed vertices
    assert r.u_adj[1].tolist() == [0]  # old u0 (orig 5) now id 1


def test_two_hop_recon_example():
    g = recon_graph()
    idx = build_two_hop_index(g, "U", 2)
    assert [l.tolist() for l in idx.lists] == [[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]]
    # witnessing shared 1-hop sets
    adj = [set(a.tolist()) for a in g.u_adj]
    assert adj[1] & adj[2] == {1, 2}
    assert adj[1] & adj[3] == {0, 2, 4}
    assert adj[2] & adj[3] == {2, 3}


def test_two_hop_threshold_above_max_degree():
    g = recon_graph()
    idx = build_two_hop_index(g, "U", 5)
    assert all(len(l) == 0 for l in idx.lists)


def test_two_hop_rejects_bad_k():
    with pytest.raises(ValueError):
        build_two_hop_index(recon_graph(), "U", 0)


@settings(max_examples=60)
@given(st.integers(0, 2**31 - 1), st.integers(1, 4))
def test_two_hop_matches_pairwise_oracle(seed, k):
    g = random_bipartite(10, 10, 0.35, seed)
    idx = build_two_hop_index(g, "U", k)
    assert [l.tolist() for l in idx.lists] == two_hop_oracle(g, "U", k)


def test_two_hop_both_layers():
    g = recon_graph()
    idx = build_two_hop_index(g, "V", 2)
    assert [l.tolist() for l in idx.lists] == two_hop_oracle(g, "V", 2)


def test_two_hop_isolated_vertex():
    g = from_edges(3, 2, [0, 1], [0, 0])
    idx = build_two_hop_index(g, "U", 1)
    assert idx.lists[2].tolist() == []
    assert idx.lists[0].tolist() == [1]


def test_priority_recon():
    g = recon_graph()
    order = vertex_priority(g, "U", 2)
    # all 2-hop sizes equal 3, ties fall to id order
    assert order.order.tolist() == [0, 1, 2, 3]
    assert order.rank.tolist() == [4, 3, 2, 1]


def test_priority_isolated_layer_is_id_order():
    g = from_edges(5, 3, [], [])
    order = vertex_priority(g, "U", 1)
    assert order.order.tolist() == [0, 1, 2, 3, 4]
    assert order.rank.tolist() == [5, 4, 3, 2, 1]


@settings(max_examples=40)
@given(st.integers(0, 2**31 - 1))
def test_priority_pairwise_definition(seed):
    g = random_bipartite(20, 12, 0.3, seed)
    idx = build_two_hop_index(g, "U", 2)
    order = vertex_priority(g, "U", 2, index=idx)
    sizes = idx.sizes
    rank = order.rank
    assert sorted(rank.tolist()) == list(range(1, 21))  # bijection onto [1, n]
    for u in range(20):
        for w in range(20):
            if sizes[u] < sizes[w]:
                assert rank[u] > rank[w]
            elif sizes[u] == sizes[w] and u < w:
                assert rank[u] > rank[w]


def test_priority_rejects_mismatched_index():
    g = recon_graph()
    idx = build_two_hop_index(g, "U", 1)
    with pytest.raises(ValueError):
        vertex_priority(g, "U", 2, index=idx)


@settings(max_examples=40)
@given(st.integers(0, 2**31 - 1))
def test_directed_index_two_routes_agree(seed):
    g = random_bipartite(12, 12, 0.3, seed)
    und = build_two_hop_index(g, "U", 2)
    order = vertex_priority(g, "U", 2, index=und)
    a = build_two_hop_index(g, "U", 2, order=order)
    b = directed_from_undirected(und, order)
    assert [x.tolist() for x in a.lists] == [x.tolist() for x in b.lists]
    # strictly lower priority members only
    for u, lst in enumerate(a.lists):
        assert all(order.rank[w] < order.rank[u] for w in lst)


def test_anchor_symmetric_tie_goes_to_u():
    g = from_edges(2, 2, [0, 0, 1, 1], [0, 1, 0, 1])
    choice = select_anchor_layer(g, 3, 3)
    assert choice.layer == "U" and (choice.p_eff, choice.q_eff) == (3, 3)


def test_anchor_star_picks_lighter_opposite():
    # hub in U: opposite layer V is all degree 1, wedge mass 0
    n = 6
    g = from_edges(1, n, [0] * n, list(range(n)))
    assert wedge_mass(g, "U") == n * (n - 1) // 2
    assert wedge_mass(g, "V") == 0
    assert select_anchor_layer(g, 2, 3).layer == "U"
    # hub in V: now U is the all-degree-1 side, so V anchors
    t = transpose(g)
    choice = select_anchor_layer(t, 2, 3)
    assert choice.layer == "V"
    assert (choice.p_eff, choice.q_eff) == (3, 2)


def test_anchor_force_override():
    g = from_edges(1, 6, [0] * 6, list(range(6)))
    forced = select_anchor_layer(g, 2, 3, force="V")
    assert forced.layer == "V" and (forced.p_eff, forced.q_eff) == (3, 2)


def test_anchor_rejects_bad_pq():
    with pytest.raises(ValueError):
        select_anchor_layer(recon_graph(), 0, 1)
