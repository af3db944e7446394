from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from treeembed import graph6
from treeembed.constructions import two_clique_host
from treeembed.errors import EmptyGraphError, Graph6Error, PreconditionError
from treeembed.graph import (Graph, complete, complete_bipartite, degree_stats, empty, extract_denser_subgraph,
                             make_rng, pair_density, parse_edge_list, format_edge_list, path, prune_min_degree,
                             random_gnp, star)


def random_graph(draw_n, p, seed) -> Graph:
    return random_gnp(draw_n, p, seed)


graphs = st.builds(random_graph, st.integers(1, 40), st.floats(0.0, 1.0), st.integers(0, 2**31))


def test_degree_stats_examples():
    assert degree_stats(complete(4)) == (3, 3, 3)
    assert degree_stats(path(4)) == (1, 2, Fraction(3, 2))
    assert degree_stats(two_clique_host(12))[1] == 12
    with pytest.raises(EmptyGraphError):
        degree_stats(empty(0))


def test_pair_density_examples():
    g = complete_bipartite(2, 2)
    assert pair_density(g, [0, 1], [2, 3])[1] == 1
    assert pair_density(empty(4), [0, 1], [2, 3])[1] == 0
    edges = "\n".join(f"{i} {i + 8}" for i in range(8))
    m = parse_edge_list(edges)
    assert pair_density(m, range(8), range(8, 16))[1] == Fraction(1, 8)
    with pytest.raises(PreconditionError):
        pair_density(g, [], [1])
    with pytest.raises(PreconditionError):
        pair_density(g, [0, 1], [1, 2])


def test_prune_examples():
    assert prune_min_degree(path(4), 2).n == 0
    k5 = prune_min_degree(complete(5), 4)
    assert k5.n == 5 and k5.num_edges == 10
    g = random_gnp(20, 0.9, 3)
    h = prune_min_degree(g, 10)
    assert h.n > 0 and degree_stats(h)[0] >= 10


def test_extract_denser_examples():
    k10 = extract_denser_subgraph(complete(10), 8, 1)
    assert k10.n == 10 and k10.num_edges == 45
    g = random_gnp(200, 0.6, 5)
    h = extract_denser_subgraph(g, 100, 10)
    mn, _, avg = degree_stats(h)
    assert avg >= 110 and 2 * mn >= 110
    assert extract_denser_subgraph(star(9), 0, 1).n > 0
    with pytest.raises(PreconditionError, match="average degree"):
        extract_denser_subgraph(path(5), 4, 1)


def test_generators():
    assert complete(4).num_edges == 6
    kb = complete_bipartite(3, 5)
    assert kb.num_edges == 15
    assert not any(kb.has_edge(u, v) for u in range(3) for v in range(3) if u != v)
    assert random_gnp(100, 0.5, 1).masks == random_gnp(100, 0.5, 1).masks


def test_graph6_examples():
    k3 = graph6.decode(graph6.encode(complete(3)))
    assert k3.masks == complete(3).masks
    one = graph6.decode("@")
    assert one.n == 1 and one.num_edges == 0
    with pytest.raises(Graph6Error):
        graph6.decode("D~")  # truncated bit string
    with pytest.raises(Graph6Error):
        graph6.decode("\x10abc")


def test_edge_list_round_trip():
    g = random_gnp(15, 0.4, 9)
    assert parse_edge_list(format_edge_list(g)).masks == g.masks


def test_graph_rejects_loops_and_asymmetry():
    with pytest.raises(PreconditionError):
        Graph.from_masks([0b1])
    with pytest.raises(PreconditionError):
        Graph.from_masks([0b10, 0])


@settings(max_examples=200, deadline=None)
@given(graphs)
def test_adjacency_symmetric(g):
    for v in range(g.n):
        assert not (g.adj_mask(v) >> v) & 1
        for u in g.neighbors(v):
            assert g.has_edge(u, v)


@settings(max_examples=100, deadline=None)
@given(graphs, st.integers(0, 10), st.integers(0, 2**31))
def test_prune_confluent_and_idempotent(g, t, seed):
    """Deleting low-degree vertices in any random order reaches the same core."""
    core = prune_min_degree(g, t)
    again = prune_min_degree(core, t)
    assert again.n == core.n
    rng = make_rng(seed)
    alive = set(range(g.n))
    while True:
        low = [v for v in alive if sum(1 for u in g.neighbors(v) if u in alive) < t]
        if not low:
            break
        alive.discard(low[int(rng.integers(len(low)))])
    assert core.n == len(alive)
    if core.n:
        assert sorted(core.parent_ids) == sorted(alive)
        assert degree_stats(core)[0] >= t


@settings(max_examples=100, deadline=None)
@given(graphs, st.integers(1, 10))
def test_dense_graph_has_min_degree_core(g, k):
    if g.n and Fraction(2 * g.num_edges, g.n) >= 2 * k:
        assert prune_min_degree(g, k).n > 0


@settings(max_examples=1000, deadline=None)
@given(st.integers(0, 62), st.floats(0.0, 1.0), st.integers(0, 2**31))
def test_graph6_round_trip(n, p, seed):
    g = random_gnp(n, p, seed)
    assert graph6.decode(graph6.encode(g)).masks == g.masks
