from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from treeembed.embedding import Embedding, attachments, embed_microtree, embed_seeds, greedy_embed
from treeembed.errors import EmbedFailure, PreconditionError
from treeembed.fixtures import min_degree_host, random_pair_host, seed_level_tree
from treeembed.graph import complete, complete_bipartite, disjoint_union, make_rng
from treeembed.trees import Tree, bounded_degree_tree, path_tree, sample_labelled_tree
from treeembed.counting import enumerate_free_trees
from treeembed.validate import validate_embedding

D = Fraction(1, 4)
EPS = Fraction(1, 100)
TEPS = Fraction(1, 10)


def pair_host(m, p, seed, clusters=3):
    pairs = [(0, 1), (0, 2), (1, 2)] if clusters == 3 else [(0, 1)]
    return random_pair_host([m] * clusters, pairs, p, seed)


def seven_path_tree() -> Tree:
    """Path 0..6 with seeds 7 and 8 hanging off vertices 1 and 5 (attachment distance 4)."""
    return Tree.from_edges(9, [(7, 1), (8, 5)] + [(i, i + 1) for i in range(6)], root=7)


# -- greedy -------------------------------------------------------------------------


def test_greedy_into_complete():
    for t in enumerate_free_trees(6):
        phi = greedy_embed(t, complete(6))
        assert validate_embedding(t, complete(6), phi.map, require_total=True).ok


def test_greedy_path_and_sweep():
    for seed in range(50):
        g = min_degree_host(80, 50, 0.3, seed)
        for t in (path_tree(51), sample_labelled_tree(51, seed)):
            phi = greedy_embed(t, g)
            assert validate_embedding(t, g, phi.map, require_total=True).ok


def test_greedy_refuses_low_min_degree():
    with pytest.raises(PreconditionError, match="min degree"):
        greedy_embed(path_tree(5), complete(4))


# -- seeds ----------------------------------------------------------------------------


def test_seeds_complete_clusters():
    g = complete_bipartite(100, 100)
    t, part = seed_level_tree(0)
    phi = embed_seeds(t, part, g, range(100), range(100, 200), [], 1, EPS)
    assert validate_embedding(t, g, phi.map).ok
    assert set(phi.map) == set(part.W) | {next(iter(K)) for K in part.D_doubleprime}


def test_seeds_random_clusters():
    for seed in range(20):
        g, cl = pair_host(400, 0.3, seed, clusters=2)
        t, part = seed_level_tree(seed)
        assert len(part.W) == 15 and len(part.D_doubleprime) == 5
        U = [int(x) for x in make_rng(seed).choice(cl[0], 10, replace=False)]
        phi = embed_seeds(t, part, g, cl[0], cl[1], U, D, EPS, typical_eps=TEPS)
        assert validate_embedding(t, g, phi.map).ok
        for w in part.W:
            assert phi[w] in cl[0] and phi[w] not in U
        for K in part.D_doubleprime:
            assert phi[next(iter(K))] in cl[1]


def test_seeds_budget_violation():
    g, cl = pair_host(40, 0.3, 1, clusters=2)
    t, part = seed_level_tree(1)
    with pytest.raises(PreconditionError, match="exceeds"):
        embed_seeds(t, part, g, cl[0], cl[1], [], D, EPS)
    log: list[str] = []
    with pytest.raises(EmbedFailure):
        embed_seeds(t, part, g, cl[0], cl[1], cl[0][:30], D, EPS, strict=False, log=log, search_budget=0)
    assert log


def test_seeds_repeated_extension_never_collides():
    g, cl = pair_host(400, 0.3, 7, clusters=2)
    phi = Embedding()
    offset = 0
    for seed in range(4):
        t, part = seed_level_tree(seed)
        # relabel the tree's vertices into a disjoint id range so the maps can share one Embedding
        shift = {x: x + offset for x in range(t.n)}
        big = Tree([-1 if p < 0 else p for p in t.parent])
        sub = Embedding()
        sub.used = phi.used
        embed_seeds(big, part, g, cl[0], cl[1], [], D, EPS, typical_eps=TEPS, phi=sub)
        for x, h in sub.items():
            phi.assign(shift[x], h)
        offset += t.n
    images = list(phi.map.values())
    assert len(images) == len(set(images))


# -- microtrees -----------------------------------------------------------------------


def test_microtree_single_vertex_on_complete_pair():
    g = complete_bipartite(30, 60)
    u, v = list(range(30, 60)), list(range(30))  # u and v are the two sides; anchor lives beyond
    host = disjoint_union(g, complete(1))
    t = Tree.from_edges(2, [(0, 1)], root=1)
    # anchor 0 is in v's side of the bipartite graph and adjacent to all of u
    phi = Embedding({1: 0})
    embed_microtree(t, [0], g, u, v[1:], [0], [0], [], 1, EPS, phi=phi)
    assert phi[0] in u
    assert host.n == 91


def test_microtree_path_of_seven_sweep():
    t = seven_path_tree()
    for seed in range(200):
        g, cl = pair_host(500, 0.3, seed)
        rng = make_rng(seed)
        a1, a2 = (int(x) for x in rng.choice(cl[0], 2, replace=False))
        phi = Embedding({7: a1, 8: a2})
        embed_microtree(t, range(7), g, cl[1], cl[2], [a1, a2], [1, 5], [], D, EPS, phi=phi, typical_eps=TEPS)
        assert validate_embedding(t, g, phi.map, require_total=True).ok
        # attachment class goes to u, the other class to v
        for x in range(7):
            assert (phi[x] in cl[1]) == (t.colour[x] == t.colour[1])


def test_microtree_crowded_u_is_a_precondition_error():
    g, cl = pair_host(100, 0.3, 3)
    t = seven_path_tree()
    keep = 3 * 10 * 100 // 100 - 1  # fewer than 4 sqrt(eps)|u| = 40 free vertices
    U = cl[1][keep:]
    with pytest.raises(PreconditionError):
        embed_microtree(t, range(7), g, cl[1], cl[2], [cl[0][0], cl[0][1]], [1, 5], U, D, EPS,
                        phi=Embedding({7: cl[0][0], 8: cl[0][1]}))


def test_microtree_bad_attachments():
    g, cl = pair_host(50, 0.5, 0)
    t = seven_path_tree()
    phi = Embedding({7: cl[0][0], 8: cl[0][1]})
    with pytest.raises(PreconditionError):
        embed_microtree(t, range(7), g, cl[1], cl[2], [cl[0][0]], [1, 5], [], D, EPS, phi=phi)
    with pytest.raises(PreconditionError):
        embed_microtree(t, range(7), g, cl[1], cl[2], [cl[0][0], cl[0][1]], [1, 4], [], D, EPS, phi=phi)
    with pytest.raises(PreconditionError):
        embed_microtree(t, [0, 1, 3], g, cl[1], cl[2], [cl[0][0]], [1], [], D, EPS, phi=phi)


def test_fixture_microtrees_after_seeds():
    for seed in range(20):
        g, cl = random_pair_host([400] * 4, [(0, 1), (0, 2), (2, 3)], 0.3, seed)
        t, part = seed_level_tree(seed)
        phi = embed_seeds(t, part, g, cl[0], cl[1], [], D, EPS, typical_eps=TEPS)
        for K in part.D_prime:
            att = attachments(t, K, part.W)
            embed_microtree(t, K, g, cl[2], cl[3], [phi[w] for w, _ in att], [x for _, x in att], [], D, EPS,
                            phi=phi, typical_eps=TEPS)
        assert validate_embedding(t, g, phi.map, require_total=True).ok


# -- properties -----------------------------------------------------------------------


def _succeeds(fn) -> bool:
    try:
        fn()
    except EmbedFailure:
        return False
    return True


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31), st.floats(0.08, 0.3))
def test_seed_failure_is_monotone_in_U(seed, p):
    g, cl = random_pair_host([40, 40], [(0, 1)], p, seed)
    t, part = seed_level_tree(seed, stars=3, per_star=3, pendants=3)
    order = [int(x) for x in make_rng(seed).permutation(cl[0])]
    failed = False
    for size in range(0, 36, 4):
        stats: dict = {}
        ok = _succeeds(lambda: embed_seeds(t, part, g, cl[0], cl[1], order[:size], 0, Fraction(1, 4),
                                           strict=False, stats=stats))
        assert stats.get("search") != "budget exhausted"
        assert not (failed and ok)
        failed |= not ok


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31), st.floats(0.08, 0.3))
def test_microtree_failure_is_monotone_in_U(seed, p):
    g, cl = random_pair_host([30, 30, 30], [(0, 1), (1, 2)], p, seed)
    t = seven_path_tree()
    rng = make_rng(seed)
    a1, a2 = (int(x) for x in rng.choice(cl[0], 2, replace=False))
    order = [int(x) for x in rng.permutation(cl[1] + cl[2])]
    failed = False
    for size in range(0, 40, 4):
        stats: dict = {}
        phi = Embedding({7: a1, 8: a2})
        ok = _succeeds(lambda: embed_microtree(t, range(7), g, cl[1], cl[2], [a1, a2], [1, 5], order[:size], 0,
                                               Fraction(1, 100), phi=phi, strict=False, stats=stats))
        assert stats.get("search") != "budget exhausted"
        if ok:
            assert validate_embedding(t, g, phi.map, require_total=True).ok
        else:
            assert set(phi.map) == {7, 8}
        assert not (failed and ok)
        failed |= not ok


@settings(max_examples=80, deadline=None)
@given(st.integers(2, 30), st.integers(2, 6), st.integers(0, 2**31))
def test_greedy_results_validate(n, dmax, seed):
    t = bounded_degree_tree(n, dmax, seed)
    g = min_degree_host(n + 5, n - 1, 0.2, seed)
    phi = greedy_embed(t, g)
    assert validate_embedding(t, g, phi.map, require_total=True).ok
    assert np.unique(list(phi.map.values())).size == n
