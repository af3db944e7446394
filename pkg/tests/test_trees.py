from __future__ import annotations

import itertools
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from treeembed.constructions import broom_tree
from treeembed.counting import (canonical_form, enumerate_free_trees, otter_counts, sample_unlabelled_tree)
from treeembed.errors import PreconditionError
from treeembed.graph import make_rng
from treeembed.trees import (Tree, bounded_degree_tree, centroid, component_sizes_without, is_balanced, path_tree,
                             sample_labelled_tree, star_tree, tree_distance)

labelled = st.builds(sample_labelled_tree, st.integers(1, 40), st.integers(0, 2**31))


def test_distance_examples():
    p5 = path_tree(5)
    assert tree_distance(p5, 0, 4) == 4
    assert tree_distance(p5, 2, 2) == 0
    assert tree_distance(star_tree(4), 0, 3) == 1
    with pytest.raises(PreconditionError):
        tree_distance(p5, 0, 9)


def test_centroid_examples():
    assert centroid(path_tree(5)) == {2}
    assert centroid(path_tree(4)) == {1, 2}
    assert centroid(broom_tree(12)) == {0}


def test_balanced_examples():
    assert is_balanced(star_tree(12))
    assert is_balanced(path_tree(13))
    assert not is_balanced(broom_tree(12))
    with pytest.raises(PreconditionError):
        is_balanced(path_tree(4))


def test_otter_checkpoints():
    c = otter_counts(16)
    assert c.free[7] == 11
    assert c.free[13] == 1301
    assert c.rooted[1] == c.rooted[2] == 1
    assert all(s <= r for s, r in zip(c.free[1:], c.rooted[1:]))
    assert all(x > 0 for x in c.free[1:])


def test_enumeration_examples():
    assert len(list(enumerate_free_trees(4))) == 2
    assert len(list(enumerate_free_trees(7))) == 11
    (single,) = list(enumerate_free_trees(1))
    assert single.n == 1
    with pytest.raises(PreconditionError):
        list(enumerate_free_trees(40))


@pytest.mark.parametrize("n", range(1, 11))
def test_enumeration_has_no_isomorphic_pairs(n):
    forms = [canonical_form(t) for t in enumerate_free_trees(n)]
    assert len(forms) == len(set(forms)) == otter_counts(n).free[n]


def test_samplers_examples():
    assert sample_unlabelled_tree(2, 0).n == 2
    t3 = sample_unlabelled_tree(3, 5)
    assert sorted(t3.degree(v) for v in range(3)) == [1, 1, 2]
    assert bounded_degree_tree(1000, 5, 4).max_degree() <= 5
    a, b = sample_labelled_tree(8, 11), sample_labelled_tree(8, 11)
    assert a.parent == b.parent
    with pytest.raises(PreconditionError):
        bounded_degree_tree(10, 1, 0)


def test_unlabelled_sampler_is_uniform_at_seven():
    """Chi-square over the 11 classes; 10 degrees of freedom, 0.1% critical value 29.59."""
    classes = {canonical_form(t) for t in enumerate_free_trees(7)}
    rng = make_rng(2024)
    samples = 100_000
    counts = Counter(canonical_form(sample_unlabelled_tree(7, rng)) for _ in range(samples))
    assert set(counts) == classes
    expected = samples / len(classes)
    chi2 = sum((counts[c] - expected) ** 2 / expected for c in classes)
    assert chi2 < 29.59
    sigma = (expected * (1 - 1 / len(classes))) ** 0.5
    assert all(abs(counts[c] - expected) <= 4 * sigma for c in classes)


@pytest.mark.parametrize("n", [8, 10])
def test_unlabelled_sampler_hits_every_class(n):
    classes = {canonical_form(t) for t in enumerate_free_trees(n)}
    rng = make_rng(n)
    seen = {canonical_form(sample_unlabelled_tree(n, rng)) for _ in range(40 * len(classes))}
    assert seen == classes


def test_balanced_count_bound():
    """Balanced trees on k+1 vertices number at most r_{k/2+1} squared."""
    c = otter_counts(17)
    for k in range(2, 17, 2):
        balanced = sum(1 for t in enumerate_free_trees(k + 1) if is_balanced(t))
        assert balanced <= c.rooted[k // 2 + 1] ** 2


@settings(max_examples=200, deadline=None)
@given(labelled, st.data())
def test_recolouring_from_any_root(t, data):
    root = data.draw(st.integers(0, t.n - 1))
    r = t.rerooted(root)
    same = all(r.colour[v] == t.colour[v] for v in range(t.n))
    flipped = all(r.colour[v] != t.colour[v] for v in range(t.n))
    assert same or flipped
    assert len(t.colour_class(0)) + len(t.colour_class(1)) == t.n
    assert all(t.colour[a] != t.colour[b] for a, b in t.edges())


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 10), st.integers(0, 2**31))
def test_centroid_minimises_largest_component(n, seed):
    t = sample_labelled_tree(n, seed)
    worst = [max(component_sizes_without(t, v), default=0) for v in range(n)]
    best = min(worst)
    assert centroid(t) == {v for v in range(n) if worst[v] == best}


def _balanced_by_subsets(t: Tree) -> bool:
    if t.n == 1:
        return True
    (c,) = centroid(t)
    sizes = component_sizes_without(t, c)
    half = (t.n - 1) // 2
    return any(sum(sub) == half for r in range(len(sizes) + 1) for sub in itertools.combinations(sizes, r))


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 8), st.integers(0, 2**31))
def test_is_balanced_matches_subset_oracle(h, seed):
    t = sample_labelled_tree(2 * h + 1, seed)
    assert is_balanced(t) == _balanced_by_subsets(t)


@settings(max_examples=100, deadline=None)
@given(labelled)
def test_parent_line_round_trip(t):
    back = Tree.from_parent_line(t.to_parent_line())
    assert back.parent == t.parent
