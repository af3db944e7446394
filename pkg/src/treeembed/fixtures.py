"""Synthetic trees and hosts used by tests, demos and the acceptance suite."""

from __future__ import annotations

import numpy as np

from .errors import PreconditionError
from .graph import Graph, make_rng
from .partition import OneSidedPartition, delta_v2
from .trees import Tree, sample_labelled_tree


def seed_level_tree(seed, stars: int = 5, per_star: int = 3, pendants: int = 12,
                    pendant_max: int = 6) -> tuple[Tree, OneSidedPartition]:
    """A tree with a hand-built one-sided partition of known shape.

    Each of ``stars`` V2 centres carries ``per_star`` seeds; consecutive
    stars are joined by a 3-vertex path between two seeds (a two-anchor
    microtree) and random pendant microtrees hang off random seeds.  The
    partition has ``|W| = stars * per_star`` and ``|D''| = stars``.
    """
    rng = make_rng(seed)
    edges: list[tuple[int, int]] = []
    nxt = 0

    def new():
        nonlocal nxt
        nxt += 1
        return nxt - 1

    W: list[int] = []
    centres: list[int] = []
    star_seeds: list[list[int]] = []
    for _ in range(stars):
        z = new()
        centres.append(z)
        ws = [new() for _ in range(per_star)]
        for w in ws:
            edges.append((z, w))
        W.extend(ws)
        star_seeds.append(ws)
    Dp: list[frozenset[int]] = []
    for i in range(stars - 1):
        a, b, c = new(), new(), new()
        edges += [(star_seeds[i][-1], a), (a, b), (b, c), (c, star_seeds[i + 1][0])]
        Dp.append(frozenset((a, b, c)))
    for _ in range(pendants):
        size = int(rng.integers(1, pendant_max + 1))
        sub = sample_labelled_tree(size, int(rng.integers(1 << 30)))
        base = nxt
        for _ in range(size):
            new()
        for x, p in enumerate(sub.parent):
            if p >= 0:
                edges.append((base + p, base + x))
        host = W[int(rng.integers(len(W)))]
        edges.append((host, base + sub.root))
        Dp.append(frozenset(range(base, base + size)))
    t = Tree.from_edges(nxt, edges, root=W[0])
    ell = max(len(K) for K in Dp)
    part = OneSidedPartition(frozenset(W), tuple(Dp), tuple(frozenset((z,)) for z in centres), ell, delta_v2(t))
    return t, part


def random_pair_host(sizes, pairs, p, seed) -> tuple[Graph, list[list[int]]]:
    """Clusters of the given sizes with independent density-``p`` bipartite pairs."""
    rng = make_rng(seed)
    offs = np.cumsum([0] + list(sizes))
    n = int(offs[-1])
    A = np.zeros((n, n), dtype=bool)
    for (i, j) in pairs:
        B = rng.random((sizes[i], sizes[j])) < p
        A[offs[i]:offs[i + 1], offs[j]:offs[j + 1]] = B
    A |= A.T
    clusters = [list(range(int(offs[i]), int(offs[i + 1]))) for i in range(len(sizes))]
    return Graph.from_adjacency_matrix(A), clusters


# -- planted blow-up host ----------------------------------------------------------

# Cluster-level skeleton of the planted host: cluster 0 is the hub, 1..8 its
# neighbours (matching pairs 1-2, 3-4, 5-6 and the independent pair 7, 8), and
# 9 sits behind 7 and 8.  Hub pairs get the hub density, the rest the base one.
BLOWUP_HUB = 0
BLOWUP_HUB_PAIRS = [(0, c) for c in range(1, 9)]
BLOWUP_OTHER_PAIRS = (
    [(a, b) for a in range(1, 7) for b in range(a + 1, 7)]
    + [(a, 9) for a in range(1, 9)]
    + [(a, o) for a in (2, 4, 6) for o in (7, 8)]
)


def _circulant_offsets(s: int, p: float, rng, tries: int = 16) -> np.ndarray:
    """Offset set of size round(p s) whose indicator has the flattest spectrum among ``tries`` draws."""
    size = int(round(p * s))
    best, best_val = None, None
    for _ in range(tries):
        S = np.sort(rng.choice(s, size, replace=False))
        ind = np.zeros(s)
        ind[S] = 1.0
        val = np.abs(np.fft.fft(ind)[1:]).max()
        if best_val is None or val < best_val:
            best, best_val = S, val
    return best


def blowup(pairs: dict[tuple[int, int], float], m: int, s: int, seed=0,
           shuffle: bool = True) -> tuple[Graph, list[list[int]]]:
    """Blow up a weighted cluster skeleton into a host with degree-regular circulant pairs.

    Every skeleton pair ``(X, Y)`` of density ``p`` joins ``x_a`` to ``y_b``
    iff ``(b - a) mod s`` lies in a random offset set of size ``round(p s)``,
    so each vertex has exactly that many neighbours across the pair and is
    typical to it.  Returns the host and its planted clusters.
    """
    rng = make_rng(seed)
    n = m * s
    labels = rng.permutation(n) if shuffle else np.arange(n)
    clusters = [labels[i * s:(i + 1) * s] for i in range(m)]
    A = np.zeros((n, n), dtype=bool)
    idx = np.arange(s)
    for (i, j), p in sorted(pairs.items()):
        S = _circulant_offsets(s, p, rng)
        member = np.zeros(s, dtype=bool)
        member[S] = True
        B = member[(idx[None, :] - idx[:, None]) % s]
        A[np.ix_(clusters[i], clusters[j])] = B
    A |= A.T
    return Graph.from_adjacency_matrix(A), [sorted(int(x) for x in c) for c in clusters]


def planted_blowup(n: int = 3000, m: int = 10, seed=0, p_hub: float = 0.9, p_other: float = 0.7,
                   shuffle: bool = True) -> tuple[Graph, list[list[int]]]:
    """Blow-up of the fixed 10-cluster skeleton; the hub is cluster 0."""
    if m != 10:
        raise PreconditionError("the planted skeleton has exactly 10 clusters")
    if n % m:
        raise PreconditionError("n must be divisible by the number of clusters")
    pairs = {e: p_hub for e in BLOWUP_HUB_PAIRS}
    pairs.update({e: p_other for e in BLOWUP_OTHER_PAIRS})
    return blowup(pairs, m, n // m, seed, shuffle)


def pipeline_tree(k: int, dmax: int, r, seed, tries: int = 1000) -> Tree:
    """Random tree on k+1 vertices with max degree <= dmax whose smaller class has <= r k vertices."""
    from .trees import bounded_degree_tree

    rng = make_rng(seed)
    for _ in range(tries):
        t = bounded_degree_tree(k + 1, dmax, int(rng.integers(1 << 62))).oriented()
        if len(t.colour_class(0)) <= r * k:
            return t
    raise PreconditionError("could not draw a tree with the requested skew")


def skewed_tree(k: int, r, seed, dmax_core: int = 4) -> Tree:
    """Tree on k+1 vertices whose smaller colour class has about ``r k`` vertices.

    A random core tree on ``s = floor(r k)`` vertices has every edge
    subdivided; the remaining vertices are pendant leaves spread evenly over
    the core vertices.  Core vertices form one class, everything else the other.
    """
    from .trees import bounded_degree_tree

    s = int(r * k)
    if s < 2 or 2 * s - 1 > k + 1:
        raise PreconditionError("need 2 <= r k and a core that fits")
    rng = make_rng(seed)
    core = bounded_degree_tree(s, dmax_core, int(rng.integers(1 << 62)))
    edges = []
    nxt = s
    for x, p in enumerate(core.parent):
        if p >= 0:
            edges += [(p, nxt), (nxt, x)]
            nxt += 1
    order = rng.permutation(s)
    i = 0
    while nxt < k + 1:
        edges.append((int(order[i % s]), nxt))
        nxt += 1
        i += 1
    return Tree.from_edges(k + 1, edges, root=0).oriented()


def min_degree_host(n: int, delta: int, p: float, seed) -> Graph:
    """G(n, p) with random extra edges until every vertex has degree >= ``delta``."""
    if delta >= n:
        raise PreconditionError(f"no simple graph on {n} vertices has minimum degree {delta}")
    rng = make_rng(seed)
    A = rng.random((n, n)) < p
    A = np.triu(A, 1)
    A |= A.T
    deg = A.sum(axis=1)
    for v in np.argsort(deg, kind="stable"):
        v = int(v)
        short = delta - int(A[v].sum())
        if short > 0:
            free = np.flatnonzero(~A[v])
            free = free[free != v]
            pick = rng.choice(free, short, replace=False)
            A[v, pick] = A[pick, v] = True
    return Graph.from_adjacency_matrix(A)
