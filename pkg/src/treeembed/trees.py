"""Trees with a fixed root and a proper 2-colouring.

Colour ``V1 = 0`` and ``V2 = 1``.  By default the root is in ``V1`` and
colours alternate with depth; :meth:`Tree.swapped` exchanges the classes
and :meth:`Tree.oriented` puts the smaller class in ``V1``.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import PreconditionError
from .graph import Graph, make_rng

V1, V2 = 0, 1


class Tree:
    """Immutable rooted tree on vertices ``0..n-1``.

    ``parent[root] == -1``.  ``colour[v]`` is ``V1`` or ``V2``.
    """

    __slots__ = ("n", "parent", "colour", "root", "children", "depth", "order", "_sizes")

    def __init__(self, parent: Sequence[int], colour: Sequence[int] | None = None):
        n = len(parent)
        if n == 0:
            raise PreconditionError("a tree needs at least one vertex")
        roots = [v for v, p in enumerate(parent) if p == -1]
        if len(roots) != 1:
            raise PreconditionError(f"expected exactly one root, found {len(roots)}")
        children: list[list[int]] = [[] for _ in range(n)]
        for v, p in enumerate(parent):
            if p != -1:
                if not 0 <= p < n or p == v:
                    raise PreconditionError(f"bad parent {p} for vertex {v}")
                children[p].append(v)
        root = roots[0]
        order = [root]
        depth = [0] * n
        for v in order:
            for c in children[v]:
                depth[c] = depth[v] + 1
                order.append(c)
        if len(order) != n:
            raise PreconditionError("parent array contains a cycle or is disconnected")
        if colour is None:
            colour = [d & 1 for d in depth]
        else:
            colour = list(colour)
            for v, p in enumerate(parent):
                if p != -1 and colour[v] == colour[p]:
                    raise PreconditionError(f"colouring is not proper on edge ({p}, {v})")
        self.n = n
        self.parent = tuple(parent)
        self.colour = tuple(colour)
        self.root = root
        self.children = tuple(tuple(c) for c in children)
        self.depth = tuple(depth)
        self.order = tuple(order)
        self._sizes = None

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], root: int = 0) -> "Tree":
        nbrs: list[list[int]] = [[] for _ in range(n)]
        count = 0
        for u, v in edges:
            nbrs[u].append(v)
            nbrs[v].append(u)
            count += 1
        if count != n - 1:
            raise PreconditionError(f"a tree on {n} vertices has {n - 1} edges, got {count}")
        parent = [-2] * n
        parent[root] = -1
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for u in sorted(nbrs[v]):
                if parent[u] == -2:
                    parent[u] = v
                    queue.append(u)
        if -2 in parent:
            raise PreconditionError("edge set is not connected")
        return cls(parent)

    @classmethod
    def from_graph(cls, g: Graph, root: int = 0) -> "Tree":
        return cls.from_edges(g.n, g.edges(), root)

    # -- basic queries ---------------------------------------------------------

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"Tree(n={self.n}, root={self.root})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Tree) and self.parent == other.parent and self.colour == other.colour

    def __hash__(self) -> int:
        return hash((self.parent, self.colour))

    def neighbors(self, v: int) -> list[int]:
        p = self.parent[v]
        out = list(self.children[v])
        if p != -1:
            out.append(p)
        return out

    def degree(self, v: int) -> int:
        return len(self.children[v]) + (self.parent[v] != -1)

    def max_degree(self, cls: int | None = None) -> int:
        vs = range(self.n) if cls is None else (v for v in range(self.n) if self.colour[v] == cls)
        return max((self.degree(v) for v in vs), default=0)

    def edges(self) -> Iterator[tuple[int, int]]:
        for v, p in enumerate(self.parent):
            if p != -1:
                yield p, v

    def colour_class(self, cls: int) -> frozenset[int]:
        return frozenset(v for v in range(self.n) if self.colour[v] == cls)

    def leaves(self) -> list[int]:
        return [v for v in range(self.n) if self.degree(v) <= 1]

    def to_graph(self) -> Graph:
        return Graph(self.n, self.edges())

    def subtree_sizes(self) -> tuple[int, ...]:
        """Sizes of the subtrees hanging below each vertex (w.r.t. the root)."""
        if self._sizes is None:
            size = [1] * self.n
            for v in reversed(self.order):
                p = self.parent[v]
                if p != -1:
                    size[p] += size[v]
            self._sizes = tuple(size)
        return self._sizes

    # -- derived trees --------------------------------------------------------

    def swapped(self) -> "Tree":
        return Tree(self.parent, [1 - c for c in self.colour])

    def oriented(self) -> "Tree":
        """Same tree with the smaller colour class (ties: keep) labelled ``V1``."""
        n1 = sum(1 for c in self.colour if c == V1)
        return self.swapped() if n1 > self.n - n1 else self

    def rerooted(self, root: int) -> "Tree":
        """Same edges and colours, rooted at ``root``."""
        parent = [-2] * self.n
        parent[root] = -1
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for u in self.neighbors(v):
                if parent[u] == -2:
                    parent[u] = v
                    queue.append(u)
        return Tree(parent, self.colour)

    # -- text format ------------------------------------------------------------

    def to_parent_line(self) -> str:
        """``n p(1) ... p(n-1)`` with the tree re-rooted at vertex 0."""
        t = self if self.root == 0 else self.rerooted(0)
        return " ".join([str(self.n)] + [str(p) for p in t.parent[1:]])

    @classmethod
    def from_parent_line(cls, line: str) -> "Tree":
        toks = line.split()
        if not toks:
            raise PreconditionError("empty tree line")
        n = int(toks[0])
        rest = [int(x) for x in toks[1:]]
        if len(rest) != n - 1:
            raise PreconditionError(f"tree line declares n={n} but lists {len(rest)} parents")
        return cls([-1] + rest)


# -- operations -----------------------------------------------------------------


def tree_distance(t: Tree, x: int, y: int) -> int:
    """Number of edges on the unique x-y path."""
    for v in (x, y):
        if not 0 <= v < t.n:
            raise PreconditionError(f"vertex {v} is not in the tree (n={t.n})")
    d = 0
    depth, parent = t.depth, t.parent
    while depth[x] > depth[y]:
        x = parent[x]
        d += 1
    while depth[y] > depth[x]:
        y = parent[y]
        d += 1
    while x != y:
        x, y = parent[x], parent[y]
        d += 2
    return d


def tree_path(t: Tree, x: int, y: int) -> list[int]:
    """Vertices of the x-y path, both ends included."""
    left, right = [x], [y]
    depth, parent = t.depth, t.parent
    while depth[left[-1]] > depth[right[-1]]:
        left.append(parent[left[-1]])
    while depth[right[-1]] > depth[left[-1]]:
        right.append(parent[right[-1]])
    while left[-1] != right[-1]:
        left.append(parent[left[-1]])
        right.append(parent[right[-1]])
    right.pop()
    return left + right[::-1]


def component_sizes_without(t: Tree, v: int) -> list[int]:
    """Sizes of the components of T - v."""
    size = t.subtree_sizes()
    out = [size[c] for c in t.children[v]]
    if t.parent[v] != -1:
        out.append(t.n - size[v])
    return out


def max_component_sizes(t: Tree) -> list[int]:
    size = t.subtree_sizes()
    out = []
    for v in range(t.n):
        best = t.n - size[v]
        for c in t.children[v]:
            if size[c] > best:
                best = size[c]
        out.append(best)
    return out


def centroid(t: Tree) -> frozenset[int]:
    """Vertices whose removal leaves components of size <= n/2 (one or two)."""
    worst = max_component_sizes(t)
    best = min(worst)
    return frozenset(v for v, w in enumerate(worst) if w == best)


def subset_sum_reachable(sizes: Iterable[int]) -> int:
    """Bitset of all subset sums of ``sizes``."""
    reach = 1
    for s in sizes:
        reach |= reach << s
    return reach


def is_balanced(t: Tree) -> bool:
    """True iff the branches at the centroid split into two halves of k/2 each.

    Defined only for odd order k + 1.
    """
    if t.n % 2 == 0:
        raise PreconditionError(f"balancedness needs odd order, got {t.n}")
    if t.n == 1:
        return True
    (c,) = centroid(t)
    half = (t.n - 1) // 2
    return bool((subset_sum_reachable(component_sizes_without(t, c)) >> half) & 1)


# -- labelled sampling ------------------------------------------------------------


def prufer_decode(seq: Sequence[int], n: int) -> Tree:
    """Decode a Prüfer sequence of length n - 2 into a tree rooted at 0."""
    if n == 1:
        return Tree([-1])
    if len(seq) != n - 2:
        raise PreconditionError("Prüfer sequence must have length n - 2")
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    edges = []
    ptr = 0
    while degree[ptr] != 1:
        ptr += 1
    leaf = ptr
    for x in seq:
        edges.append((leaf, x))
        degree[x] -= 1
        if degree[x] == 1 and x < ptr:
            leaf = x
        else:
            ptr += 1
            while degree[ptr] != 1:
                ptr += 1
            leaf = ptr
    # the last edge joins the remaining leaf with n - 1
    edges.append((leaf, n - 1))
    return Tree.from_edges(n, edges, root=0)


def sample_labelled_tree(n: int, seed) -> Tree:
    """Uniform labelled tree on n vertices (Prüfer decoding)."""
    if n < 1:
        raise PreconditionError("n must be positive")
    rng = make_rng(seed)
    seq = rng.integers(0, n, size=max(n - 2, 0)).tolist() if n > 2 else []
    return prufer_decode(seq, n)


def bounded_degree_tree(n: int, dmax: int, seed) -> Tree:
    """Random labelled tree with maximum degree <= dmax.

    A uniform Prüfer sequence is repaired so that no label occurs more than
    ``dmax - 1`` times (a label's degree is its multiplicity plus one);
    excess occurrences are redrawn uniformly from labels with spare capacity.
    """
    if n >= 3 and dmax < 2 or n == 2 and dmax < 1:
        raise PreconditionError(f"no tree on {n} vertices has maximum degree <= {dmax}")
    rng = make_rng(seed)
    if n <= 2:
        return sample_labelled_tree(n, rng)
    seq = rng.integers(0, n, size=n - 2)
    cap = dmax - 1
    counts = np.bincount(seq, minlength=n)
    over = np.flatnonzero(counts > cap)
    if len(over):
        spare = counts < cap
        for pos in range(n - 2):
            x = seq[pos]
            if counts[x] > cap:
                counts[x] -= 1
                choices = np.flatnonzero(spare)
                y = int(choices[rng.integers(len(choices))])
                seq[pos] = y
                counts[y] += 1
                if counts[y] >= cap:
                    spare[y] = False
    t = prufer_decode(seq.tolist(), n)
    if t.max_degree() > dmax:
        raise AssertionError("degree repair left a vertex above the cap")
    return t


def path_tree(n: int) -> Tree:
    return Tree([-1] + list(range(n - 1)))


def star_tree(leaves: int) -> Tree:
    return Tree([-1] + [0] * leaves)


def spider_tree(legs: Sequence[int]) -> Tree:
    """Centre 0 with paths of the given lengths attached."""
    parent = [-1]
    for length in legs:
        prev = 0
        for _ in range(length):
            parent.append(prev)
            prev = len(parent) - 1
    return Tree(parent)
