"""Undirected simple graphs on dense integer vertex ids.

Adjacency is stored as one Python ``int`` bitset per vertex, so neighbourhood
intersection, set degree and popcount are single big-int operations.  Degree
and density statistics are returned as exact :class:`fractions.Fraction`.
"""

from __future__ import annotations

from collections import deque
from fractions import Fraction
from math import ceil
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import EmptyGraphError, PreconditionError, ProofInvariantError


def iter_bits(mask: int) -> Iterator[int]:
    """Yield the positions of the set bits of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def make_rng(seed) -> np.random.Generator:
    """The package-wide seeded generator (PCG64, 64-bit state)."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


class Graph:
    """Immutable undirected simple graph.

    ``parent_ids[i]`` is the id of vertex ``i`` in the graph this one was
    carved out of (identity for graphs built from scratch).
    """

    __slots__ = ("n", "_adj", "parent_ids", "_m")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = (), *, parent_ids=None):
        if n < 0:
            raise PreconditionError("vertex count must be non-negative")
        adj = [0] * n
        for u, v in edges:
            if u == v:
                raise PreconditionError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise PreconditionError(f"edge ({u}, {v}) out of range for n={n}")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        self._init(n, adj, parent_ids)

    def _init(self, n, adj, parent_ids):
        self.n = n
        self._adj = tuple(adj)
        self.parent_ids = tuple(range(n)) if parent_ids is None else tuple(parent_ids)
        self._m = None

    @classmethod
    def from_masks(cls, masks: Sequence[int], *, parent_ids=None, check: bool = True) -> "Graph":
        n = len(masks)
        if check:
            for v, m in enumerate(masks):
                if m >> n:
                    raise PreconditionError(f"vertex {v} has a neighbour id >= n")
                if (m >> v) & 1:
                    raise PreconditionError(f"self-loop at vertex {v}")
                for u in iter_bits(m):
                    if not (masks[u] >> v) & 1:
                        raise PreconditionError(f"asymmetric adjacency between {v} and {u}")
        g = cls.__new__(cls)
        g._init(n, list(masks), parent_ids)
        return g

    @classmethod
    def from_adjacency_matrix(cls, a) -> "Graph":
        """Build from a symmetric 0/1 matrix with zero diagonal."""
        a = np.asarray(a, dtype=bool)
        n = a.shape[0]
        if a.shape != (n, n) or not np.array_equal(a, a.T) or a.diagonal().any():
            raise PreconditionError("adjacency matrix must be square, symmetric, zero-diagonal")
        packed = np.packbits(a, axis=1, bitorder="little")
        masks = [int.from_bytes(row.tobytes(), "little") for row in packed]
        return cls.from_masks(masks, check=False)

    # -- queries -----------------------------------------------------------

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.num_edges})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self._adj == other._adj

    def __hash__(self) -> int:
        return hash((self.n, self._adj))

    def adj_mask(self, v: int) -> int:
        return self._adj[v]

    @property
    def masks(self) -> tuple[int, ...]:
        return self._adj

    def neighbors(self, v: int) -> list[int]:
        return list(iter_bits(self._adj[v]))

    def degree(self, v: int) -> int:
        return self._adj[v].bit_count()

    def degrees(self) -> list[int]:
        return [m.bit_count() for m in self._adj]

    def degree_into(self, v: int, mask: int) -> int:
        return (self._adj[v] & mask).bit_count()

    def has_edge(self, u: int, v: int) -> bool:
        return bool((self._adj[u] >> v) & 1)

    @property
    def num_edges(self) -> int:
        if self._m is None:
            self._m = sum(self.degrees()) // 2
        return self._m

    def edges(self) -> Iterator[tuple[int, int]]:
        for u, m in enumerate(self._adj):
            for v in iter_bits(m >> (u + 1)):
                yield u, u + 1 + v

    def all_mask(self) -> int:
        return (1 << self.n) - 1

    def adjacency_matrix(self) -> np.ndarray:
        nbytes = (self.n + 7) // 8
        buf = b"".join(m.to_bytes(nbytes, "little") for m in self._adj)
        rows = np.frombuffer(buf, dtype=np.uint8).reshape(self.n, nbytes) if self.n else np.zeros((0, 0), np.uint8)
        return np.unpackbits(rows, axis=1, count=self.n, bitorder="little").astype(bool)

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        seen = 1
        frontier = 1
        while frontier:
            nxt = 0
            for v in iter_bits(frontier):
                nxt |= self._adj[v]
            frontier = nxt & ~seen
            seen |= nxt
        return seen == self.all_mask()

    # -- derived graphs ----------------------------------------------------

    def induced_subgraph(self, vertices: Iterable[int]) -> "Graph":
        """Subgraph on ``vertices`` (relabelled 0..), remembering parent ids."""
        keep = sorted(set(vertices))
        index = {v: i for i, v in enumerate(keep)}
        masks = []
        for v in keep:
            m = 0
            for u in iter_bits(self._adj[v]):
                j = index.get(u)
                if j is not None:
                    m |= 1 << j
            masks.append(m)
        parents = [self.parent_ids[v] for v in keep]
        return Graph.from_masks(masks, parent_ids=parents, check=False)

    def with_edges(self, add=(), remove=()) -> "Graph":
        adj = list(self._adj)
        for u, v in add:
            if u == v:
                raise PreconditionError(f"self-loop at vertex {u}")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        for u, v in remove:
            adj[u] &= ~(1 << v)
            adj[v] &= ~(1 << u)
        return Graph.from_masks(adj, parent_ids=self.parent_ids, check=False)


# -- statistics ---------------------------------------------------------------


def degree_stats(g: Graph) -> tuple[int, int, Fraction]:
    """Return (minimum degree, maximum degree, average degree 2|E|/n)."""
    if g.n == 0:
        raise EmptyGraphError("degree statistics are undefined on the empty graph")
    degs = g.degrees()
    return min(degs), max(degs), Fraction(sum(degs), g.n)


def edges_between(g: Graph, xs: Iterable[int], ymask: int) -> int:
    return sum((g.adj_mask(x) & ymask).bit_count() for x in xs)


def pair_density(g: Graph, xs: Iterable[int], ys: Iterable[int]) -> tuple[int, Fraction, Fraction]:
    """Return (e(X,Y), d(X,Y), average degree of X into Y)."""
    xs = set(xs)
    ys = set(ys)
    if not xs or not ys:
        raise PreconditionError("both sides of a pair must be nonempty")
    if xs & ys:
        raise PreconditionError(f"pair sides overlap in {sorted(xs & ys)[:5]}")
    e = edges_between(g, xs, mask_of(ys))
    return e, Fraction(e, len(xs) * len(ys)), Fraction(e, len(xs))


def prune_min_degree(g: Graph, t: int) -> Graph:
    """Largest induced subgraph of minimum degree >= t (possibly empty)."""
    alive = g.all_mask()
    deg = g.degrees()
    queue = deque(v for v in range(g.n) if deg[v] < t)
    dead = set(queue)
    while queue:
        v = queue.popleft()
        alive &= ~(1 << v)
        for u in iter_bits(g.adj_mask(v) & alive):
            deg[u] -= 1
            if deg[u] < t and u not in dead:
                dead.add(u)
                queue.append(u)
    return g.induced_subgraph(iter_bits(alive))


def extract_denser_subgraph(g: Graph, k: int, slack: int) -> Graph:
    """Subgraph with average degree >= k + slack and minimum degree >= (k + slack)/2.

    Obtained by pruning at threshold ceil((k + slack)/2).  Every deletion
    removes a vertex of degree below half the target average, so the average
    cannot fall below the target; this is checked after every deletion.
    """
    target = k + slack
    if g.n == 0:
        raise PreconditionError("average degree of the empty graph is undefined; need >= k + slack")
    avg = Fraction(2 * g.num_edges, g.n)
    if avg < target:
        raise PreconditionError(f"average degree {avg} is below k + slack = {target}")
    t = ceil(Fraction(target, 2))
    alive = g.all_mask()
    deg = g.degrees()
    n_alive, twice_m = g.n, 2 * g.num_edges
    queue = deque(v for v in range(g.n) if deg[v] < t)
    dead = set(queue)
    while queue:
        v = queue.popleft()
        alive &= ~(1 << v)
        twice_m -= 2 * deg[v]
        n_alive -= 1
        for u in iter_bits(g.adj_mask(v) & alive):
            deg[u] -= 1
            if deg[u] < t and u not in dead:
                dead.add(u)
                queue.append(u)
        if n_alive and Fraction(twice_m, n_alive) < target:
            raise ProofInvariantError(
                f"average degree fell to {Fraction(twice_m, n_alive)} < {target} while pruning"
            )
    return g.induced_subgraph(iter_bits(alive))


# -- generators ---------------------------------------------------------------


def complete(n: int) -> Graph:
    full = (1 << n) - 1
    return Graph.from_masks([full & ~(1 << v) for v in range(n)], check=False)


def empty(n: int) -> Graph:
    return Graph.from_masks([0] * n, check=False)


def complete_bipartite(a: int, b: int) -> Graph:
    left = (1 << a) - 1
    right = ((1 << b) - 1) << a
    return Graph.from_masks([right] * a + [left] * b, check=False)


def path(n: int) -> Graph:
    return Graph(n, ((i, i + 1) for i in range(n - 1)))


def cycle(n: int) -> Graph:
    if n < 3:
        raise PreconditionError("a cycle needs at least 3 vertices")
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def star(leaves: int) -> Graph:
    return complete_bipartite(1, leaves)


def random_gnp(n: int, p: float, seed) -> Graph:
    if not 0 <= p <= 1:
        raise PreconditionError("p must lie in [0, 1]")
    rng = make_rng(seed)
    upper = np.triu(rng.random((n, n)) < p, k=1)
    return Graph.from_adjacency_matrix(upper | upper.T)


def random_bipartite(a: int, b: int, p: float, seed) -> Graph:
    """Random bipartite graph with sides 0..a-1 and a..a+b-1."""
    if not 0 <= p <= 1:
        raise PreconditionError("p must lie in [0, 1]")
    rng = make_rng(seed)
    block = rng.random((a, b)) < p
    full = np.zeros((a + b, a + b), dtype=bool)
    full[:a, a:] = block
    full[a:, :a] = block.T
    return Graph.from_adjacency_matrix(full)


def disjoint_union(*graphs: Graph) -> Graph:
    masks, shift = [], 0
    for h in graphs:
        masks.extend(m << shift for m in h.masks)
        shift += h.n
    return Graph.from_masks(masks, check=False)


# -- edge-list text format ------------------------------------------------------


def parse_edge_list(text: str) -> Graph:
    """Parse whitespace-separated ``u v`` pairs; ``#`` starts a comment.

    An optional ``n <count>`` line fixes the vertex count (needed for
    isolated vertices); otherwise it is one more than the largest id.
    """
    n = None
    nums: list[int] = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("n "):
            n = int(line.split()[1])
            continue
        nums.extend(int(tok) for tok in line.split())
    if len(nums) % 2:
        raise PreconditionError("edge list has an odd number of endpoints")
    pairs = list(zip(nums[::2], nums[1::2]))
    if n is None:
        n = max(nums) + 1 if nums else 0
    return Graph(n, pairs)


def format_edge_list(g: Graph) -> str:
    lines = [f"n {g.n}"] + [f"{u} {v}" for u, v in g.edges()]
    return "\n".join(lines) + "\n"
