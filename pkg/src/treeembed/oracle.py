"""Exact tree containment.

:func:`exact_embed` is a backtracking search over tree vertices in a
connectivity-preserving order.  It is complete; the pruning rules are

* degree: a host vertex can only take a tree vertex of no larger degree,
* twins: free host vertices with equal open or closed neighbourhoods are
  interchangeable, so only one per class is tried,
* packing: every pending subtree must fit into a component of the free
  host graph next to its parent's image, checked as a small bin packing,
* leaves are placed last, all at once, by bipartite matching.

:func:`brute_force_embed` is an independent permutation search used to
cross-check it on small inputs.
"""

from __future__ import annotations

import itertools
import sys
from dataclasses import dataclass

from .errors import OracleTimeout
from .graph import Graph, iter_bits
from .trees import Tree, centroid

DEFAULT_BUDGET = 10**8
CONTAINED = "CONTAINED"
NOT_CONTAINED = "NOT CONTAINED"
TIMEOUT = "TIMEOUT"


@dataclass
class OracleResult:
    verdict: str
    embedding: dict[int, int] | None
    nodes: int

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "embedding": None if self.embedding is None else {str(x): h for x, h in sorted(self.embedding.items())},
            "nodes": self.nodes,
        }


def _twin_keys(g: Graph) -> tuple[list[int], list[int]]:
    closed = [g.adj_mask(h) | (1 << h) for h in range(g.n)]
    opened = [g.adj_mask(h) for h in range(g.n)]
    return closed, opened


class _Search:
    def __init__(self, t: Tree, g: Graph, budget: int):
        self.t = t
        self.g = g
        self.budget = budget
        self.nodes = 0
        self.adj = [g.adj_mask(h) for h in range(g.n)]
        self.hdeg = [m.bit_count() for m in self.adj]
        self.closed, self.opened = _twin_keys(g)
        root = min(centroid(t))
        rt = t.rerooted(root)
        self.rt = rt
        sizes = rt.subtree_sizes()
        self.sizes = sizes
        leaves = {v for v in range(rt.n) if v != rt.root and not rt.children[v]}
        if rt.n <= 2:
            leaves = set()
        self.leaves = sorted(leaves)
        order = []
        stack = [rt.root]
        while stack:
            v = stack.pop()
            order.append(v)
            kids = [c for c in rt.children[v] if c not in leaves]
            kids.sort(key=lambda c: (sizes[c], -c))
            stack.extend(kids)
        self.order = order
        self.tdeg = [rt.degree(v) for v in range(rt.n)]
        self.leaf_count = [sum(1 for c in rt.children[v] if c in leaves) for v in range(rt.n)]
        self.phi: dict[int, int] = {}

    def tick(self):
        self.nodes += 1
        if self.nodes > self.budget:
            raise OracleTimeout(f"node budget {self.budget} exceeded")

    def _dedupe(self, cand: int) -> list[int]:
        seen_c, seen_o, out = set(), set(), []
        for h in iter_bits(cand):
            kc, ko = self.closed[h], self.opened[h]
            if kc in seen_c or ko in seen_o:
                continue
            seen_c.add(kc)
            seen_o.add(ko)
            out.append(h)
        return out

    def _components(self, free: int) -> list[int]:
        comps = []
        rest = free
        while rest:
            seed = rest & -rest
            comp = seed
            frontier = seed
            while frontier:
                nxt = 0
                for h in iter_bits(frontier):
                    nxt |= self.adj[h]
                nxt &= free & ~comp
                comp |= nxt
                frontier = nxt
            comps.append(comp)
            rest &= ~comp
        return comps

    def _packing_ok(self, used: int) -> bool:
        free = ((1 << self.g.n) - 1) & ~used
        rt = self.rt
        pending = []
        for x, h in self.phi.items():
            for c in rt.children[x]:
                if c not in self.phi:
                    pending.append((self.sizes[c], self.adj[h]))
        if not pending:
            return True
        total = sum(s for s, _ in pending)
        if total > free.bit_count():
            return False
        comps = self._components(free)
        if len(comps) == 1:
            return True
        items = []
        for s, nbh in pending:
            allowed = [i for i, cm in enumerate(comps) if cm & nbh]
            if not allowed:
                return False
            items.append((s, allowed))
        cap = [cm.bit_count() for cm in comps]
        for i in range(len(comps)):
            forced = sum(s for s, al in items if al == [i])
            if forced > cap[i]:
                return False
        items.sort(key=lambda it: -it[0])
        steps = [0]

        def fit(j):
            if j == len(items):
                return True
            steps[0] += 1
            if steps[0] > 2000:
                return True  # give up proving infeasibility
            s, al = items[j]
            for i in al:
                if cap[i] >= s:
                    cap[i] -= s
                    if fit(j + 1):
                        cap[i] += s
                        return True
                    cap[i] += s
            return False

        return fit(0)

    def _place_leaves(self, used: int) -> dict[int, int] | None:
        rt = self.rt
        match_h: dict[int, int] = {}
        match_l: dict[int, int] = {}
        free = ((1 << self.g.n) - 1) & ~used

        def augment(leaf, seen):
            cand = self.adj[self.phi[rt.parent[leaf]]] & free
            for h in iter_bits(cand):
                if h in seen:
                    continue
                seen.add(h)
                if h not in match_h or augment(match_h[h], seen):
                    match_h[h] = leaf
                    match_l[leaf] = h
                    return True
            return False

        for leaf in self.leaves:
            self.tick()
            if not augment(leaf, set()):
                return None
        return match_l

    def run(self) -> dict[int, int] | None:
        rt = self.rt
        order = self.order
        n_all = (1 << self.g.n) - 1

        def rec(i: int, used: int):
            if i == len(order):
                leaves = self._place_leaves(used)
                if leaves is None:
                    return None
                out = dict(self.phi)
                out.update(leaves)
                return out
            x = order[i]
            if i == 0:
                cand = n_all
            else:
                cand = self.adj[self.phi[rt.parent[x]]] & ~used
            need = self.tdeg[x]
            for h in self._dedupe(cand):
                if self.hdeg[h] < need:
                    continue
                # room for the leaves hanging from x among its free neighbours
                if (self.adj[h] & ~used).bit_count() < need - (0 if i == 0 else 1):
                    continue
                self.tick()
                self.phi[x] = h
                nused = used | (1 << h)
                if self._packing_ok(nused):
                    res = rec(i + 1, nused)
                    if res is not None:
                        return res
                del self.phi[x]
            return None

        old = sys.getrecursionlimit()
        sys.setrecursionlimit(max(old, 10 * rt.n + 1000))
        try:
            return rec(0, 0)
        finally:
            sys.setrecursionlimit(old)


def exact_embed(t: Tree, g: Graph, budget: int = DEFAULT_BUDGET) -> dict[int, int] | None:
    """An embedding of ``t`` into ``g`` (tree vertex -> host vertex) or None if none exists.

    Raises :class:`OracleTimeout` when more than ``budget`` search nodes are used.
    """
    if t.n > g.n:
        return None
    if t.n == 1:
        return {0: 0} if g.n else None
    return _Search(t, g, budget).run()


def decide(t: Tree, g: Graph, budget: int = DEFAULT_BUDGET) -> OracleResult:
    """Like :func:`exact_embed` but returns a verdict instead of raising on timeout."""
    if t.n > g.n:
        return OracleResult(NOT_CONTAINED, None, 0)
    if t.n == 1:
        return OracleResult(CONTAINED if g.n else NOT_CONTAINED, {0: 0} if g.n else None, 0)
    s = _Search(t, g, budget)
    try:
        emb = s.run()
    except OracleTimeout:
        return OracleResult(TIMEOUT, None, s.nodes)
    return OracleResult(CONTAINED if emb is not None else NOT_CONTAINED, emb, s.nodes)


def brute_force_embed(t: Tree, g: Graph) -> dict[int, int] | None:
    """Try every injective map V(T) -> V(G); for tiny inputs only."""
    edges = [(x, p) for x, p in enumerate(t.parent) if p >= 0]
    for image in itertools.permutations(range(g.n), t.n):
        if all(g.has_edge(image[x], image[p]) for x, p in edges):
            return dict(enumerate(image))
    return None
