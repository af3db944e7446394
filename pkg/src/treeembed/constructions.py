"""Extremal host/tree pairs with exactly evaluated certificates.

Every size is computed in rationals and must come out integral; a
constructor refuses otherwise unless ``round_down=True``, in which case
floors are applied and all certificates are re-evaluated on the rounded
objects.  Certificates are always recomputed from the built graph and tree,
not from the parameters that produced them.
"""

from __future__ import annotations

import math
import operator
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import PreconditionError
from .graph import Graph
from .regularity import as_fraction
from .trees import Tree

TWO_CLIQUES = "TwoCliques"
COMPLETE_BIPARTITE = "CompleteBipartite"

_RELATIONS = {
    "<": operator.lt,
    "<=": operator.le,
    ">": operator.gt,
    ">=": operator.ge,
    "==": operator.eq,
}


@dataclass
class Certificate:
    name: str
    lhs: Fraction
    relation: str
    rhs: Fraction

    @property
    def ok(self) -> bool:
        return _RELATIONS[self.relation](self.lhs, self.rhs)

    def to_json(self) -> dict:
        return {
            "inequality": f"{self.name}: lhs {self.relation} rhs",
            "lhs": str(self.lhs),
            "rhs": str(self.rhs),
            "verdict": self.ok,
        }


@dataclass
class ConstructionReport:
    name: str
    host: Graph
    tree: Tree
    params: dict = field(default_factory=dict)
    claimed_properties: list[Certificate] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.claimed_properties)

    def failing(self) -> list[Certificate]:
        return [c for c in self.claimed_properties if not c.ok]

    def add(self, name, lhs, relation, rhs) -> Certificate:
        c = Certificate(name, Fraction(lhs), relation, Fraction(rhs))
        self.claimed_properties.append(c)
        return c

    def to_json(self) -> dict:
        return {
            "construction": self.name,
            "params": {k: str(v) for k, v in self.params.items()},
            "host_order": self.host.n,
            "host_edges": self.host.num_edges,
            "tree_order": self.tree.n,
            "ok": self.ok,
            "certificates": [c.to_json() for c in self.claimed_properties],
        }


def _integral(name: str, x: Fraction, round_down: bool) -> int:
    if x.denominator != 1:
        if not round_down:
            raise PreconditionError(f"{name} = {x} is not an integer; pass round_down=True to floor it")
        return math.floor(x)
    return int(x)


def _range_mask(lo: int, hi: int) -> int:
    return ((1 << hi) - 1) & ~((1 << lo) - 1)


def _masks_from_blocks(n: int, blocks: list[tuple[int, int]], links: list[tuple[int, int]], cliques: list[int]) -> Graph:
    """Host from vertex blocks; ``links`` joins two blocks completely, ``cliques`` makes a block complete."""
    bmask = [_range_mask(lo, hi) for lo, hi in blocks]
    per_block = [0] * len(blocks)
    for i, j in links:
        per_block[i] |= bmask[j]
        per_block[j] |= bmask[i]
    for i in cliques:
        per_block[i] |= bmask[i]
    masks = [0] * n
    for i, (lo, hi) in enumerate(blocks):
        for v in range(lo, hi):
            masks[v] = per_block[i] & ~(1 << v)
    return Graph.from_masks(masks, check=False)


def _blocks(sizes: list[int]) -> list[tuple[int, int]]:
    out, start = [], 0
    for s in sizes:
        out.append((start, start + s))
        start += s
    return out


def _star_of_stars(star_sizes: list[int]) -> Tree:
    """Hub 0 joined to the centre of each star; ``star_sizes`` counts centre plus leaves."""
    parent = [-1]
    for s in star_sizes:
        c = len(parent)
        parent.append(0)
        parent.extend([c] * (s - 1))
    return Tree(parent)


def _degrees(g: Graph) -> list[int]:
    return [m.bit_count() for m in g.masks]


def two_clique_host(k: int) -> Graph:
    """A vertex complete to two disjoint cliques on k/2 vertices each (k even)."""
    if k < 2 or k % 2:
        raise PreconditionError("two_clique_host needs an even k >= 2")
    h = k // 2
    blocks = _blocks([1, h, h])
    return _masks_from_blocks(k + 1, blocks, [(0, 1), (0, 2)], [1, 2])


def hub_bipartite_host(k: int) -> Graph:
    """A vertex complete to K_{k/2,k/2} (k even)."""
    if k < 2 or k % 2:
        raise PreconditionError("hub_bipartite_host needs an even k >= 2")
    h = k // 2
    blocks = _blocks([1, h, h])
    return _masks_from_blocks(k + 1, blocks, [(0, 1), (0, 2), (1, 2)], [])


def broom_tree(k: int) -> Tree:
    if k < 6 or k % 3:
        raise PreconditionError("the broom needs k divisible by 3 with k >= 6")
    return _star_of_stars([k // 3] * 3)


def broom_pair(k: int, host_kind: str = TWO_CLIQUES) -> ConstructionReport:
    """Hub joined to three stars on k/3 vertices, against a host with Delta >= k and delta >= k/2.

    Refuses k not divisible by 6.  Note the CompleteBipartite host does
    contain the broom when k = 6 mod 12 (map the hub to the apex and put one
    star centre on one side, two on the other); only the TwoCliques host
    excludes it for every admissible k.
    """
    if k < 6 or k % 6:
        raise PreconditionError(f"k={k} must be a positive multiple of 6 (no rounding rule is applied)")
    if host_kind == TWO_CLIQUES:
        host = two_clique_host(k)
    elif host_kind == COMPLETE_BIPARTITE:
        host = hub_bipartite_host(k)
    else:
        raise PreconditionError(f"unknown host kind {host_kind!r}")
    tree = broom_tree(k)
    rep = ConstructionReport("broom_pair", host, tree, {"k": k, "host_kind": host_kind})
    degs = _degrees(host)
    rep.add("|T| = k+1", tree.n, "==", k + 1)
    rep.add("|G| = k+1", host.n, "==", k + 1)
    rep.add("Delta(G) >= k", max(degs), ">=", k)
    rep.add("delta(G) >= k/2", min(degs), ">=", Fraction(k, 2))
    rep.add("hub degree = 3", tree.degree(0), "==", 3)
    return rep


def sqrt_tightness(k: int, *, round_down: bool = False) -> ConstructionReport:
    """Two cliques of orders (k-1)/2 and (k+1)/2 plus (sqrt k - 1)/2 vertices complete to both.

    The tree is a hub joined to the centres of sqrt(k) stars on sqrt(k)
    vertices.  ``round_down`` is accepted for interface symmetry; the sizes
    are integral exactly when k is an odd square, which is required.
    """
    s = math.isqrt(k) if k > 0 else 0
    if k <= 1 or s * s != k or k % 2 == 0:
        raise PreconditionError(f"k={k} must be an odd perfect square > 1")
    small, big, ind = (k - 1) // 2, (k + 1) // 2, (s - 1) // 2
    blocks = _blocks([small, big, ind])
    host = _masks_from_blocks(small + big + ind, blocks, [(0, 2), (1, 2)], [0, 1])
    tree = _star_of_stars([s] * s)
    rep = ConstructionReport("sqrt_tightness", host, tree, {"k": k})
    n = host.n
    degs = _degrees(host)
    high = sum(1 for d in degs if d >= k)
    rep.add("|G| = k + (sqrt k - 1)/2", n, "==", k + Fraction(s - 1, 2))
    rep.add("|T| = k+1", tree.n, "==", k + 1)
    # high / n < 1/(2 sqrt k), squared: (2 high)^2 k < n^2
    rep.add("high-degree fraction < 1/(2 sqrt k) [squared]", Fraction(4 * high * high * k), "<", Fraction(n * n))
    rep.add("high-degree fraction", Fraction(high, n), "<", Fraction(1, 2 * s))
    # hub in the independent set: (s+1)/2 stars land in one clique side
    need = 1 + Fraction(s + 1, 2) * s
    room = max(small, big) + ind
    rep.add("hub in independent set: vertices needed > room in one clique side", need, ">", room)
    # hub in a clique: the other clique is reachable only through the independent set
    for label, other in (("smaller", big), ("larger", small)):
        reach = ind * (s - 1)
        unusable = max(other - reach, 0)
        rep.add(f"hub in {label} clique: usable host vertices < |T|", n - unusable, "<", tree.n)
    return rep


def skew_counterexample(r, eta, n: int, *, round_down: bool = False) -> ConstructionReport:
    """Two copies of K_{rk+eta n, k/2+eta n} plus eta n vertices complete to both larger classes.

    k = (1 - 5 eta) n / (1 + 2 r).  The tree is a hub joined to the centres
    of rk stars whose sizes are the floor/ceil mix of (k-1)/(rk), so that
    the tree has exactly k vertices.  Certificates that fail are reported,
    not raised; callers shrink eta.
    """
    r, eta = as_fraction(r), as_fraction(eta)
    if not (0 < r < Fraction(1, 3)):
        raise PreconditionError("r must lie in (0, 1/3)")
    if not (0 < eta < Fraction(1, 5)):
        raise PreconditionError("eta must lie in (0, 1/5)")
    k = _integral("k", (1 - 5 * eta) * n / (1 + 2 * r), round_down)
    rk = _integral("rk", r * k, round_down)
    en = _integral("eta n", eta * n, round_down)
    half = _integral("k/2", Fraction(k, 2), round_down)
    if rk < 1 or en < 1 or k < 2:
        raise PreconditionError("part sizes must be positive")
    a, b = rk + en, half + en
    blocks = _blocks([a, b, a, b, en])
    host = _masks_from_blocks(2 * a + 2 * b + en, blocks, [(0, 1), (2, 3), (4, 1), (4, 3)], [])
    total = k - 1
    lo = total // rk
    n_hi = total - lo * rk
    if lo < 1:
        raise PreconditionError("stars would be empty: k - 1 < rk")
    tree = _star_of_stars([lo + 1] * n_hi + [lo] * (rk - n_hi))
    rep = ConstructionReport("skew_counterexample", host, tree,
                             {"r": r, "eta": eta, "n": n, "k": k, "rk": rk, "eta_n": en, "star_sizes": f"{lo}/{lo + 1}"})
    degs = _degrees(host)
    depth = tree.depth
    odd = sum(1 for v in range(tree.n) if depth[v] % 2)
    smaller = min(odd, tree.n - odd)
    ceil_inv = math.ceil(1 / r)
    rep.add("|G| = n", host.n, "==", n)
    rep.add("|T| = k", tree.n, "==", k)
    rep.add("delta(G) >= rk + eta n", min(degs), ">=", r * k + eta * n)
    rep.add("#{deg >= k + eta n} >= eta n", sum(1 for d in degs if d >= k + eta * n), ">=", eta * n)
    rep.add("smaller tree class <= rk", smaller, "<=", r * k)
    rep.add("2rk + 3 eta n < (1-r)k", 2 * r * k + 3 * eta * n, "<", (1 - r) * k)
    rep.add("(1-r)k - 1 - eta n ceil(1/r) > k/2 + eta n",
            (1 - r) * k - 1 - eta * n * ceil_inv, ">", Fraction(k, 2) + eta * n)
    return rep
