"""Tree embeddings: the greedy min-degree embedder and the two pair embedders.

Host vertex sets are Python int bitmasks throughout; candidate choice is
always the lowest host id, so every routine is deterministic.

The pair embedders first run the greedy pass the existence argument
describes (typical vertices only, lowest id first).  If that pass gets
stuck they fall back to a bounded backtracking search over the plain
candidate sets (cluster minus ``U``), so that success means "an embedding
into these sets exists" whenever the search finishes within its budget.
Those sets shrink as ``U`` grows, which makes success monotone in ``U``.
"""

from __future__ import annotations

from collections import deque
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import EmbedFailure, PreconditionError
from .graph import Graph, degree_stats, iter_bits, mask_of
from .partition import OneSidedPartition
from .regularity import as_fraction
from .trees import Tree


def lowest(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


class Embedding:
    """Partial injective map from tree vertices to host vertices."""

    __slots__ = ("map", "used")

    def __init__(self, mapping: dict[int, int] | None = None):
        self.map: dict[int, int] = {}
        self.used = 0
        for x, h in (mapping or {}).items():
            self.assign(x, h)

    def assign(self, x: int, h: int) -> None:
        if x in self.map:
            raise ValueError(f"tree vertex {x} is already embedded")
        if (self.used >> h) & 1:
            raise ValueError(f"host vertex {h} is already used")
        self.map[x] = h
        self.used |= 1 << h

    def remove(self, x: int) -> int:
        h = self.map.pop(x)
        self.used &= ~(1 << h)
        return h

    def __contains__(self, x: int) -> bool:
        return x in self.map

    def __getitem__(self, x: int) -> int:
        return self.map[x]

    def __len__(self) -> int:
        return len(self.map)

    def items(self):
        return self.map.items()

    def copy(self) -> "Embedding":
        e = Embedding()
        e.map = dict(self.map)
        e.used = self.used
        return e

    def restricted(self, xs: Iterable[int]) -> dict[int, int]:
        return {x: self.map[x] for x in xs if x in self.map}

    def to_json(self) -> dict[str, int]:
        return {str(x): h for x, h in sorted(self.map.items())}


def _as_mask(xs) -> int:
    return xs if isinstance(xs, int) else mask_of(xs)


def _sqrt_le(a: Fraction, eps: Fraction, b: Fraction) -> bool:
    """a <= sqrt(eps) * b for non-negative a, b, compared exactly."""
    return a * a <= eps * b * b


def _sqrt_ge(a: Fraction, eps: Fraction, b: Fraction) -> bool:
    """a >= sqrt(eps) * b for non-negative a, b, compared exactly."""
    return a * a >= eps * b * b


# -- greedy ---------------------------------------------------------------------


def greedy_embed(t: Tree, g: Graph, root_image: int | None = None) -> Embedding:
    """Embed ``t`` vertex by vertex in BFS order; needs min degree >= |T| - 1."""
    if g.n == 0:
        raise PreconditionError("empty host")
    delta = degree_stats(g)[0]
    if delta < t.n - 1:
        raise PreconditionError(f"greedy embedding needs min degree >= {t.n - 1}, host has {delta}")
    phi = Embedding()
    phi.assign(t.root, 0 if root_image is None else root_image)
    for x in t.order[1:]:
        cand = g.adj_mask(phi[t.parent[x]]) & ~phi.used
        if not cand:
            raise EmbedFailure("greedy step found no free neighbour", stuck=x, state={"map": dict(phi.map)})
        phi.assign(x, lowest(cand))
    return phi


# -- exhaustive fallback ----------------------------------------------------------

DEFAULT_SEARCH_BUDGET = 200_000


class _SearchExhausted(Exception):
    pass


def _search_extend(g: Graph, order: Sequence[int], parent: dict[int, int | None], cand: dict[int, int],
                   phi: Embedding, budget: int) -> dict[int, int] | None:
    """Backtracking placement of ``order`` on top of ``phi``.

    ``parent[x]`` (if not None) is a vertex placed before ``x`` whose image
    must be adjacent to the image of ``x``; ``cand[x]`` is a static mask.
    Two prunes: after each placement the children of the new vertex must
    still have room (forward checking), and every group of unplaced vertices
    sharing a candidate mask must fit into the free part of that mask.
    Returns the new assignments or None; raises :class:`_SearchExhausted`
    past ``budget`` nodes.
    """
    kids: dict[int, list[int]] = {x: [] for x in order}
    for x in order:
        p = parent.get(x)
        if p is not None and p in kids:
            kids[p].append(x)
    left: dict[int, int] = {}
    for x in order:
        left[cand[x]] = left.get(cand[x], 0) + 1
    out: dict[int, int] = {}
    used = phi.used
    nodes = 0

    def image(x):
        return out[x] if x in out else phi[x]

    def counts_fit() -> bool:
        return all((mask & ~used).bit_count() >= need for mask, need in left.items() if need)

    def rec(i: int) -> bool:
        nonlocal used, nodes
        if i == len(order):
            return True
        x = order[i]
        c = cand[x] & ~used
        p = parent.get(x)
        if p is not None:
            c &= g.adj_mask(image(p))
        left[cand[x]] -= 1
        while c:
            nodes += 1
            if nodes > budget:
                raise _SearchExhausted
            h = lowest(c)
            c &= c - 1
            adj = g.adj_mask(h)
            after = used | (1 << h)
            room = 0
            ok = True
            for y in kids[x]:
                r = cand[y] & adj & ~after
                if not r:
                    ok = False
                    break
                room |= r
            if not ok or room.bit_count() < len(kids[x]):
                continue
            out[x] = h
            used = after
            if counts_fit() and rec(i + 1):
                return True
            del out[x]
            used &= ~(1 << h)
        left[cand[x]] += 1
        return False

    if not counts_fit():
        return None
    return dict(out) if rec(0) else None


def _components(order: Sequence[int], parent: dict[int, int | None]) -> list[list[int]]:
    """Split ``order`` into the pieces joined by ``parent`` links, keeping relative order."""
    head: dict[int, int] = {}
    pieces: dict[int, list[int]] = {}
    for x in order:
        p = parent.get(x)
        h = head[p] if p is not None and p in head else x
        head[x] = h
        pieces.setdefault(h, []).append(x)
    return list(pieces.values())


def _fallback(g: Graph, order, parent, cand, phi: Embedding, budget: int, failure: EmbedFailure,
              stats: dict | None) -> None:
    """Complete ``phi`` by search after the greedy pass failed, or re-raise ``failure``.

    Each connected piece is first searched on its own, which proves most
    infeasible instances quickly; then all pieces are searched together.
    """
    if stats is not None:
        stats["greedy_failed"] = str(failure)
    if budget <= 0:
        raise failure
    pieces = _components(order, parent)
    order = [x for piece in pieces for x in piece]
    try:
        found: dict[int, int] | None = {}
        if len(pieces) > 1:
            for piece in pieces:
                if _search_extend(g, piece, parent, cand, phi, budget) is None:
                    found = None
                    break
        if found is not None:
            found = _search_extend(g, order, parent, cand, phi, budget)
    except _SearchExhausted:
        if stats is not None:
            stats["search"] = "budget exhausted"
        raise EmbedFailure(f"{failure}; search budget of {budget} nodes exhausted", stuck=failure.stuck,
                           state={**failure.state, "search": "budget exhausted"}) from None
    if found is None:
        if stats is not None:
            stats["search"] = "infeasible"
        raise EmbedFailure(f"{failure}; no embedding into the candidate sets exists", stuck=failure.stuck,
                           state={**failure.state, "search": "infeasible"})
    for x in order:
        phi.assign(x, found[x])
    if stats is not None:
        stats["search"] = "completed"


# -- seeds ----------------------------------------------------------------------


def non_typical_mask(g: Graph, X: Iterable[int], ymask: int, base_density: Fraction, eps: Fraction) -> int:
    """Vertices of X with fewer than (base_density - eps)|Y'| neighbours in Y'."""
    size = ymask.bit_count()
    thr = (base_density - eps) * size
    out = 0
    for x in X:
        if (g.adj_mask(x) & ymask).bit_count() < thr:
            out |= 1 << x
    return out


def pair_density_masks(g: Graph, xmask: int, ymask: int) -> Fraction:
    e = sum((g.adj_mask(x) & ymask).bit_count() for x in iter_bits(xmask))
    return Fraction(e, xmask.bit_count() * ymask.bit_count())


def dfs_order(t: Tree, root: int) -> tuple[list[int], dict[int, int]]:
    order, seen = [], [False] * t.n
    stack = [root]
    seen[root] = True
    parent = {root: -1}
    while stack:
        v = stack.pop()
        order.append(v)
        for u in sorted(t.neighbors(v), reverse=True):
            if not seen[u]:
                seen[u] = True
                parent[u] = v
                stack.append(u)
    return order, parent


def embed_seeds(t: Tree, part: OneSidedPartition, g: Graph, v1: Sequence[int], v2: Sequence[int],
                U: Iterable[int], density, eps, *, gamma=None, k: int | None = None,
                phi: Embedding | None = None, avoid: int = 0, typical_eps=None, strict: bool = True,
                log: list | None = None, search_budget: int = DEFAULT_SEARCH_BUDGET,
                stats: dict | None = None) -> Embedding:
    """Embed ``W`` into ``v1 - U`` and the ``D''`` singletons into ``v2``.

    Vertices are processed in depth-first order from a root outside
    ``D''``; each goes to the lowest free vertex of its cluster that is
    typical to the other cluster and adjacent to its already embedded
    parent.  ``density`` is the density floor of the pair.

    ``avoid`` is a host mask that is never used (a reserve set).
    ``typical_eps`` (default ``eps``) is the tolerance of the typicality
    filter; it should be the regularity parameter the pair is certified at.  With
    ``strict`` a violated budget raises; otherwise it is appended to ``log``
    and the embedding is attempted anyway.  ``search_budget`` bounds the
    fallback search (0 disables it); ``stats`` receives what happened.
    """
    eps = as_fraction(eps)
    d = as_fraction(density)
    v1m, v2m = mask_of(v1), mask_of(v2)
    Um = _as_mask(U)
    W = part.W
    Dpp = {next(iter(K)) for K in part.D_doubleprime}
    problems = []
    actual = pair_density_masks(g, v1m, v2m)
    if actual < d:
        problems.append(f"pair density {actual} is below the floor {d}")
    if Um & ~v1m:
        problems.append("U must be a subset of v1")
    if not _sqrt_le(Fraction(Um.bit_count()), eps, Fraction(2 * len(v1))):
        problems.append(f"|U| = {Um.bit_count()} exceeds 2 sqrt(eps) |v1|")
    budget = len(W) + len(Dpp)
    if budget > d / 4 * len(v1):
        problems.append(f"|W| + |D''| = {budget} exceeds (d/4)|v1| = {d / 4 * len(v1)}")
    if gamma is not None and k is not None:
        cap = as_fraction(gamma) * k
        if part.delta_cap > cap:
            problems.append(f"max degree on V2 is {part.delta_cap} > gamma k = {cap}")
    if problems:
        if strict:
            raise PreconditionError("; ".join(problems))
        if log is not None:
            log.extend(problems)

    phi = phi if phi is not None else Embedding()
    teps = eps if typical_eps is None else as_fraction(typical_eps)
    bad = non_typical_mask(g, v1, v2m, actual, teps) | non_typical_mask(g, v2, v1m, actual, teps)
    allowed1 = v1m & ~Um & ~bad & ~avoid
    allowed2 = v2m & ~bad & ~avoid
    root = t.root if t.root not in Dpp else min(v for v in range(t.n) if v not in Dpp)
    order, parent = dfs_order(t, root)
    todo = [x for x in order if (x in W or x in Dpp) and x not in phi]
    for x in todo:
        if x in Dpp and parent[x] not in W:
            raise EmbedFailure("a D'' vertex has no seed parent", stuck=x, state={"map": dict(phi.map)})
    placed: list[int] = []
    try:
        for x in todo:
            target = allowed1 if x in W else allowed2
            y = parent[x]
            cand = target & ~phi.used
            if y != -1 and y in phi and (y in W or y in Dpp):
                cand &= g.adj_mask(phi[y])
            if not cand:
                raise EmbedFailure("no free typical neighbour left for a seed-level vertex", stuck=x,
                                   state={"map": dict(phi.map), "parent": y})
            phi.assign(x, lowest(cand))
            placed.append(x)
    except EmbedFailure as failure:
        for x in placed:
            phi.remove(x)
        links = {x: (parent[x] if parent[x] in W or parent[x] in Dpp else None) for x in todo}
        plain = {x: (v1m & ~Um & ~avoid) if x in W else (v2m & ~avoid) for x in todo}
        _fallback(g, todo, links, plain, phi, search_budget, failure, stats)
    return phi


# -- microtrees -----------------------------------------------------------------


def embed_microtree(t: Tree, K: Iterable[int], g: Graph, u: Sequence[int], v: Sequence[int],
                    anchors: Sequence[int], attach: Sequence[int], U: Iterable[int], density, eps, *,
                    phi: Embedding | None = None, beta=None, k: int | None = None,
                    u_class: int | None = None, typical_eps=None, strict: bool = True,
                    log: list | None = None, search_budget: int = DEFAULT_SEARCH_BUDGET,
                    stats: dict | None = None) -> Embedding:
    """Embed the microtree ``K`` into the pair (u, v), extending ``phi`` in place.

    ``anchors`` are host vertices (images of the seeds next to ``K``) and
    ``attach[i]`` is the vertex of ``K`` that must land on a neighbour of
    ``anchors[i]`` inside ``u``.  Vertices of K in the colour class of the
    attachment vertices go to ``u``, the others to ``v``.  The path between
    two attachment vertices is laid out alternately in u and v and closed
    through an edge between the two candidate sets; the rest is greedy.
    ``typical_eps`` (default ``eps``) is the tolerance of the typicality filter.
    ``search_budget`` and ``stats`` are as for :func:`embed_seeds`.
    """
    eps = as_fraction(eps)
    d = as_fraction(density)
    Kset = set(K)
    anchors = list(anchors)
    attach = list(attach)
    if len(anchors) != len(attach):
        raise PreconditionError("need one attachment vertex per anchor")
    if len(anchors) == 2 and (anchors[0] == anchors[1]) != (attach[0] == attach[1]):
        raise PreconditionError("anchors coincide iff attachment vertices coincide")
    um, vm = mask_of(u), mask_of(v)
    Um = _as_mask(U)
    phi = phi if phi is not None else Embedding()
    for x in attach:
        if x not in Kset:
            raise PreconditionError(f"attachment vertex {x} is not in K")
    if len(attach) == 2 and t.colour[attach[0]] != t.colour[attach[1]]:
        raise PreconditionError("attachment vertices must share a colour class of K")
    cls_u = t.colour[attach[0]] if attach else (u_class if u_class is not None else t.colour[min(Kset)])

    problems = []
    free_u = um & ~Um
    free_v = vm & ~Um
    if not _sqrt_ge(Fraction(free_u.bit_count()), eps, Fraction(4 * len(u))) or free_u == 0:
        problems.append(f"|u - U| = {free_u.bit_count()} is below 4 sqrt(eps)|u|")
    if not _sqrt_ge(Fraction(free_v.bit_count()), eps, Fraction(4 * len(v))) or free_v == 0:
        problems.append(f"|v - U| = {free_v.bit_count()} is below 4 sqrt(eps)|v|")
    for a in anchors:
        got = (g.adj_mask(a) & free_u).bit_count()
        if got < 3 * eps * len(u):
            problems.append(f"anchor {a} has {got} < 3 eps |u| neighbours in u - U")
    if beta is not None and k is not None and len(Kset) > as_fraction(beta) * k:
        problems.append(f"|K| = {len(Kset)} exceeds beta k")
    if problems:
        if strict:
            raise PreconditionError("; ".join(problems))
        if log is not None:
            log.extend(problems)

    dens = pair_density_masks(g, um, vm)
    teps = eps if typical_eps is None else as_fraction(typical_eps)
    bad = 0
    if free_v:
        bad |= non_typical_mask(g, iter_bits(um), free_v, dens, teps)
    if free_u:
        bad |= non_typical_mask(g, iter_bits(vm), free_u, dens, teps)
    ok_u = um & ~Um & ~bad
    ok_v = vm & ~Um & ~bad

    def side(x):
        return ok_u if t.colour[x] == cls_u else ok_v

    placed: list[int] = []

    def put(x, cand, why):
        cand &= ~phi.used
        if not cand:
            raise EmbedFailure(why, stuck=x, state={"placed": placed.copy(), "anchors": anchors})
        phi.assign(x, lowest(cand))
        placed.append(x)

    start = attach[0] if attach else min(Kset)
    bfs, bfs_parent = [start], {start: None}
    for x in bfs:
        for y in t.neighbors(x):
            if y in Kset and y not in bfs_parent:
                bfs_parent[y] = x
                bfs.append(y)
    if len(bfs) != len(Kset):
        raise PreconditionError("K is not connected")

    def greedy() -> None:
        if not attach:
            put(start, side(start), "no free vertex for the microtree root")
        elif len(attach) == 1 or attach[0] == attach[1]:
            cand = ok_u
            for a in set(anchors):
                cand &= g.adj_mask(a)
            put(attach[0], cand, "no free neighbour of the anchor in u")
        else:
            path = _tree_path_within(t, Kset, attach[0], attach[1])
            r = len(path)
            if r % 2 == 0:
                raise AssertionError("attachment vertices at odd distance cannot share a colour class")
            put(path[0], ok_u & g.adj_mask(anchors[0]), "no free neighbour of the first anchor in u")
            for i in range(1, r - 2):
                put(path[i], side(path[i]) & g.adj_mask(phi[path[i - 1]]), "path step found no free neighbour")
            A = ok_v & g.adj_mask(phi[path[r - 3]]) & ~phi.used
            B = ok_u & g.adj_mask(anchors[1]) & ~phi.used
            closing = None
            for a in iter_bits(A):
                hit = g.adj_mask(a) & B
                if hit:
                    closing = (a, lowest(hit))
                    break
            if closing is None:
                raise EmbedFailure("no edge closes the path between the two candidate sets",
                                   stuck=path[r - 2], state={"placed": placed.copy(), "anchors": anchors})
            put(path[r - 2], 1 << closing[0], "closing vertex taken")
            put(path[r - 1], 1 << closing[1], "closing vertex taken")
        queue = deque(placed)
        while queue:
            x = queue.popleft()
            for y in t.neighbors(x):
                if y in Kset and y not in phi:
                    put(y, side(y) & g.adj_mask(phi[x]), "greedy step found no free neighbour")
                    queue.append(y)

    try:
        greedy()
    except EmbedFailure as failure:
        for y in placed:
            phi.remove(y)
        plain = {x: (free_u if t.colour[x] == cls_u else free_v) for x in bfs}
        for a, x in zip(anchors, attach):
            plain[x] &= g.adj_mask(a)
        _fallback(g, bfs, bfs_parent, plain, phi, search_budget, failure, stats)
    return phi


def _tree_path_within(t: Tree, Kset: set[int], a: int, b: int) -> list[int]:
    prev = {a: None}
    queue = deque([a])
    while queue:
        x = queue.popleft()
        if x == b:
            break
        for y in t.neighbors(x):
            if y in Kset and y not in prev:
                prev[y] = x
                queue.append(y)
    if b not in prev:
        raise PreconditionError("attachment vertices are not connected inside K")
    path = [b]
    while path[-1] != a:
        path.append(prev[path[-1]])
    return path[::-1]


def attachments(t: Tree, K: Iterable[int], W) -> list[tuple[int, int]]:
    """(seed, vertex of K) pairs for every tree edge leaving K towards W."""
    Kset = set(K)
    out = []
    for x in sorted(Kset):
        for y in t.neighbors(x):
            if y in W and y not in Kset:
                out.append((y, x))
    return out
