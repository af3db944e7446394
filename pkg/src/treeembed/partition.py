"""Fine partitions of trees into a few seeds and many small microtrees.

A *fine partition* with parameter ``ell`` is a quadruple
``(W_A, W_B, D_A, D_B)``:

1. ``W_A``, ``W_B`` and the vertex sets of the microtrees partition V(T);
2. ``max(|W_A|, |W_B|) <= 336 k / ell``;
3. two seeds are at odd distance iff they lie on different sides;
4. every microtree has at most ``ell`` vertices;
5. microtrees in ``D_A`` only touch ``W_A`` and those in ``D_B`` only ``W_B``;
6. every microtree touches at most two seeds;
7. two seeds touching the same microtree are at distance >= 6.

The *one-sided* variant ``(W, D' + D'')`` puts every seed in V1:
``W = W_A + N(W_B)``, the old ``W_B`` vertices become singleton
microtrees ``D''`` and the remaining components of ``T - W`` form ``D'``.

Construction (deterministic, never fails for ``1 <= ell < k``):

* root at vertex 0 and, in post-order, promote ``v`` to a seed once the
  non-seed part hanging below it exceeds ``ell``;
* close the seed set under lowest common ancestors, so every component of
  ``T - W`` has at most one seed above it and one below;
* for a component squeezed between seeds at distance ``L``: keep it when
  ``L`` is even and >= 6, seed the path vertex next to the upper seed when
  ``L`` is odd and >= 7, and seed the whole inner path when ``L <= 5``.

This uses at most ``10 (k+1)/(ell+1)`` seeds in total.  Seeds of colour V1
form ``W_A`` and seeds of colour V2 form ``W_B``, which gives property 3 and
the one-sided orientation for free.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .errors import PreconditionError
from .trees import V1, V2, Tree, tree_distance

FINE_CONST = 336


@dataclass(frozen=True)
class FinePartition:
    W_A: frozenset[int]
    W_B: frozenset[int]
    D_A: tuple[frozenset[int], ...]
    D_B: tuple[frozenset[int], ...]
    ell: int

    @property
    def seeds(self) -> frozenset[int]:
        return self.W_A | self.W_B

    def to_json(self) -> dict[str, Any]:
        return {
            "ell": self.ell,
            "W_A": sorted(self.W_A),
            "W_B": sorted(self.W_B),
            "D_A": [sorted(k) for k in self.D_A],
            "D_B": [sorted(k) for k in self.D_B],
        }


@dataclass(frozen=True)
class OneSidedPartition:
    W: frozenset[int]
    D_prime: tuple[frozenset[int], ...]
    D_doubleprime: tuple[frozenset[int], ...]
    ell: int
    delta_cap: int

    @property
    def microtrees(self) -> tuple[frozenset[int], ...]:
        return self.D_prime + self.D_doubleprime

    def to_json(self) -> dict[str, Any]:
        return {
            "ell": self.ell,
            "delta_cap": self.delta_cap,
            "W": sorted(self.W),
            "D_prime": [sorted(k) for k in self.D_prime],
            "D_doubleprime": [sorted(k) for k in self.D_doubleprime],
        }


@dataclass
class Check:
    ok: bool
    detail: str = ""
    witness: Any = None


@dataclass
class PartitionReport:
    checks: dict[str, Check] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks.values())

    def failures(self) -> dict[str, Check]:
        return {name: c for name, c in self.checks.items() if not c.ok}

    def to_json(self) -> dict[str, Any]:
        return {
            name: {"ok": c.ok, "detail": c.detail, "witness": _jsonable(c.witness)}
            for name, c in self.checks.items()
        }


def _jsonable(x):
    if isinstance(x, (set, frozenset)):
        return sorted(x)
    if isinstance(x, (list, tuple)):
        return [_jsonable(y) for y in x]
    if isinstance(x, Fraction):
        return str(x)
    return x


# -- construction ----------------------------------------------------------------


def _greedy_seeds(t: Tree, ell: int) -> list[bool]:
    seed = [False] * t.n
    rem = [1] * t.n
    for v in reversed(t.order):
        r = 1
        for c in t.children[v]:
            if not seed[c]:
                r += rem[c]
        rem[v] = r
        if r > ell:
            seed[v] = True
    return seed


def _close_under_lca(t: Tree, seed: list[bool]) -> None:
    below = [False] * t.n
    for v in reversed(t.order):
        hits = sum(1 for c in t.children[v] if below[c])
        if hits >= 2:
            seed[v] = True
        below[v] = seed[v] or hits > 0


def _space_anchors(t: Tree, seed: list[bool]) -> None:
    parent = t.parent
    new = []
    for s in range(t.n):
        p = parent[s]
        if not seed[s] or p == -1 or seed[p]:
            continue
        path = []  # from parent(s) upwards, stops at the first seed
        x = p
        while x != -1 and not seed[x]:
            path.append(x)
            x = parent[x]
        if x == -1:
            continue  # the component holds the root: only one anchor
        L = len(path) + 1
        if L % 2 == 0 and L >= 6:
            continue
        if L % 2 == 1 and L >= 7:
            new.append(path[-1])
        else:
            new.extend(path)
    for v in new:
        seed[v] = True


def _components(t: Tree, seed: list[bool]) -> tuple[list[list[int]], list[set[int]]]:
    comp = [-1] * t.n
    members: list[list[int]] = []
    for v in t.order:
        if seed[v]:
            continue
        p = t.parent[v]
        if p != -1 and not seed[p]:
            comp[v] = comp[p]
        else:
            comp[v] = len(members)
            members.append([])
        members[comp[v]].append(v)
    anchors: list[set[int]] = [set() for _ in members]
    for v in range(t.n):
        if seed[v]:
            for u in t.neighbors(v):
                if not seed[u]:
                    anchors[comp[u]].add(v)
    return members, anchors


def fine_partition(t: Tree, ell: int) -> FinePartition:
    """Deterministic fine partition of ``t`` with microtrees of size <= ell."""
    k = t.n - 1
    if not 1 <= ell < k:
        raise PreconditionError(f"need 1 <= ell < k, got ell={ell}, k={k}")
    seed = _greedy_seeds(t, ell)
    _close_under_lca(t, seed)
    _space_anchors(t, seed)
    members, anchors = _components(t, seed)
    D_A, D_B = [], []
    for mem, anc in zip(members, anchors):
        side = min(t.colour[a] for a in anc) if anc else V1
        (D_A if side == V1 else D_B).append(frozenset(mem))
    W_A = frozenset(v for v in range(t.n) if seed[v] and t.colour[v] == V1)
    W_B = frozenset(v for v in range(t.n) if seed[v] and t.colour[v] == V2)
    return FinePartition(W_A, W_B, tuple(D_A), tuple(D_B), ell)


def delta_v2(t: Tree) -> int:
    return t.max_degree(V2)


def one_sided_partition(t: Tree, ell: int, fine: FinePartition | None = None) -> OneSidedPartition:
    """One-sided partition: all seeds in V1 (the class *not* carrying the degree cap).

    ``W = W_A + N(W_B)``; each old ``W_B`` seed becomes a singleton in
    ``D''`` and the rest of ``T - W`` forms ``D'``.
    """
    if fine is None:
        fine = fine_partition(t, ell)
    if any(t.colour[w] != V2 for w in fine.W_B):
        # only a foreign fine partition can get here; swap roles
        fine = FinePartition(fine.W_B, fine.W_A, fine.D_B, fine.D_A, fine.ell)
    W = set(fine.W_A)
    for b in fine.W_B:
        W.update(t.neighbors(b))
    in_w = [False] * t.n
    for w in W:
        in_w[w] = True
    comp = [-1] * t.n
    members: list[list[int]] = []
    for v in t.order:
        if in_w[v]:
            continue
        p = t.parent[v]
        if p != -1 and not in_w[p]:
            comp[v] = comp[p]
        else:
            comp[v] = len(members)
            members.append([])
        members[comp[v]].append(v)
    singles = []
    rest = []
    for mem in members:
        if len(mem) == 1 and mem[0] in fine.W_B:
            singles.append(frozenset(mem))
        else:
            rest.append(frozenset(mem))
    return OneSidedPartition(frozenset(W), tuple(rest), tuple(singles), fine.ell, delta_v2(t))


# -- validation -----------------------------------------------------------------


def _boundary(t: Tree, part: frozenset[int]) -> set[int]:
    out = set()
    for v in part:
        for u in t.neighbors(v):
            if u not in part:
                out.add(u)
    return out


def _is_subtree(t: Tree, part: frozenset[int]) -> bool:
    if not part:
        return False
    start = next(iter(part))
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for u in t.neighbors(v):
            if u in part and u not in seen:
                seen.add(u)
                stack.append(u)
    return len(seen) == len(part)


def _check_cover(t: Tree, blocks: list[frozenset[int]]) -> Check:
    owner: dict[int, int] = {}
    for i, b in enumerate(blocks):
        for v in b:
            if not 0 <= v < t.n:
                return Check(False, f"vertex {v} is not in the tree", v)
            if v in owner:
                return Check(False, f"vertex {v} lies in two blocks", (v, owner[v], i))
            owner[v] = i
    missing = [v for v in range(t.n) if v not in owner]
    if missing:
        return Check(False, f"{len(missing)} vertices uncovered", missing[0])
    return Check(True)


def validate_fine_partition(t: Tree, p: FinePartition) -> PartitionReport:
    """Check all seven properties, recording a witness for each failure."""
    rep = PartitionReport()
    k = t.n - 1
    trees = list(p.D_A) + list(p.D_B)
    seeds = p.W_A | p.W_B

    cover = _check_cover(t, [p.W_A, p.W_B] + trees)
    if cover.ok:
        bad = next((K for K in trees if not _is_subtree(t, K)), None)
        if bad is not None:
            cover = Check(False, "a microtree is not connected", sorted(bad))
    rep.checks["1_partition"] = cover

    big = max(len(p.W_A), len(p.W_B))
    bound = Fraction(FINE_CONST * k, p.ell)
    rep.checks["2_seed_count"] = Check(big <= bound, f"max(|W_A|,|W_B|)={big}, bound={bound}", big)

    parity = Check(True)
    wa, wb = sorted(p.W_A), sorted(p.W_B)
    ref = wa[0] if wa else (wb[0] if wb else None)
    if ref is not None:
        ref_side = ref in p.W_A
        for w in wa + wb:
            odd = tree_distance(t, ref, w) % 2 == 1
            if odd != ((w in p.W_A) != ref_side):
                parity = Check(False, "seed distance parity disagrees with sides", (ref, w))
                break
    rep.checks["3_parity"] = parity

    oversized = next((K for K in trees if len(K) > p.ell), None)
    rep.checks["4_size"] = Check(
        oversized is None,
        "" if oversized is None else f"microtree of size {len(oversized)} > {p.ell}",
        None if oversized is None else sorted(oversized),
    )

    side = Check(True)
    touch = Check(True)
    spacing = Check(True)
    for fam, own in ((p.D_A, p.W_A), (p.D_B, p.W_B)):
        for K in fam:
            nb = _boundary(t, K)
            if side.ok and not nb <= own:
                side = Check(False, "microtree touches a vertex outside its own seed side", (sorted(K), sorted(nb - own)))
            z = sorted(nb & seeds)
            if touch.ok and len(z) > 2:
                touch = Check(False, f"microtree touches {len(z)} seeds", z)
            if spacing.ok and len(z) == 2 and tree_distance(t, z[0], z[1]) < 6:
                spacing = Check(False, f"anchors at distance {tree_distance(t, z[0], z[1])} < 6", tuple(z))
    rep.checks["5_sides"] = side
    rep.checks["6_two_anchors"] = touch
    rep.checks["7_anchor_distance"] = spacing
    return rep


def validate_one_sided(t: Tree, p: OneSidedPartition) -> PartitionReport:
    """Check the five one-sided properties plus ``W`` inside V1."""
    rep = PartitionReport()
    k = t.n - 1
    delta = delta_v2(t)
    trees = list(p.D_prime) + list(p.D_doubleprime)

    cover = _check_cover(t, [p.W] + trees)
    if cover.ok:
        bad = next((K for K in trees if not _is_subtree(t, K)), None)
        if bad is not None:
            cover = Check(False, "a microtree is not connected", sorted(bad))
    rep.checks["1_partition"] = cover

    bound = Fraction(FINE_CONST * k * (1 + delta), p.ell)
    rep.checks["2_seed_count"] = Check(len(p.W) <= bound, f"|W|={len(p.W)}, bound={bound}", len(p.W))

    oversized = next((K for K in trees if len(K) > p.ell), None)
    rep.checks["3_size"] = Check(
        oversized is None,
        "" if oversized is None else f"microtree of size {len(oversized)} > {p.ell}",
        None if oversized is None else sorted(oversized),
    )

    closed = Check(True)
    for K in trees:
        nb = _boundary(t, K)
        if not nb <= p.W:
            closed = Check(False, "microtree neighbourhood leaves W", (sorted(K), sorted(nb - p.W)))
            break
    rep.checks["4_neighbourhood"] = closed

    split = Check(True)
    for K in p.D_prime:
        z = sorted(_boundary(t, K) & p.W)
        if len(z) > 2:
            split = Check(False, f"D' tree touches {len(z)} seeds", z)
            break
        if len(z) == 2 and tree_distance(t, z[0], z[1]) < 4:
            split = Check(False, "D' anchors at distance < 4", tuple(z))
            break
    if split.ok:
        cap = Fraction(FINE_CONST * k, p.ell)
        if len(p.D_doubleprime) > cap:
            split = Check(False, f"|D''|={len(p.D_doubleprime)} > {cap}", len(p.D_doubleprime))
    if split.ok:
        for K in p.D_doubleprime:
            if len(K) != 1:
                split = Check(False, "D'' tree is not a single vertex", sorted(K))
                break
            (v,) = K
            nw = sum(1 for u in t.neighbors(v) if u in p.W)
            if nw > delta:
                split = Check(False, f"D'' vertex has {nw} > {delta} neighbours in W", v)
                break
    rep.checks["5_split"] = split

    outside = sorted(w for w in p.W if t.colour[w] != V1)
    rep.checks["W_in_V1"] = Check(not outside, "" if not outside else "seed outside V1", outside[:1] or None)
    return rep
