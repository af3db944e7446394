"""The saturation embedder: matching structure, reserve set and three phases.

The host is first cleaned at cluster level (:func:`preprocess_host`), the
tree is cut into a one-sided fine partition, the seeds go into the hub
cluster ``v1`` and the microtrees are then spread over the matching
structure around ``v1``:

* phase 1 fills matching edges ``uv`` (colour class V2 into ``u``),
* phase 2 fills the independent neighbours ``O1`` of ``v1``,
* phase 3 rebalances and saturates the matching edges,

and the last few microtrees go into the reserve set ``F``.  Every
inequality the argument relies on is recorded in an :class:`Audit`.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .audit import PRACTICAL, Audit
from .constants import ConstantSchedule, fourth_root_le
from .embedding import Embedding, attachments, embed_microtree, embed_seeds, greedy_embed
from .errors import EmbedFailure, NoEligibleTree, PreconditionError, StructureError
from .graph import Graph, iter_bits, mask_of
from .partition import OneSidedPartition, delta_v2, one_sided_partition
from .regularity import ClusterGraph, preprocess_host, regular_partition
from .trees import Tree
from .validate import validate_embedding


# -- matching structure -----------------------------------------------------------


@dataclass
class MatchingStructure:
    v1: int
    M: list[tuple[int, int]]
    M1: set[int]
    M2: set[int]
    O1: set[int]
    O2: set[int]
    deleted: list[int] = field(default_factory=list)
    erased: list[tuple[int, int]] = field(default_factory=list)

    def partner(self, c: int) -> int | None:
        for a, b in self.M:
            if a == c:
                return b
            if b == c:
                return a
        return None

    @property
    def hub_neighbours(self) -> set[int]:
        return self.M1 | self.M2 | self.O1

    def to_json(self) -> dict[str, Any]:
        return {
            "v1": self.v1,
            "M": [list(e) for e in self.M],
            "M1": sorted(self.M1),
            "M2": sorted(self.M2),
            "O1": sorted(self.O1),
            "O2": sorted(self.O2),
            "deleted": self.deleted,
            "erased": [list(e) for e in self.erased],
        }


def _neighbour_map(cg: ClusterGraph) -> dict[int, set[int]]:
    nb: dict[int, set[int]] = {i: set() for i in cg.alive}
    for a, b in cg.weights:
        nb.setdefault(a, set()).add(b)
        nb.setdefault(b, set()).add(a)
    return nb


def _derive_O(cg: ClusterGraph, v1: int, M: list[tuple[int, int]]) -> tuple[set[int], set[int], set[int], set[int]]:
    nb = _neighbour_map(cg)
    N = nb.get(v1, set())
    matched = {x for e in M for x in e}
    O1 = N - matched
    M1, M2 = set(), set()
    for a, b in M:
        ha, hb = bool(nb[a] & O1), bool(nb[b] & O1)
        if ha and hb:
            raise StructureError(f"both ends of matching edge {a}-{b} see N(v1) - M")
        if hb or not ha:
            M1.add(a)
            M2.add(b)
        else:
            M1.add(b)
            M2.add(a)
    O2 = set()
    for o in O1:
        O2 |= nb[o]
    O2 -= {v1} | matched
    return M1, M2, O1, O2


def build_matching_structure(cg: ClusterGraph, v1: int, eta, audit: Audit | None = None) -> MatchingStructure:
    """Greedy maximal matching in N(v1), cleaned up so that one side of every edge is private.

    ``cg`` is modified in place: clusters deleted by the cleanup are removed
    and erased cluster edges dropped.
    """
    audit = audit or Audit(PRACTICAL)
    eta = Fraction(eta) if not isinstance(eta, Fraction) else eta
    if v1 not in cg.alive:
        raise PreconditionError(f"cluster {v1} is not present")
    m = len(cg.clusters)
    nb = _neighbour_map(cg)
    N = set(nb[v1])
    mate: dict[int, int] = {}
    for u in sorted(N):
        if u in mate:
            continue
        for w in sorted(nb[u] & N):
            if w not in mate:
                mate[u], mate[w] = w, u
                break

    # remove augmenting paths x - a = b - y with x, y unmatched
    changed = True
    while changed:
        changed = False
        free = N - set(mate)
        for a in sorted(mate):
            b = mate[a]
            for x in sorted(nb[a] & free):
                ys = sorted((nb[b] & free) - {x})
                if ys:
                    y = ys[0]
                    mate[x], mate[a] = a, x
                    mate[b], mate[y] = y, b
                    changed = True
                    break
            if changed:
                break

    M = sorted({(min(a, b), max(a, b)) for a, b in mate.items()})
    deleted: list[int] = []
    erased: list[tuple[int, int]] = []
    limit = eta * m / 40
    for x in sorted(N - set(mate)):
        common = [(a, b) for a, b in M if a in nb[x] and b in nb[x]]
        if not common:
            continue
        if len(common) >= limit:
            cg.remove_cluster(x)
            deleted.append(x)
        else:
            for a, b in common:
                cg.remove_edge(x, a)
                cg.remove_edge(x, b)
                erased += [(x, a), (x, b)]
        nb = _neighbour_map(cg)
    audit.check("clusters deleted by the matching cleanup <= 40/eta", len(deleted) <= 40 / eta,
                len(deleted), 40 / eta)

    M1, M2, O1, O2 = _derive_O(cg, v1, M)
    ms = MatchingStructure(v1, [(a, b) if a in M1 else (b, a) for a, b in M], M1, M2, O1, O2, deleted, erased)
    check_structure(cg, ms, audit)
    return ms


def check_structure(cg: ClusterGraph, ms: MatchingStructure, audit: Audit) -> bool:
    nb = _neighbour_map(cg)
    N = nb.get(ms.v1, set())
    ok = True
    ok &= audit.check("O1 is independent", all(not (nb[o] & ms.O1) for o in ms.O1))
    ok &= audit.check("M is maximal in N(v1)", all(not (nb[o] & ms.O1) for o in ms.O1)
                      and N == ms.M1 | ms.M2 | ms.O1)
    ok &= audit.check("only M2 clusters see O1", all(not (nb[u] & ms.O1) for u in ms.M1))
    ok &= audit.check("O2 avoids N(v1)", not (ms.O2 & N))
    return ok


# -- engine -----------------------------------------------------------------------


def _take_high(mask: int, count: int) -> int:
    """The ``count`` highest set bits of ``mask``."""
    out = 0
    while count > 0 and mask:
        top = 1 << (mask.bit_length() - 1)
        out |= top
        mask ^= top
        count -= 1
    return out


@dataclass
class Placement:
    tree: int
    a: int
    b: int
    phase: str


class SaturationEngine:
    """Mutable state of one run: embedding, reserve set and placement log."""

    def __init__(self, g: Graph, t: Tree, part: OneSidedPartition, cg: ClusterGraph, ms: MatchingStructure,
                 schedule: ConstantSchedule, audit: Audit, typical_eps=None):
        self.g = g
        self.t = t
        self.part = part
        self.cg = cg
        self.ms = ms
        self.s = schedule
        self.audit = audit
        self.k = t.n - 1
        self.teps = schedule.eps if typical_eps is None else Fraction(typical_eps)
        self.v1 = ms.v1
        self.cmask = {i: mask_of(c) for i, c in enumerate(cg.clusters)}
        self.csize = {i: len(c) for i, c in enumerate(cg.clusters)}
        self.phi = Embedding()
        self.F = 0
        self.F_sub: dict[int, int] = {}
        self.G_sub: dict[int, tuple[int | None, int]] = {}
        self.trees = list(part.D_prime)
        self.tree_att = [attachments(t, K, part.W) for K in self.trees]
        self.tree_v2 = [sum(1 for x in K if t.colour[x] == 1) for K in self.trees]
        self.where: dict[int, Placement] = {}
        self.log: list[dict[str, Any]] = []
        self.embed_failures: list[dict[str, Any]] = []
        self.precondition_notes: list[str] = []
        self.finishing_fallback = False
        v1m = self.cmask[self.v1]
        v1_list = cg.clusters[self.v1]
        self.deg_v1: dict[int, Fraction] = {}
        self.typ: dict[int, int] = {}
        for c in range(len(cg.clusters)):
            if c == self.v1:
                continue
            cm = self.cmask[c]
            e = sum((g.adj_mask(x) & cm).bit_count() for x in v1_list)
            self.deg_v1[c] = Fraction(e, len(v1_list))
            dens = Fraction(e, len(v1_list) * self.csize[c])
            thr = (dens - self.teps) * self.csize[c]
            self.typ[c] = mask_of(x for x in v1_list if (g.adj_mask(x) & cm).bit_count() >= thr)
        self.typ_F: dict[int, int] = {}
        del v1m

    # -- bookkeeping --

    def used(self, c: int) -> int:
        return ((self.phi.used | self.F) & self.cmask[c]).bit_count()

    def used_tree(self, c: int) -> int:
        return (self.phi.used & self.cmask[c]).bit_count()

    def full(self, c: int) -> bool:
        x = self.csize[c] - self.used(c)
        return x <= 0 or x * x <= 16 * self.s.eps * self.csize[c] ** 2

    def saturated(self, c: int) -> bool:
        x = self.deg_v1[c] - self.used(c)
        return x <= 0 or x * x <= 16 * self.s.eps * self.csize[c] ** 2

    def edge_saturated(self, u: int, v: int) -> bool:
        x = self.deg_v1[u] + self.deg_v1[v] - self.s.beta * self.k - self.used(u) - self.used(v)
        return x <= 0 or x * x <= 64 * self.s.eps * self.csize[u] ** 2

    def done(self) -> bool:
        x = self.k - len(self.phi)
        return x <= 0 or fourth_root_le(x, self.s.eps, self.k)

    def remaining(self) -> list[int]:
        return [i for i in range(len(self.trees)) if i not in self.where]

    def remaining_volume(self) -> int:
        return sum(len(self.trees[i]) for i in self.remaining())

    def nice(self, i: int, c: int, typ: dict[int, int] | None = None) -> bool:
        tm = (typ or self.typ).get(c, 0)
        return all((tm >> self.phi[w]) & 1 for w, _ in self.tree_att[i])

    def imbalance(self, u: int, v: int) -> int:
        return self.used_tree(u) - self.used_tree(v)

    # -- seeds, pruning and F --

    def fix_reserve_subsets(self) -> None:
        """Fix F_u for u in M1 + O1 (highest ids) and the typicality of v1 to them."""
        s = self.s
        for u in sorted(self.ms.M1 | self.ms.O1):
            size = int(s.eta * s.r * s.d * self.csize[u] / 300)
            self.F_sub[u] = _take_high(self.cmask[u], size)
        v1_list = self.cg.clusters[self.v1]
        for u, Fu in self.F_sub.items():
            if not Fu:
                continue
            dens = Fraction(sum((self.g.adj_mask(x) & Fu).bit_count() for x in v1_list), len(v1_list) * Fu.bit_count())
            thr = (dens - self.teps) * Fu.bit_count()
            self.typ_F[u] = mask_of(x for x in v1_list if (self.g.adj_mask(x) & Fu).bit_count() >= thr)

    def seed_exclusion_set(self) -> int:
        """v1 vertices not typical to more than sqrt(eps) m neighbouring clusters or their F-subsets."""
        targets = sorted(self.ms.hub_neighbours)
        m = len(self.cg.clusters)
        U = 0
        for x in self.cg.clusters[self.v1]:
            bad = sum(1 for c in targets if not (self.typ[c] >> x) & 1)
            bad += sum(1 for c, tm in self.typ_F.items() if not (tm >> x) & 1)
            if bad * bad > self.s.eps * m * m:
                U |= 1 << x
        size = len(self.cg.clusters[self.v1])
        self.audit.check("|U| <= 2 sqrt(eps) |v1|", U.bit_count() ** 2 <= 4 * self.s.eps * size * size,
                         U.bit_count(), None)
        return U

    def embed_seed_level(self, v2: int) -> None:
        U = self.seed_exclusion_set()
        notes: list[str] = []
        reserve = 0
        for Fu in self.F_sub.values():
            reserve |= Fu
        embed_seeds(self.t, self.part, self.g, self.cg.clusters[self.v1], self.cg.clusters[v2], U,
                    self.s.d, self.s.eps, gamma=self.s.gamma, k=self.k, phi=self.phi, avoid=reserve,
                    typical_eps=self.teps, strict=False, log=notes)
        self.precondition_notes += [f"seeds: {x}" for x in notes]
        self.log.append({"phase": "seeds", "v2": v2, "placed": len(self.phi)})

    def prune_not_nice(self) -> list[int]:
        """Delete hub neighbours to which too much microtree volume is not nice."""
        removed = []
        for c in sorted(self.ms.hub_neighbours):
            vol = sum(len(self.trees[i]) for i in range(len(self.trees)) if not self.nice(i, c))
            if not fourth_root_le(vol, self.s.eps, self.k):
                removed.append(c)
        self.audit.note(f"not-nice pruning removes clusters {removed}")
        for c in list(removed):
            p = self.ms.partner(c)
            if p is not None and p not in removed:
                removed.append(p)
        for c in removed:
            self.cg.remove_cluster(c)
        if removed:
            self.ms.M = [e for e in self.ms.M if e[0] not in removed and e[1] not in removed]
            M1, M2, O1, O2 = _derive_O(self.cg, self.v1, [tuple(e) for e in self.ms.M])
            self.ms.M1, self.ms.M2, self.ms.O1, self.ms.O2 = M1, M2, O1, O2
            self.ms.M = [(a, b) if a in M1 else (b, a) for a, b in self.ms.M]
            check_structure(self.cg, self.ms, self.audit)
        return removed

    def reserve_F(self) -> None:
        """Assemble F from the fixed F_u and partner sets G_u, keeping matching edges balanced."""
        s = self.s
        self.F_sub = {u: Fu for u, Fu in self.F_sub.items() if u in self.ms.M1 | self.ms.O1}
        F = 0
        for Fu in self.F_sub.values():
            F |= Fu
        free = lambda c: self.cmask[c] & ~F & ~self.phi.used  # noqa: E731
        for u, v in self.ms.M:
            size = self.F_sub.get(u, 0).bit_count()
            Gu = _take_high(free(v), size)
            self.G_sub[u] = (v, Gu)
            F |= Gu
        nb = _neighbour_map(self.cg)
        for u in sorted(self.ms.O1):
            size = self.F_sub.get(u, 0).bit_count()
            if size == 0:
                self.G_sub[u] = (None, 0)
                continue
            cands = sorted(nb[u] & (self.ms.M2 | self.ms.O2))
            host = next((c for c in cands if free(c).bit_count() >= size), None)
            if host is None:
                raise StructureError(f"no neighbour of O1 cluster {u} can host its reserve partner set")
            Gu = _take_high(free(host), size)
            F |= Gu
            self.G_sub[u] = (host, Gu)
            if host in self.ms.M2:
                mate = self.ms.partner(host)
                F |= _take_high(self.cmask[mate] & ~F & ~self.phi.used, size)
        self.F = F
        bound = s.eta * s.r * sum(self.deg_v1[c] for c in self.ms.hub_neighbours) / 100
        self.audit.check("|F| <= eta r deg(v1)/100", F.bit_count() <= bound, F.bit_count(), bound)
        self.check_F()

    def check_F(self) -> bool:
        ok = self.audit.check("F is disjoint from the embedding", not (self.F & self.phi.used))
        ok &= self.audit.check("|F cap u| = |F cap v| on matching edges",
                               all((self.F & self.cmask[u]).bit_count() == (self.F & self.cmask[v]).bit_count()
                                   for u, v in self.ms.M))
        ok &= self.audit.check("F_u inside F for u in M1 + O1",
                               all(Fu & ~self.F == 0 for Fu in self.F_sub.values()))
        return ok

    # -- placing microtrees --

    def _embed(self, i: int, a_list, b_list, U, notes: list[str]) -> bool:
        # greedy pass only: on failure the placement loop moves on to the next tree or cluster pair,
        # and a search over nearly full clusters would mostly prove infeasibility slowly
        anchors = [self.phi[w] for w, _ in self.tree_att[i]]
        attach = [x for _, x in self.tree_att[i]]
        try:
            embed_microtree(self.t, self.trees[i], self.g, a_list, b_list, anchors, attach, U, self.s.d,
                            self.s.eps, phi=self.phi, beta=self.s.beta, k=self.k, typical_eps=self.teps,
                            strict=False, log=notes, search_budget=0)
        except (EmbedFailure, PreconditionError) as exc:
            self.embed_failures.append({"tree": i, "error": str(exc)})
            return False
        return True

    def place(self, a: int, b: int, phase: str, choose=None) -> int:
        """Embed one unembedded microtree with V2 into ``a`` and V1 into ``b``.

        ``choose`` optionally filters candidate tree indices.  Raises
        :class:`NoEligibleTree` when nothing can be placed.
        """
        self.audit.check(f"{phase}: target cluster {a} not saturated", not self.saturated(a))
        self.audit.check(f"{phase}: partner cluster {b} not full", not self.full(b))
        notes: list[str] = []
        for i in self.remaining():
            if choose is not None and not choose(i):
                continue
            if not self.nice(i, a):
                continue
            before = len(self.phi)
            if self._embed(i, self.cg.clusters[a], self.cg.clusters[b], self.phi.used | self.F, notes):
                self.where[i] = Placement(i, a, b, phase)
                self.log.append({"phase": phase, "tree": i, "a": a, "b": b, "size": len(self.phi) - before})
                if notes:
                    self.precondition_notes.append(f"{phase} tree {i}: " + "; ".join(sorted(set(notes))))
                return i
        vol = self.remaining_volume()
        self.audit.check(f"{phase}: no eligible tree only below the volume threshold",
                         fourth_root_le(vol, self.s.eps, self.k), vol, None)
        raise NoEligibleTree(f"no microtree can be placed with V2 in cluster {a} and V1 in cluster {b}")

    def unembed(self, i: int) -> None:
        for x in self.trees[i]:
            if x in self.phi:
                self.phi.remove(x)
        del self.where[i]
        self.log.append({"phase": "unembed", "tree": i})

    # -- phases --

    def phase1(self) -> None:
        for u, v in sorted(self.ms.M):
            while not (self.saturated(u) or self.full(v) or self.done()):
                try:
                    self.place(u, v, "phase1")
                except NoEligibleTree:
                    break
            self.audit.check(f"phase 1 exit on edge {u}-{v}: u saturated or v full or done",
                             self.saturated(u) or self.full(v) or self.done())

    def phase2(self) -> None:
        nb = _neighbour_map(self.cg)
        for u in sorted(self.ms.O1):
            while not (self.saturated(u) or self.done()):
                targets = [b for b in sorted(nb[u] & (self.ms.M2 | self.ms.O2)) if not self.full(b)]
                if not self.audit.check(f"phase 2: O1 cluster {u} has a non-full neighbour", bool(targets)):
                    break
                placed = False
                for b in targets:
                    try:
                        self.place(u, b, "phase2")
                        placed = True
                        break
                    except NoEligibleTree:
                        continue
                if not placed:
                    break

    def _trees_on(self, u: int, v: int) -> list[int]:
        return sorted(i for i, p in self.where.items() if {p.a, p.b} == {u, v})

    def _in(self, i: int, c: int) -> int:
        cm = self.cmask[c]
        return sum(1 for x in self.trees[i] if x in self.phi and (cm >> self.phi[x]) & 1)

    def phase3(self) -> None:
        bk = self.s.beta * self.k
        for u, v in sorted(self.ms.M):
            if self.done():
                break
            if self.edge_saturated(u, v):
                continue
            if self.saturated(u):
                # (a) push V2 into v until u is full or v saturated
                while not (self.full(u) or self.saturated(v) or self.done()):
                    try:
                        self.place(v, u, "phase3a")
                    except NoEligibleTree:
                        break
                if self.saturated(v) or self.done():
                    continue
                # (b) u is full: drop trees that sit mostly in u
                while self.used_tree(u) >= self.used_tree(v):
                    cands = [i for i in self._trees_on(u, v) if self._in(i, u) >= self._in(i, v)]
                    if not cands:
                        break
                    cur = self.imbalance(u, v)

                    def score(i):
                        after = cur - self._in(i, u) + self._in(i, v)
                        return (after < -bk, abs(after), i)

                    self.unembed(min(cands, key=score))
                self.audit.check(f"balancing condition on edge {u}-{v} after phase 3(b)",
                                 abs(self.imbalance(u, v)) <= bk, self.imbalance(u, v), bk)
            else:
                for i in self._trees_on(u, v):
                    self.unembed(i)
            self._phase3c(u, v)

    def _phase3c(self, u: int, v: int) -> None:
        bk = self.s.beta * self.k
        while not self.done():
            su, sv = self.saturated(u), self.saturated(v)
            if su and sv:
                break
            if not su and not sv:
                fuller, other = (u, v) if self.used_tree(u) >= self.used_tree(v) else (v, u)
                placed = False
                for i in self.remaining():
                    small_is_v2 = 2 * self.tree_v2[i] <= len(self.trees[i])
                    a, b = (fuller, other) if small_is_v2 else (other, fuller)
                    if self.saturated(a) or self.full(b) or not self.nice(i, a):
                        continue
                    try:
                        self.place(a, b, "phase3c", choose=lambda j, i=i: j == i)
                        placed = True
                        break
                    except NoEligibleTree:
                        continue
                if not placed:
                    break
                self.audit.check(f"phase 3(c) keeps the balancing condition on {u}-{v}",
                                 abs(self.imbalance(u, v)) <= bk, self.imbalance(u, v), bk)
            else:
                sat, other = (u, v) if su else (v, u)
                if self.full(sat):
                    break
                try:
                    self.place(other, sat, "phase3c")
                except NoEligibleTree:
                    break
        self.audit.check(f"phase 3 exit on edge {u}-{v}: saturated or done",
                         self.edge_saturated(u, v) or self.done())

    def finish(self) -> None:
        """Embed the leftover microtrees into F, falling back to any usable pair."""
        d = self.s.d
        nb = _neighbour_map(self.cg)
        for i in self.remaining():
            notes: list[str] = []
            placed = False
            for u in sorted(self.F_sub):
                Fu = self.F_sub[u]
                host, Gu = self.G_sub.get(u, (None, 0))
                if not Fu or not Gu or not self.nice(i, u, self.typ_F):
                    continue
                if (self.phi.used & Fu).bit_count() > d / 2 * Fu.bit_count():
                    continue
                if (self.phi.used & Gu).bit_count() > d / 2 * Gu.bit_count():
                    continue
                if self._embed(i, list(iter_bits(Fu)), list(iter_bits(Gu)), self.phi.used, notes):
                    self.where[i] = Placement(i, u, host, "finish")
                    self.audit.check(f"finishing budget on F_{u}",
                                     (self.phi.used & Fu).bit_count() <= d / 2 * Fu.bit_count() + len(self.trees[i]))
                    placed = True
                    break
            if placed:
                self.log.append({"phase": "finish", "tree": i, "route": "F"})
                continue
            self.finishing_fallback = True
            pairs = [(a, b) for a in sorted(self.ms.hub_neighbours) for b in sorted(nb.get(a, set()) - {self.v1})
                     if b in self.cg.alive]
            pairs.sort(key=lambda ab: (not self.nice(i, ab[0]), ab))
            for a, b in pairs:
                if self._embed(i, self.cg.clusters[a], self.cg.clusters[b], self.phi.used, notes):
                    self.where[i] = Placement(i, a, b, "finish-fallback")
                    self.log.append({"phase": "finish", "tree": i, "route": "fallback", "a": a, "b": b})
                    placed = True
                    break
            if not placed:
                raise EmbedFailure(f"finishing stage could not place microtree {i}", stuck=min(self.trees[i]),
                                   state={"embedded": len(self.phi)})


# -- driver -------------------------------------------------------------------------


@dataclass
class PipelineResult:
    embedding: Embedding
    report: dict[str, Any]

    @property
    def ok(self) -> bool:
        return bool(self.report.get("validator", {}).get("ok"))


def check_hypotheses(g: Graph, t: Tree, schedule: ConstantSchedule) -> dict[str, Any]:
    """Degree conditions on the host and colour-class conditions on the tree, evaluated exactly."""
    n, k = g.n, t.n - 1
    eta, r = schedule.eta, schedule.r
    degs = g.degrees()
    high = sum(1 for x in degs if x >= k + eta * n)
    v1 = len(t.colour_class(0))
    return {
        "n": n,
        "k": k,
        "high_degree_count": high,
        "high_degree_ok": high >= eta * n,
        "min_degree": min(degs) if n else 0,
        "min_degree_ok": bool(n) and min(degs) >= r * k + eta * n,
        "V1": v1,
        "V1_ok": v1 <= r * k,
        "max_degree_V2": delta_v2(t),
        "max_degree_V2_ok": delta_v2(t) <= schedule.gamma * k,
    }


def run_three_phases(g: Graph, t: Tree, schedule: ConstantSchedule, *, reg_eps=Fraction(1, 4),
                     m: int | None = None, initial=None, seed=0, audit_mode: str = PRACTICAL) -> PipelineResult:
    """Embed ``t`` into ``g`` with the full saturation pipeline.

    ``reg_eps`` is the tolerance the cluster pairs are certified at; it is
    also the typicality tolerance.  ``schedule.eps`` drives the full and
    saturated thresholds and the volume threshold of the main loop.
    ``initial`` optionally seeds the cluster layout.
    """
    t0 = time.perf_counter()
    t = t.oriented()
    audit = Audit(audit_mode)
    hyp = check_hypotheses(g, t, schedule)
    if not hyp["V1_ok"]:
        raise PreconditionError(f"smaller colour class has {hyp['V1']} > r k = {float(schedule.r * hyp['k'])} vertices")
    if not hyp["max_degree_V2_ok"]:
        raise PreconditionError(f"max degree on V2 is {hyp['max_degree_V2']} > gamma k")
    if not (hyp["high_degree_ok"] and hyp["min_degree_ok"]):
        raise PreconditionError("host does not meet the degree hypotheses: "
                                f"{hyp['high_degree_count']} vertices of degree >= k + eta n, "
                                f"min degree {hyp['min_degree']}")
    k = hyp["k"]
    report: dict[str, Any] = {"schedule": schedule.to_json(), "hypotheses": hyp, "reg_eps": str(reg_eps)}
    if k < schedule.eta * g.n / 2:
        phi = greedy_embed(t, g)
        report["route"] = "greedy"
        report["validator"] = validate_embedding(t, g, phi.map, require_total=True).to_json()
        report["audit"] = audit.to_json()
        report["wall_time"] = time.perf_counter() - t0
        return PipelineResult(phi, report)

    report["route"] = "saturation"
    decomp = regular_partition(g, reg_eps, seed=seed, initial=initial, m=m)
    report["regularity"] = {"m": decomp.m, "cluster_size": decomp.cluster_size,
                            "irregular_fraction": str(decomp.irregular_fraction),
                            "uncertified_fraction": str(decomp.uncertified_fraction), "notes": decomp.notes}
    pre = preprocess_host(g, decomp, schedule.d, k, schedule.eta, schedule.r, audit)
    cg = pre.cluster_graph
    report["preprocessing"] = pre.to_json()
    ms = build_matching_structure(cg, pre.v1, schedule.eta, audit)
    report["structure"] = ms.to_json()

    ell = max(1, int(schedule.beta * k))
    ell = min(ell, k - 1) if k > 1 else 1
    part = one_sided_partition(t, ell)
    report["partition"] = {"ell": ell, "W": len(part.W), "D_prime": len(part.D_prime),
                           "D_doubleprime": len(part.D_doubleprime), "delta_cap": part.delta_cap}
    host = pre.host
    eng = SaturationEngine(host, t, part, cg, ms, schedule, audit, typical_eps=reg_eps)
    if ms.O1:
        v2 = min(ms.O1)
    elif ms.M1:
        v2 = min(ms.M1)
    else:
        raise StructureError("the hub cluster has no usable neighbour")
    eng.fix_reserve_subsets()
    eng.embed_seed_level(v2)
    pruned = eng.prune_not_nice()
    eng.reserve_F()
    report["v2"] = v2
    report["pruned_clusters"] = pruned
    report["structure_after_pruning"] = ms.to_json()

    phases = {}
    for name, fn in (("phase1", eng.phase1), ("phase2", eng.phase2), ("phase3", eng.phase3)):
        if eng.done():
            phases[name] = {"skipped": True, "embedded": len(eng.phi)}
            continue
        fn()
        eng.check_F()
        rep = validate_embedding(t, host, eng.phi.map)
        audit.check(f"embedding validates after {name}", rep.ok)
        phases[name] = {"embedded": len(eng.phi), "remaining_volume": eng.remaining_volume()}
    audit.check("main loop ends only at the volume threshold", eng.done(), len(eng.phi), None,
                note="" if eng.done() else "phases ended before the volume threshold")
    leftover = eng.remaining_volume()
    eng.finish()
    phases["finish"] = {"leftover_volume": leftover, "fallback": eng.finishing_fallback,
                        "reserve_size": eng.F.bit_count()}
    val = validate_embedding(t, g, eng.phi.map, require_total=True)
    report.update({
        "phases": phases,
        "placements": eng.log,
        "embed_failures": eng.embed_failures[:50],
        "embed_failure_count": len(eng.embed_failures),
        "precondition_notes": eng.precondition_notes[:50],
        "precondition_note_count": len(eng.precondition_notes),
        "leftover_volume": leftover,
        "finishing_fallback": eng.finishing_fallback,
        "validator": val.to_json(),
        "audit": audit.to_json(),
        "wall_time": time.perf_counter() - t0,
    })
    return PipelineResult(eng.phi, report)


def saturation_status(engine: SaturationEngine, target) -> dict[str, bool]:
    """Full/saturated flags for a cluster id or a matching edge (u, v)."""
    if isinstance(target, tuple):
        u, v = target
        return {"saturated": engine.edge_saturated(u, v), "full": engine.full(u) and engine.full(v)}
    return {"full": engine.full(target), "saturated": engine.saturated(target)}
