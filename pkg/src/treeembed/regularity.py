"""epsilon-regular pairs, equitable regular partitions and host cleaning.

``is_regular_pair`` has two engines:

* **exact** (both sides <= ``exact_cap``): for each subset X' of the smaller
  side, the densest and sparsest Y' of every admissible size are prefixes of
  the columns sorted by degree into X', so checking those prefixes decides
  regularity exactly.  All comparisons are integer arithmetic.
* **heuristic**: a spectral certificate.  With ``B = A - d J`` and
  ``|X'| >= a0``, ``|Y'| >= b0`` the deviation of any admissible sub-pair is
  at most ``sigma_1(B) / sqrt(a0 b0)``; if that is <= eps the pair is
  Regular.  Otherwise a witness search (degree orderings, the top singular
  vector, alternating improvement) looks for a violating pair, and the
  verdict is Unknown when none is found.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from .audit import PRACTICAL, Audit
from .errors import HostTooSparse, PreconditionError
from .graph import Graph, make_rng, mask_of

REGULAR, IRREGULAR, UNKNOWN = "Regular", "Irregular", "Unknown"
EXACT_CAP = 16


def as_fraction(x) -> Fraction:
    """Exact rational for ints, Fractions, decimal strings and floats (via repr)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


def ceil_frac(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


@dataclass(frozen=True)
class PairVerdict:
    kind: str
    density: Fraction
    witness: tuple[tuple[int, ...], tuple[int, ...]] | None = None
    method: str = ""
    sigma: float | None = None

    @property
    def regular(self) -> bool:
        return self.kind == REGULAR

    def to_json(self) -> dict:
        return {
            "verdict": self.kind,
            "density": str(self.density),
            "method": self.method,
            "witness": None if self.witness is None else [list(self.witness[0]), list(self.witness[1])],
        }


def _sides(g: Graph, X: Sequence[int], Y: Sequence[int]) -> tuple[list[int], list[int]]:
    xs, ys = sorted(set(X)), sorted(set(Y))
    if not xs or not ys:
        raise PreconditionError("both sides of a pair must be nonempty")
    if set(xs) & set(ys):
        raise PreconditionError("the sides of a pair must be disjoint")
    return xs, ys


def pair_matrix(g: Graph, xs: Sequence[int], ys: Sequence[int], full: np.ndarray | None = None) -> np.ndarray:
    if full is not None:
        return full[np.ix_(xs, ys)].astype(np.int64)
    ymask = mask_of(ys)
    pos = {y: j for j, y in enumerate(ys)}
    A = np.zeros((len(xs), len(ys)), dtype=np.int64)
    for i, x in enumerate(xs):
        m = g.adj_mask(x) & ymask
        while m:
            low = m & -m
            A[i, pos[low.bit_length() - 1]] = 1
            m ^= low
    return A


def witness_violates(g: Graph, X, Y, Xp, Yp, eps) -> bool:
    """Direct check that (Xp, Yp) violates eps-regularity of (X, Y)."""
    eps = as_fraction(eps)
    X, Y, Xp, Yp = set(X), set(Y), set(Xp), set(Yp)
    if not (Xp <= X and Yp <= Y) or not Xp or not Yp:
        return False
    if len(Xp) < eps * len(X) or len(Yp) < eps * len(Y):
        return False
    ymask, ypmask = mask_of(Y), mask_of(Yp)
    e = sum(g.degree_into(x, ymask) for x in X)
    ep = sum(g.degree_into(x, ypmask) for x in Xp)
    return abs(Fraction(ep, len(Xp) * len(Yp)) - Fraction(e, len(X) * len(Y))) > eps


# -- exact engine -----------------------------------------------------------------


def _exact(A: np.ndarray, eps: Fraction):
    """Return None if regular, else (row indices, col indices) of a violating pair."""
    a, b = A.shape
    e = int(A.sum())
    p, q = eps.numerator, eps.denominator
    sx, sy = ceil_frac(eps * a), ceil_frac(eps * b)
    if sx > a or sy > b:
        return None
    masks = np.arange(1, 1 << a, dtype=np.int64)
    bits = (masks[:, None] >> np.arange(a)) & 1
    size = bits.sum(axis=1)
    sel = size >= sx
    masks, bits, size = masks[sel], bits[sel], size[sel]
    deg = bits @ A  # degrees of each column into each X'
    order = np.argsort(deg, axis=1, kind="stable")
    sdeg = np.take_along_axis(deg, order, axis=1)
    svals = np.arange(1, b + 1, dtype=np.int64)
    ab = a * b
    xs_s = size[:, None] * svals[None, :]
    rhs = p * xs_s * ab
    for from_top in (False, True):
        part = sdeg[:, ::-1] if from_top else sdeg
        cum = np.cumsum(part, axis=1)
        lhs = np.abs(cum * ab - e * xs_s) * q
        viol = lhs > rhs
        viol[:, : sy - 1] = False
        hit = np.argwhere(viol)
        if len(hit):
            i, s_idx = hit[0]
            rows = tuple(int(r) for r in np.flatnonzero(bits[i]))
            cols_sorted = order[i, ::-1] if from_top else order[i]
            cols = tuple(sorted(int(c) for c in cols_sorted[: s_idx + 1]))
            return rows, cols
    return None


# -- heuristic engine ---------------------------------------------------------------


def _sigma_top(B: np.ndarray):
    """Largest singular value of B with its left and right singular vectors."""
    a, b = B.shape
    if a <= b:
        w, V = np.linalg.eigh(B @ B.T)
        s = math.sqrt(max(w[-1], 0.0))
        u = V[:, -1]
        v = B.T @ u
    else:
        w, V = np.linalg.eigh(B.T @ B)
        s = math.sqrt(max(w[-1], 0.0))
        v = V[:, -1]
        u = B @ v
    return s, u, v


def _best_cols(A, rows, sy, e, eps):
    """Densest/sparsest column prefix for a fixed row set; returns a violating pair or None."""
    a, b = A.shape
    xs = len(rows)
    deg = A[rows].sum(axis=0)
    order = np.argsort(deg, kind="stable")
    ab = a * b
    p, q = eps.numerator, eps.denominator
    svals = np.arange(1, b + 1)
    for part in (order, order[::-1]):
        cum = np.cumsum(deg[part])
        lhs = np.abs(cum * ab - e * xs * svals) * q
        viol = lhs > p * xs * svals * ab
        viol[: sy - 1] = False
        idx = np.flatnonzero(viol)
        if len(idx):
            return list(rows), sorted(int(c) for c in part[: idx[0] + 1])
    return None


def _search(A: np.ndarray, eps: Fraction, u: np.ndarray, v: np.ndarray):
    a, b = A.shape
    e = int(A.sum())
    sx, sy = ceil_frac(eps * a), ceil_frac(eps * b)
    row_orders = []
    rdeg = A.sum(axis=1)
    for key in (rdeg, u):
        o = np.argsort(key, kind="stable")
        row_orders += [o, o[::-1]]
    sizes = sorted({sx, min(a, 2 * sx), max(sx, a // 2)})
    tried = 0
    for o in row_orders:
        for s in sizes:
            rows = sorted(int(r) for r in o[:s])
            for _ in range(3):
                tried += 1
                hit = _best_cols(A, rows, sy, e, eps)
                if hit:
                    return hit
                # alternate: best rows against the extreme columns of this row set
                cdeg = A[rows].sum(axis=0)
                co = np.argsort(cdeg, kind="stable")
                cols = sorted(int(c) for c in co[::-1][:sy])
                hitT = _best_cols(A.T, cols, sx, e, eps)
                if hitT:
                    return hitT[1], hitT[0]
                rdeg2 = A[:, cols].sum(axis=1)
                rows = sorted(int(r) for r in np.argsort(rdeg2, kind="stable")[::-1][:s])
    return None


def is_regular_pair(g: Graph, X, Y, eps, *, exact_cap: int = EXACT_CAP, mode: str = "auto",
                    full: np.ndarray | None = None) -> PairVerdict:
    """Decide (or certify) eps-regularity of the pair (X, Y)."""
    xs, ys = _sides(g, X, Y)
    eps = as_fraction(eps)
    if eps <= 0:
        raise PreconditionError("eps must be positive")
    if mode not in ("auto", "exact", "heuristic"):
        raise PreconditionError(f"unknown mode {mode!r}; use auto, exact or heuristic")
    A = pair_matrix(g, xs, ys, full)
    a, b = A.shape
    e = int(A.sum())
    dens = Fraction(e, a * b)
    use_exact = mode == "exact" or (mode == "auto" and max(a, b) <= exact_cap)
    if use_exact:
        if min(a, b) > 20:
            raise PreconditionError("exact mode enumerates subsets of the smaller side; keep it <= 20")
        swap = a > b
        res = _exact(A.T if swap else A, eps)
        if res is None:
            return PairVerdict(REGULAR, dens, None, "exact")
        rows, cols = (res[1], res[0]) if swap else res
        wit = (tuple(xs[i] for i in rows), tuple(ys[j] for j in cols))
        return PairVerdict(IRREGULAR, dens, wit, "exact")
    if e == 0 or e == a * b:
        return PairVerdict(REGULAR, dens, None, "constant")
    B = A - float(dens)
    sigma, u, v = _sigma_top(B)
    sx, sy = ceil_frac(eps * a), ceil_frac(eps * b)
    bound = float(eps) * math.sqrt(sx * sy)
    # a small relative margin absorbs floating-point error in the eigenvalue
    if sigma * (1 + 1e-9) + 1e-9 <= bound:
        return PairVerdict(REGULAR, dens, None, "spectral", sigma)
    hit = _search(A, eps, u, v)
    if hit is not None:
        rows, cols = hit
        wit = (tuple(xs[i] for i in rows), tuple(ys[j] for j in cols))
        return PairVerdict(IRREGULAR, dens, wit, "search", sigma)
    return PairVerdict(UNKNOWN, dens, None, "spectral", sigma)


def typical_vertices(g: Graph, X, Yprime, base_density, eps) -> set[int]:
    """Vertices x of X with deg(x, Y') >= (base_density - eps) |Y'|."""
    Yprime = list(Yprime)
    if not Yprime:
        raise PreconditionError("Y' must be nonempty")
    thr = (as_fraction(base_density) - as_fraction(eps)) * len(Yprime)
    ymask = mask_of(Yprime)
    return {x for x in X if g.degree_into(x, ymask) >= thr}


# -- partition --------------------------------------------------------------------


@dataclass
class RegularDecomposition:
    clusters: list[tuple[int, ...]]
    garbage: tuple[int, ...]
    eps: Fraction
    pair_table: dict[tuple[int, int], PairVerdict]
    rounds: int = 1
    capped: bool = False
    notes: list[str] = field(default_factory=list)

    @property
    def m(self) -> int:
        return len(self.clusters)

    @property
    def cluster_size(self) -> int:
        return len(self.clusters[0]) if self.clusters else 0

    def count(self, kind: str) -> int:
        return sum(1 for v in self.pair_table.values() if v.kind == kind)

    @property
    def irregular_fraction(self) -> Fraction:
        """Pairs with a verified irregularity witness, over m^2."""
        return Fraction(self.count(IRREGULAR), self.m ** 2) if self.m else Fraction(0)

    @property
    def uncertified_fraction(self) -> Fraction:
        """Pairs not certified Regular (Irregular or Unknown), over m^2."""
        bad = self.count(IRREGULAR) + self.count(UNKNOWN)
        return Fraction(bad, self.m ** 2) if self.m else Fraction(0)

    def verdict(self, i: int, j: int) -> PairVerdict:
        return self.pair_table[(min(i, j), max(i, j))]

    def to_json(self) -> dict[str, Any]:
        return {
            "eps": str(self.eps),
            "m": self.m,
            "cluster_size": self.cluster_size,
            "clusters": [list(c) for c in self.clusters],
            "garbage": list(self.garbage),
            "rounds": self.rounds,
            "capped": self.capped,
            "irregular_fraction": str(self.irregular_fraction),
            "uncertified_fraction": str(self.uncertified_fraction),
            "pairs": [
                {"i": i, "j": j, **v.to_json()} for (i, j), v in sorted(self.pair_table.items())
            ],
            "notes": self.notes,
        }


def _equitable(order: list[int], m: int) -> tuple[list[tuple[int, ...]], tuple[int, ...]]:
    s = len(order) // m
    clusters = [tuple(sorted(order[i * s:(i + 1) * s])) for i in range(m)]
    return clusters, tuple(sorted(order[m * s:]))


def _pair_table(g, clusters, eps, exact_cap, full):
    table = {}
    for i in range(len(clusters)):
        for j in range(i + 1, len(clusters)):
            table[(i, j)] = is_regular_pair(g, clusters[i], clusters[j], eps, exact_cap=exact_cap, full=full)
    return table


def regular_partition(g: Graph, eps, m_cap: int = 4096, iteration_cap: int = 4, seed=0, *,
                      initial: Sequence[Sequence[int]] | None = None, m: int | None = None,
                      exact_cap: int = EXACT_CAP) -> RegularDecomposition:
    """Witness-driven equitable refinement.

    Starts from ``m`` clusters, laid out from the groups in ``initial`` when
    given and from a seeded permutation otherwise.  ``m`` defaults to the
    number of groups in ``initial``, else ``ceil(1/eps)``.  While more than ``eps m^2`` pairs carry an Irregular verdict
    every cluster is halved, witness vertices first.  Stops at the caps and
    flags the result instead of raising.
    """
    eps = as_fraction(eps)
    if m is not None:
        m0 = m
    elif initial is not None:
        m0 = len(initial)
    else:
        m0 = ceil_frac(1 / eps)
    if g.n < m0:
        raise PreconditionError(f"need at least {m0} vertices for {m0} clusters")
    if initial is not None:
        order = [v for grp in initial for v in grp]
        seen = set(order)
        order += [v for v in range(g.n) if v not in seen]
    else:
        order = make_rng(seed).permutation(g.n).tolist()
    full = g.adjacency_matrix()
    clusters, garbage = _equitable(order, m0)
    notes = []
    rounds = 1
    capped = False
    while True:
        table = _pair_table(g, clusters, eps, exact_cap, full)
        irr = [(ij, v) for ij, v in table.items() if v.kind == IRREGULAR]
        if len(irr) <= eps * len(clusters) ** 2:
            break
        odd = len(clusters[0]) % 2
        if rounds >= iteration_cap or 2 * len(clusters) > m_cap or len(clusters[0]) < 2:
            capped = True
            notes.append("refinement stopped at a cap with too many irregular pairs")
            break
        if len(garbage) + odd * len(clusters) > eps * g.n:
            capped = True
            notes.append("refinement stopped: halving would push the garbage set above eps*n")
            break
        first_witness: dict[int, set[int]] = {}
        for (i, j), v in irr:
            first_witness.setdefault(i, set(v.witness[0]))
            first_witness.setdefault(j, set(v.witness[1]))
        new_order = []
        for i, c in enumerate(clusters):
            w = first_witness.get(i, set())
            new_order.extend([x for x in c if x in w] + [x for x in c if x not in w])
        half = len(clusters[0]) // 2
        new_clusters, spill = [], list(garbage)
        for i in range(len(clusters)):
            block = new_order[i * len(clusters[0]):(i + 1) * len(clusters[0])]
            new_clusters += [tuple(sorted(block[:half])), tuple(sorted(block[half:2 * half]))]
            spill += block[2 * half:]
        clusters, garbage = new_clusters, tuple(sorted(spill))
        rounds += 1
    if len(garbage) > eps * g.n:
        notes.append(f"garbage set has {len(garbage)} > eps*n vertices")
    return RegularDecomposition(clusters, garbage, eps, table, rounds, capped, notes)


# -- host cleaning ----------------------------------------------------------------


@dataclass
class ClusterGraph:
    clusters: list[tuple[int, ...]]
    alive: set[int]
    weights: dict[tuple[int, int], Fraction]

    @property
    def cluster_size(self) -> int:
        return len(self.clusters[0]) if self.clusters else 0

    def has_edge(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self.weights

    def weight(self, i: int, j: int) -> Fraction:
        return self.weights[(min(i, j), max(i, j))]

    def neighbours(self, i: int) -> set[int]:
        out = set()
        for a, b in self.weights:
            if a == i:
                out.add(b)
            elif b == i:
                out.add(a)
        return out

    def remove_edge(self, i: int, j: int) -> None:
        self.weights.pop((min(i, j), max(i, j)), None)

    def remove_cluster(self, i: int) -> None:
        self.alive.discard(i)
        for key in [key for key in self.weights if i in key]:
            del self.weights[key]

    def copy(self) -> "ClusterGraph":
        return ClusterGraph(list(self.clusters), set(self.alive), dict(self.weights))

    def to_json(self) -> dict:
        return {
            "alive": sorted(self.alive),
            "edges": [{"u": i, "v": j, "density": str(w)} for (i, j), w in sorted(self.weights.items())],
        }


@dataclass
class HostPreprocessing:
    host: Graph
    cluster_graph: ClusterGraph
    v1: int
    L: frozenset[int]
    erased_edges: int
    deleted_clusters: list[int]
    capped_pairs: list[int]
    avg_degree: dict[int, Fraction]
    high_fraction: dict[int, Fraction]
    audit: Audit

    def to_json(self) -> dict:
        return {
            "v1": self.v1,
            "L_size": len(self.L),
            "erased_edges": self.erased_edges,
            "deleted_clusters": self.deleted_clusters,
            "capped_pairs": self.capped_pairs,
            "cluster_graph": self.cluster_graph.to_json(),
            "high_fraction": {str(i): str(f) for i, f in sorted(self.high_fraction.items())},
        }


def cluster_edge_counts(A: np.ndarray, clusters: Sequence[Sequence[int]]) -> np.ndarray:
    n, m = A.shape[0], len(clusters)
    P = np.zeros((n, m))
    for i, c in enumerate(clusters):
        P[list(c), i] = 1.0
    return np.rint(P.T @ A.astype(np.float64) @ P).astype(np.int64)


def preprocess_host(g: Graph, decomp: RegularDecomposition, d_floor, k: int, eta, r,
                    audit: Audit | None = None) -> HostPreprocessing:
    """Clean the host at cluster level and pick the high-degree cluster v1.

    Erases edges inside clusters, in pairs not certified Regular, in pairs
    of density below ``d_floor`` and at the garbage set; deletes clusters
    whose average degree dropped by more than sqrt(6 eps + 2 d) n; picks the
    cluster with the largest share of vertices of degree >= k + eta n / 2;
    finally erases the sparsest pairs at v1 until its average degree is <= 2k.
    """
    audit = audit or Audit(PRACTICAL)
    d = as_fraction(d_floor)
    eta, r = as_fraction(eta), as_fraction(r)
    eps = decomp.eps
    n = g.n
    A = g.adjacency_matrix()
    m = decomp.m
    s = decomp.cluster_size
    lab = np.full(n, -1, dtype=np.int64)
    for i, c in enumerate(decomp.clusters):
        lab[list(c)] = i
    E = cluster_edge_counts(A, decomp.clusters)

    keep = np.zeros((m, m), dtype=bool)
    for (i, j), v in decomp.pair_table.items():
        if v.kind == REGULAR and v.density >= d and v.density > 0:
            keep[i, j] = keep[j, i] = True

    def cleaned_matrix(keep_mat):
        inside = lab >= 0
        L_ = np.where(inside, lab, 0)
        mask = keep_mat[np.ix_(L_, L_)] & inside[:, None] & inside[None, :]
        return A & mask

    A1 = cleaned_matrix(keep)
    erased = int(A.sum() - A1.sum()) // 2
    audit.check("erased edges <= (3 eps + d) n^2", erased <= (3 * eps + d) * n * n, erased, (3 * eps + d) * n * n)

    deg0 = A.sum(axis=1)
    deg1 = A1.sum(axis=1)
    before = {i: Fraction(int(deg0[list(c)].sum()), s) for i, c in enumerate(decomp.clusters)}
    after = {i: Fraction(int(deg1[list(c)].sum()), s) for i, c in enumerate(decomp.clusters)}
    thr2 = (6 * eps + 2 * d) * n * n
    deleted = [i for i in range(m) if (before[i] - after[i]) > 0 and (before[i] - after[i]) ** 2 > thr2]
    audit.check("deleted clusters <= sqrt(6 eps + 2 d) m", len(deleted) ** 2 <= (6 * eps + 2 * d) * m * m,
                len(deleted), None)
    for i in deleted:
        keep[i, :] = keep[:, i] = False
    A2 = cleaned_matrix(keep)
    deg2 = A2.sum(axis=1)
    alive = [i for i in range(m) if i not in deleted]
    avg = {i: Fraction(int(deg2[list(decomp.clusters[i])].sum()), s) for i in alive}
    for i in alive:
        audit.check(f"avg degree of cluster {i} >= rk + eta n / 2", avg[i] >= r * k + eta * n / 2,
                    avg[i], r * k + eta * n / 2)

    high_thr = k + eta * n / 2
    high = np.array([int(x) >= high_thr for x in deg2], dtype=bool)
    frac = {i: Fraction(int(high[list(decomp.clusters[i])].sum()), s) for i in alive}
    if not alive:
        raise HostTooSparse("every cluster was deleted during cleaning", Fraction(0))
    best = max(alive, key=lambda i: (frac[i], -i))
    if frac[best] < eta / 2:
        raise HostTooSparse(
            f"no cluster has a share >= eta/2 = {eta / 2} of vertices with degree >= k + eta n / 2 "
            f"(best is cluster {best} with {frac[best]})", frac[best])
    v1 = best
    Lset = frozenset(int(x) for x in decomp.clusters[v1] if high[x])
    audit.check("avg degree of v1 >= k + eta n / 3", avg[v1] >= k + eta * n / 3, avg[v1], k + eta * n / 3)

    capped = []
    dens = {}
    for (i, j), v in decomp.pair_table.items():
        dens[(i, j)] = v.density
    cur = avg[v1]
    if cur > 2 * k:
        partners = sorted((j for j in alive if keep[v1, j]),
                          key=lambda j: (dens[(min(v1, j), max(v1, j))], j))
        for j in partners:
            if cur <= 2 * k:
                break
            keep[v1, j] = keep[j, v1] = False
            cur -= Fraction(int(E[v1, j]), s)
            capped.append(j)
        A2 = cleaned_matrix(keep)
        deg2 = A2.sum(axis=1)
        avg = {i: Fraction(int(deg2[list(decomp.clusters[i])].sum()), s) for i in alive}
    audit.check("avg degree of v1 <= 2k", avg[v1] <= 2 * k, avg[v1], 2 * k)
    audit.check("avg degree of v1 >= k + eta n / 3 after capping", avg[v1] >= k + eta * n / 3,
                avg[v1], k + eta * n / 3)

    weights = {}
    for i in alive:
        for j in alive:
            if i < j and keep[i, j]:
                weights[(i, j)] = decomp.pair_table[(i, j)].density
    cg = ClusterGraph(list(decomp.clusters), set(alive), weights)
    host = Graph.from_adjacency_matrix(A2)
    return HostPreprocessing(host, cg, v1, Lset, erased, deleted, capped, avg, frac, audit)
