"""Unlabelled trees: exact counts, exhaustive enumeration, canonical forms
and exactly uniform sampling.

Counts are exact Python integers.  Sampling uses count-weighted recursive
decomposition restricted to trees rooted at their centroid, so every free
tree corresponds to exactly one decomposition and no rejection step is
needed for the single-centroid case.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

from .errors import PreconditionError
from .graph import make_rng
from .trees import Tree, centroid

ENUM_CAP = 18


@dataclass(frozen=True)
class TreeCounts:
    """``rooted[n]`` and ``free[n]`` for ``1 <= n <= max`` (index 0 unused)."""

    rooted: tuple[int, ...]
    free: tuple[int, ...]

    @property
    def max(self) -> int:
        return len(self.rooted) - 1


def _euler_transform(weights: list[int], nmax: int) -> list[int]:
    """a[n] = rooted objects of size n whose root branches are weighted by ``weights``.

    a[1] = 1 and a[n+1] = (1/n) sum_{k=1..n} c_k a[n-k+1], with
    c_k = sum_{d | k} d * weights[d].
    """
    c = [0] * (nmax + 1)
    for d in range(1, nmax + 1):
        w = weights[d] if d < len(weights) else 0
        if w:
            for k in range(d, nmax + 1, d):
                c[k] += d * w
    a = [0] * (nmax + 1)
    if nmax >= 1:
        a[1] = 1
    for n in range(1, nmax):
        total = sum(c[k] * a[n - k + 1] for k in range(1, n + 1))
        q, r = divmod(total, n)
        assert r == 0
        a[n + 1] = q
    return a


@lru_cache(maxsize=None)
def _rooted(nmax: int) -> tuple[int, ...]:
    r = [0] * (nmax + 1)
    if nmax >= 1:
        r[1] = 1
    # r is its own branch weight: build it incrementally
    c = [0] * (nmax + 1)
    for n in range(1, nmax):
        for k in range(n, nmax + 1, n):
            c[k] += n * r[n]
        total = sum(c[k] * r[n - k + 1] for k in range(1, n + 1))
        q, rem = divmod(total, n)
        assert rem == 0
        r[n + 1] = q
    return tuple(r)


def otter_counts(nmax: int) -> TreeCounts:
    """Exact counts of unlabelled rooted and free trees up to ``nmax`` vertices."""
    if nmax < 1:
        raise PreconditionError("nmax must be at least 1")
    r = _rooted(nmax)
    s = [0] * (nmax + 1)
    for n in range(1, nmax + 1):
        pairs = sum(r[i] * r[n - i] for i in range(1, n))
        if n % 2 == 0:
            pairs -= r[n // 2]
        s[n] = r[n] - pairs // 2
    return TreeCounts(rooted=r, free=tuple(s))


@lru_cache(maxsize=None)
def restricted_rooted(nmax: int, m: int) -> tuple[int, ...]:
    """Rooted trees on n vertices whose root branches all have at most m vertices."""
    r = _rooted(max(nmax, m, 1))
    weights = [0] + [r[d] if d <= m else 0 for d in range(1, nmax + 1)]
    return tuple(_euler_transform(weights, nmax))


def centroid_split_counts(n: int) -> tuple[int, int]:
    """(single-centroid count, two-centroid count) of free trees on n vertices."""
    single = restricted_rooted(n, (n - 1) // 2)[n]
    double = 0
    if n % 2 == 0:
        h = _rooted(n)[n // 2]
        double = h * (h + 1) // 2
    return single, double


# -- canonical forms -------------------------------------------------------------


def rooted_level_code(t: Tree, root: int) -> tuple[int, ...]:
    """Canonical level sequence of ``t`` rooted at ``root``.

    Children are ordered by decreasing code, so two rooted trees are
    isomorphic iff their codes are equal.
    """
    parent = [-2] * t.n
    parent[root] = -1
    order = [root]
    for v in order:
        for u in t.neighbors(v):
            if parent[u] == -2:
                parent[u] = v
                order.append(u)
    kids: list[list[tuple[int, ...]]] = [[] for _ in range(t.n)]
    code: list[tuple[int, ...] | None] = [None] * t.n
    for v in reversed(order):
        parts = sorted(kids[v], reverse=True)
        seq = [0]
        for p in parts:
            seq.extend(x + 1 for x in p)
        code[v] = tuple(seq)
        if parent[v] >= 0:
            kids[parent[v]].append(code[v])
    return code[root]


def canonical_form(t: Tree) -> tuple[int, ...]:
    """Isomorphism invariant of a free tree: the smallest centroid-rooted code."""
    return min(rooted_level_code(t, c) for c in centroid(t))


def tree_from_levels(levels) -> Tree:
    parent = []
    stack: list[int] = []
    for i, lv in enumerate(levels):
        del stack[lv:]
        parent.append(stack[-1] if stack else -1)
        stack.append(i)
    return Tree(parent)


# -- enumeration ----------------------------------------------------------------


def _next_rooted(levels: list[int], p: int | None = None) -> list[int] | None:
    """Successor of a canonical rooted level sequence (Beyer-Hedetniemi step)."""
    if p is None:
        p = len(levels) - 1
        while levels[p] == 1:
            p -= 1
    if p == 0:
        return None
    q = p - 1
    while levels[q] != levels[p] - 1:
        q -= 1
    out = list(levels)
    for i in range(p, len(out)):
        out[i] = out[i - p + q]
    return out


def _split_first_branch(levels: list[int]) -> tuple[list[int], list[int]]:
    """First root branch (levels shifted down by one) and the rest of the tree."""
    m = 2
    while m < len(levels) and levels[m] != 1:
        m += 1
    first = [x - 1 for x in levels[1:m]]
    rest = [0] + levels[m:]
    return first, rest


def _next_free(cand: list[int]) -> list[int] | None:
    """Advance to the next level sequence that is canonical as a centre-rooted free tree."""
    first, rest = _split_first_branch(cand)
    h_first, h_rest = max(first), max(rest)
    valid = h_rest >= h_first and (
        h_rest > h_first
        or len(rest) > len(first)
        or (len(rest) == len(first) and first <= rest)
    )
    if valid:
        return cand
    p = len(first)
    nxt = _next_rooted(cand, p)
    if nxt is None:
        return None
    if cand[p] > 2:
        new_first, _ = _split_first_branch(nxt)
        tail = list(range(1, max(new_first) + 2))
        nxt[-len(tail):] = tail
    return nxt


def iter_free_level_sequences(n: int) -> Iterator[list[int]]:
    if n == 1:
        yield [0]
        return
    if n == 2:
        yield [0, 1]
        return
    levels: list[int] | None = list(range(n // 2 + 1)) + list(range(1, (n + 1) // 2))
    while levels is not None:
        levels = _next_free(levels)
        if levels is not None:
            yield levels
            levels = _next_rooted(levels)


def enumerate_free_trees(n: int, cap: int = ENUM_CAP) -> Iterator[Tree]:
    """One representative per isomorphism class of free trees on n vertices."""
    if n < 1:
        raise PreconditionError("n must be at least 1")
    if n > cap:
        raise PreconditionError(f"refusing to enumerate free trees on {n} > {cap} vertices")
    for levels in iter_free_level_sequences(n):
        yield tree_from_levels(levels)


# -- uniform sampling -----------------------------------------------------------


def randbelow(rng, bound: int) -> int:
    """Uniform integer in [0, bound) for arbitrarily large ``bound``."""
    if bound <= 0:
        raise PreconditionError("bound must be positive")
    bits = (bound - 1).bit_length()
    if bits <= 62:
        return int(rng.integers(0, bound))
    words = (bits + 62) // 63
    while True:
        x = 0
        for w in rng.integers(0, 1 << 63, size=words, dtype="int64", endpoint=False).tolist():
            x = (x << 63) | w
        x &= (1 << bits) - 1
        if x < bound:
            return x


class _Table:
    """Cumulative weights of the (copies j, branch size d) choices for a root of size N."""

    __slots__ = ("cum", "choices", "total")

    def __init__(self, size: int, a: tuple[int, ...], r: tuple[int, ...], m: int):
        cum, choices = [], []
        acc = 0
        for d in range(1, min(m, size - 1) + 1):
            wd = d * r[d]
            for j in range(1, (size - 1) // d + 1):
                acc += wd * a[size - j * d]
                cum.append(acc)
                choices.append((j, d))
        self.cum = cum
        self.choices = choices
        self.total = acc


class UnlabelledSampler:
    """Exact uniform sampler for unlabelled trees up to ``nmax`` vertices."""

    def __init__(self, nmax: int):
        self.nmax = nmax
        self.r = _rooted(max(nmax, 2))
        self._tables: dict[tuple[int, int], _Table] = {}

    def _table(self, size: int, m: int) -> _Table:
        key = (size, m)
        tab = self._tables.get(key)
        if tab is None:
            a = self.r if m >= size - 1 else restricted_rooted(self.nmax, m)
            tab = _Table(size, a, self.r, m)
            assert tab.total == (size - 1) * a[size]
            self._tables[key] = tab
        return tab

    def root_branches(self, size: int, m: int, rng) -> list[tuple[int, int]]:
        """Draw the multiset of root branch sizes as (copies, size) pairs."""
        out = []
        while size > 1:
            tab = self._table(size, m)
            x = randbelow(rng, tab.total)
            j, d = tab.choices[bisect_right(tab.cum, x)]
            out.append((j, d))
            size -= j * d
        return out

    def rooted_levels(self, size: int, m: int, rng) -> list[int]:
        """Uniform rooted tree (branches <= m) as a level sequence, root first."""
        branches = self.root_branches(size, m, rng)
        seq = [0]
        for j, d in branches:
            sub = self.rooted_levels(d, d, rng)
            shifted = [x + 1 for x in sub]
            for _ in range(j):
                seq.extend(shifted)
        return seq

    def free_levels(self, n: int, rng) -> list[int]:
        if n <= 2:
            return list(range(n))
        single, double = centroid_split_counts(n)
        if double and randbelow(rng, single + double) >= single:
            return self._bicentroid(n, rng)
        return self.rooted_levels(n, (n - 1) // 2, rng)

    def _bicentroid(self, n: int, rng) -> list[int]:
        half = n // 2
        h = self.r[half]
        # identical halves carry 2/(h+1) of the mass among unordered pairs
        if randbelow(rng, h + 1) < 2:
            a = self.rooted_levels(half, half, rng)
            b = a
        else:
            while True:
                a = self.rooted_levels(half, half, rng)
                b = self.rooted_levels(half, half, rng)
                if _canon_rooted(a) != _canon_rooted(b):
                    break
        return a + [x + 1 for x in b]


def _canon_rooted(levels: list[int]) -> tuple[int, ...]:
    t = tree_from_levels(levels)
    return rooted_level_code(t, 0)


_SAMPLERS: dict[int, UnlabelledSampler] = {}


def _sampler(n: int) -> UnlabelledSampler:
    s = _SAMPLERS.get(n)
    if s is None:
        s = _SAMPLERS[n] = UnlabelledSampler(n)
    return s


def sample_unlabelled_tree(n: int, seed) -> Tree:
    """Uniformly random unlabelled free tree on n vertices, rooted at a centroid."""
    if n < 1:
        raise PreconditionError("n must be at least 1")
    rng = make_rng(seed)
    return tree_from_levels(_sampler(n).free_levels(n, rng))


def sample_centroid_branch_sizes(n: int, seed) -> list[int]:
    """Branch sizes at the centroid of a uniform free tree on n vertices (n odd).

    Consumes the random stream exactly as :func:`sample_unlabelled_tree`
    does for its first decisions, so both agree seed by seed.
    """
    if n % 2 == 0:
        raise PreconditionError("centroid branch sizes are sampled for odd n only")
    rng = make_rng(seed)
    if n == 1:
        return []
    samp = _sampler(n)
    out = []
    for j, d in samp.root_branches(n, (n - 1) // 2, rng):
        out.extend([d] * j)
    return out
