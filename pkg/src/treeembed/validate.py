"""Independent checker for tree embeddings.

Deliberately self-contained: it only reads the tree's parent array and the
host's adjacency, so a bug in the embedders cannot hide behind shared code.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping


@dataclass
class EmbeddingReport:
    injective: bool = True
    edges_ok: bool = True
    in_range: bool = True
    total: bool = True
    problems: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.injective and self.edges_ok and self.in_range and self.total

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "injective": self.injective,
            "edges_ok": self.edges_ok,
            "in_range": self.in_range,
            "total": self.total,
            "problems": self.problems[:20],
        }


def validate_embedding(t, g, mapping: Mapping[int, int], *, require_total: bool = False) -> EmbeddingReport:
    """Check injectivity and edge preservation of a (partial) map V(T) -> V(G)."""
    rep = EmbeddingReport()
    owner: dict[int, int] = {}
    for x, h in mapping.items():
        if not (0 <= x < t.n):
            rep.in_range = False
            rep.problems.append(f"tree vertex {x} out of range")
            continue
        if not (0 <= h < g.n):
            rep.in_range = False
            rep.problems.append(f"host vertex {h} out of range (image of {x})")
            continue
        if h in owner:
            rep.injective = False
            rep.problems.append(f"tree vertices {owner[h]} and {x} share host vertex {h}")
        owner[h] = x
    for x, p in enumerate(t.parent):
        if p < 0 or x not in mapping or p not in mapping:
            continue
        hx, hp = mapping[x], mapping[p]
        if not (0 <= hx < g.n and 0 <= hp < g.n) or not (g.adj_mask(hx) >> hp) & 1:
            rep.edges_ok = False
            rep.problems.append(f"tree edge ({p}, {x}) maps to non-edge ({hp}, {hx})")
    if require_total and len(mapping) != t.n:
        rep.total = False
        rep.problems.append(f"{t.n - len(mapping)} tree vertices unmapped")
    return rep
