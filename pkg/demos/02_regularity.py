"""Exact and heuristic regularity on small bipartite pairs.

At twelve vertices a side even a uniform random pair tends to be
irregular for eps = 1/4, because subsets of three vertices are allowed and
their densities fluctuate a lot.  A complete pair is trivially regular.
Every Irregular verdict carries a witness that is re-checked here.

    python3 demos/02_regularity.py
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from treeembed.graph import Graph, make_rng
from treeembed.regularity import is_regular_pair, witness_violates

eps = Fraction(1, 4)
rng = make_rng(3)


def pair(B):
    a, b = B.shape
    A = np.zeros((a + b, a + b), dtype=bool)
    A[:a, a:] = B
    return Graph.from_adjacency_matrix(A | A.T), range(a), range(a, a + b)


uniform = rng.random((12, 12)) < 0.5
planted = rng.random((12, 12)) < 0.1
planted[:6, :6] = True

complete = np.ones((12, 12), dtype=bool)

for name, B in (("uniform p=1/2", uniform), ("planted block", planted), ("complete", complete)):
    g, X, Y = pair(B)
    exact = is_regular_pair(g, X, Y, eps, mode="exact")
    heur = is_regular_pair(g, X, Y, eps, mode="heuristic")
    print(f"{name:15s} exact: {exact.kind:9s} heuristic: {heur.kind}")
    if exact.witness is not None:
        Xp, Yp = exact.witness
        print(f"{'':15s} witness sizes {len(Xp)}x{len(Yp)}, re-verified: {witness_violates(g, X, Y, Xp, Yp, eps)}")
