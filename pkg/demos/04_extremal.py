"""Hosts that meet natural degree conditions yet miss a particular tree.

Each construction comes with exactly evaluated certificates, and the exact
oracle confirms that the tree is absent.  The broom against a hub joined to
a complete bipartite graph shows why the host shape matters: at k=6 that
host does contain the tree.

    python3 demos/04_extremal.py
"""

from __future__ import annotations

from fractions import Fraction

from treeembed.constructions import COMPLETE_BIPARTITE, broom_pair, skew_counterexample, sqrt_tightness
from treeembed.oracle import decide

for rep in (broom_pair(6), broom_pair(12), broom_pair(6, COMPLETE_BIPARTITE), sqrt_tightness(9), sqrt_tightness(25)):
    res = decide(rep.tree, rep.host)
    print(f"{rep.name:15s} {rep.params}  certificates ok={rep.ok}  oracle: {res.verdict}")

skew = skew_counterexample(Fraction(1, 4), Fraction(1, 100), 30000)
print(f"skew host on {skew.host.n} vertices, tree on {skew.tree.n} vertices")
for c in skew.claimed_properties:
    print(f"  {'ok  ' if c.ok else 'FAIL'} {c.name}: {c.lhs} {c.relation} {c.rhs}")
