"""Run the three-phase saturation embedding on a planted cluster host.

The host is a blow-up with ten clusters; the tree has 1500 vertices and
maximum degree 8.  The report lists how each phase went and the per-phase
checks that were run along the way.

    python3 demos/03_saturation.py
"""

from __future__ import annotations

from fractions import Fraction

from treeembed.constants import derive_constants
from treeembed.fixtures import pipeline_tree, planted_blowup
from treeembed.saturation import run_three_phases
from treeembed.validate import validate_embedding

schedule = derive_constants(Fraction(1, 10), Fraction(1, 2), "practical")
g, clusters = planted_blowup(3000, 10, 0)
t = pipeline_tree(1500, 8, Fraction(1, 2), 0)
res = run_three_phases(g, t, schedule, initial=clusters, seed=0)
print(f"host {g.n} vertices, tree {t.n} vertices, ok={res.ok}")
print("route:", res.report["route"])
for name, phase in res.report["phases"].items():
    print(f"  {name}: {phase}")
checks = res.report["audit"]["checks"]
print(f"per-phase checks: {sum(c['ok'] for c in checks)}/{len(checks)} hold")
if res.ok:
    print("independent validation:", validate_embedding(t, g, res.embedding, require_total=True).ok)
