"""Check every tree against every small connected host with average degree above k-1.

The corpus in data/ holds all connected graphs on up to 8 vertices.  Any
host whose average degree exceeds k-1 should contain every tree with k
edges; the scan reports the instances it checked and any counterexample.

    python3 demos/05_small_graph_scan.py
"""

from __future__ import annotations

from pathlib import Path

from treeembed.scans import erdos_sos_scan, iter_hosts

data = Path(__file__).resolve().parent.parent / "data"
paths = [data / f"connected{n}.g6" for n in range(1, 8)]
rep = erdos_sos_scan(iter_hosts(paths), range(1, 7))
print(f"{rep.hosts} hosts, {rep.instances_checked} instances, "
      f"{len(rep.violations)} violations, {len(rep.timeouts)} timeouts, {rep.runtime:.1f}s")
