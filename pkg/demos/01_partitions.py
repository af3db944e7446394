"""Cut a random tree into small pieces and look at what the cut produces.

A tree with k edges is split so that every piece has at most ell vertices,
using few cut vertices.  The one-sided variant then moves every cut vertex
into one colour class, at the price of a few extra seeds.

    python3 demos/01_partitions.py
"""

from __future__ import annotations

import math

from treeembed.graph import make_rng
from treeembed.partition import fine_partition, one_sided_partition, validate_fine_partition, validate_one_sided
from treeembed.trees import sample_labelled_tree

rng = make_rng(7)
for k in (100, 1000, 5000):
    ell = math.ceil(k / 10)
    t = sample_labelled_tree(k + 1, int(rng.integers(1 << 62))).oriented()
    f = fine_partition(t, ell)
    o = one_sided_partition(t, ell, f)
    print(f"k={k:5d} ell={ell:4d}  cut vertices {len(f.W_A) + len(f.W_B):3d}  "
          f"seeds after one-siding {len(o.W):3d}  pieces {len(o.D_prime) + len(o.D_doubleprime):4d}  "
          f"valid {validate_fine_partition(t, f).ok and validate_one_sided(t, o).ok}")
