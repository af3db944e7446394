"""Write graph6 files of all connected graphs on n vertices, up to isomorphism.

Orders up to 7 come from the networkx graph atlas.  Larger orders are grown
one vertex at a time: every connected graph has a vertex whose removal keeps
it connected, so joining a new vertex to each non-empty subset of every
connected graph on n-1 vertices reaches every connected graph on n
vertices.  Duplicates are removed by bucketing on a Weisfeiler-Lehman hash
and testing isomorphism inside each bucket.

    python3 tools/make_corpus.py --max-n 8 --out data
"""

from __future__ import annotations

import argparse
import itertools
import sys
from pathlib import Path

import networkx as nx

EXPECTED = {1: 1, 2: 1, 3: 2, 4: 6, 5: 21, 6: 112, 7: 853, 8: 11117, 9: 261080}


def atlas_connected(n: int) -> list[nx.Graph]:
    return [g for g in nx.graph_atlas_g() if g.number_of_nodes() == n and (n == 0 or nx.is_connected(g))]


def grow(prev: list[nx.Graph], n: int) -> list[nx.Graph]:
    buckets: dict[str, list[nx.Graph]] = {}
    out = []
    for base in prev:
        nodes = list(base.nodes())
        for size in range(1, n):
            for nb in itertools.combinations(nodes, size):
                g = base.copy()
                g.add_node(n - 1)
                g.add_edges_from((n - 1, u) for u in nb)
                key = nx.weisfeiler_lehman_graph_hash(g, iterations=3)
                bucket = buckets.setdefault(key, [])
                if any(nx.is_isomorphic(g, h) for h in bucket):
                    continue
                bucket.append(g)
                out.append(g)
    return out


def to_graph6(g: nx.Graph) -> bytes:
    g = nx.convert_node_labels_to_integers(g, ordering="sorted")
    return nx.to_graph6_bytes(g, header=False).strip()


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-n", type=int, default=8)
    ap.add_argument("--out", type=Path, default=Path("data"))
    args = ap.parse_args(argv)
    args.out.mkdir(parents=True, exist_ok=True)
    prev: list[nx.Graph] = []
    for n in range(1, args.max_n + 1):
        graphs = atlas_connected(n) if n <= 7 else grow(prev, n)
        want = EXPECTED.get(n)
        print(f"n={n}: {len(graphs)} connected graphs" + (f" (expected {want})" if want else ""), file=sys.stderr)
        if want is not None and len(graphs) != want:
            print("count mismatch", file=sys.stderr)
            return 1
        lines = sorted(to_graph6(g) for g in graphs)
        (args.out / f"connected{n}.g6").write_bytes(b"".join(line + b"\n" for line in lines))
        prev = graphs
    return 0


if __name__ == "__main__":
    sys.exit(main())
