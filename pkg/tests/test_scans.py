from __future__ import annotations

import csv
import io

import pytest

from treeembed import graph6
from treeembed.constructions import sqrt_tightness
from treeembed.errors import PreconditionError
from treeembed.graph import complete, path
from treeembed.scans import (CSV_HEADER, balanced_equivalence, balanced_tree_experiment, c13_hypothesis,
                             conjecture13_scan, erdos_sos_scan, es_hypothesis, exact_balanced, iter_hosts,
                             loglog_slope, rows_to_csv, sampled_balanced, sqrt_probe)


def test_k5_all_four_vertex_trees():
    rep = erdos_sos_scan([complete(5)], [3])
    assert rep.ok and rep.instances_checked == 2 and rep.skipped == 0


def test_sparse_host_is_skipped():
    assert not es_hypothesis(path(5), 3)
    rep = erdos_sos_scan([path(5)], [3])
    assert rep.skipped == 1 and rep.instances_checked == 0


def test_graph6_strings_are_accepted(root):
    lines = list(iter_hosts([root / "data" / "connected5.g6"]))
    assert len(lines) == 21
    rep = erdos_sos_scan(lines, range(1, 5))
    assert rep.ok and rep.hosts == 21


def test_sqrt_probe_k9():
    probe = sqrt_probe(9)
    assert probe["high_degree"] == 1 and probe["threshold"] == "5/3"
    assert probe["hypothesis_excluded"] and probe["oracle"] == "NOT CONTAINED" and probe["ok"]
    assert not c13_hypothesis(sqrt_tightness(9).host, 9)


def test_c13_on_complete_hosts():
    rep = conjecture13_scan([complete(5), complete(7)], [4, 6], probes=[9])
    assert rep.ok
    # K5 and K7 both qualify at k=4 (3 trees each), only K7 at k=6 (11 trees)
    assert rep.instances_checked == 3 + 3 + 11 and rep.skipped == 1


def test_c13_scan_small_corpus(root):
    hosts = iter_hosts([root / "data" / f"connected{n}.g6" for n in range(5, 8)])
    rep = conjecture13_scan(hosts, [4, 6])
    assert rep.ok and not rep.violations and not rep.timeouts


def test_exact_and_sampled_balanced_fractions():
    row = exact_balanced(12)
    assert (row.balanced, row.total) == (1126, 1301)
    s = sampled_balanced(12, 4000, 1)
    assert abs(s.balanced_fraction - row.balanced_fraction) < 4 * s.stderr + 1e-9
    with pytest.raises(PreconditionError):
        exact_balanced(5)


def test_balanced_fraction_decreases():
    rows = balanced_tree_experiment([50, 100], 10_000, seed=3, method="sampled")
    assert rows[0].balanced_fraction > rows[1].balanced_fraction


def test_csv_header_and_slope():
    rows = balanced_tree_experiment([10, 20, 40], 2000, seed=0, method="sampled")
    text = rows_to_csv(rows)
    reader = csv.reader(io.StringIO(text))
    assert next(reader) == list(CSV_HEADER)
    assert len(list(reader)) == 3
    assert -1.5 < loglog_slope(rows) < 0


@pytest.mark.parametrize("k", [4, 6, 8])
def test_equivalence_small_k(k):
    res = balanced_equivalence(k)
    assert res["mismatches"] == [] and res["timeouts"] == 0


def test_violation_would_be_confirmed(root):
    """Hosts that only just miss the average degree bound are skipped, not reported."""
    g = graph6.decode("D?{")  # a star K_{1,4}: average degree 8/5
    assert not es_hypothesis(g, 3)
    assert erdos_sos_scan([g], [3]).skipped == 1
