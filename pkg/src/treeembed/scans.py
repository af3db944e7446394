"""Exhaustive conjecture scans and the balanced-tree experiment.

Scans fan out over host graphs with ``multiprocessing`` when ``jobs > 1``;
results are merged in input order so a report does not depend on the
number of workers.  Every violation found by the backtracking oracle is
re-checked by the permutation brute force (or by a second oracle pass with
a larger budget when the host is too big for brute force) before it is
reported.
"""

from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from multiprocessing import Pool
from typing import Iterable, Sequence

from . import graph6
from .constructions import sqrt_tightness, two_clique_host
from .counting import enumerate_free_trees, otter_counts, sample_centroid_branch_sizes
from .errors import PreconditionError
from .graph import Graph, make_rng
from .oracle import CONTAINED, DEFAULT_BUDGET, NOT_CONTAINED, TIMEOUT, brute_force_embed, decide
from .trees import Tree, is_balanced, subset_sum_reachable

BRUTE_FORCE_MAX = 9
EXACT_MAX_ORDER = 17
CSV_HEADER = ("k", "method", "balanced_fraction", "stderr", "balanced", "total")


@dataclass
class ScanReport:
    kind: str
    hosts: int = 0
    host_k_pairs: int = 0
    instances_checked: int = 0
    skipped: int = 0
    violations: list[dict] = field(default_factory=list)
    unconfirmed: list[dict] = field(default_factory=list)
    timeouts: list[dict] = field(default_factory=list)
    per_k: dict[int, int] = field(default_factory=dict)
    probes: list[dict] = field(default_factory=list)
    runtime: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.violations and not self.timeouts and all(p["ok"] for p in self.probes)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "hosts": self.hosts,
            "host_k_pairs": self.host_k_pairs,
            "instances_checked": self.instances_checked,
            "skipped_out_of_hypothesis": self.skipped,
            "violations": self.violations,
            "unconfirmed": self.unconfirmed,
            "timeouts": self.timeouts,
            "per_k": {str(k): v for k, v in sorted(self.per_k.items())},
            "probes": self.probes,
            "ok": self.ok,
            "runtime": self.runtime,
        }


# -- hypotheses -------------------------------------------------------------------


def es_hypothesis(g: Graph, k: int) -> bool:
    """Average degree strictly above k - 1."""
    return g.n > 0 and 2 * g.num_edges > (k - 1) * g.n


def c13_hypothesis(g: Graph, k: int) -> bool:
    """Minimum degree >= k/2 and at least n/(2 sqrt k) vertices of degree >= k."""
    if g.n == 0:
        return False
    degs = g.degrees()
    if 2 * min(degs) < k:
        return False
    high = sum(1 for d in degs if d >= k)
    return 4 * high * high * k >= g.n * g.n


_HYPOTHESES = {"es": es_hypothesis, "c13": c13_hypothesis}


# -- worker -------------------------------------------------------------------------

_TREES: dict[int, list[Tree]] = {}


def _trees(order: int) -> list[Tree]:
    ts = _TREES.get(order)
    if ts is None:
        ts = _TREES[order] = list(enumerate_free_trees(order))
    return ts


def _confirm(t: Tree, g: Graph, budget: int) -> bool:
    """Second, independent look at a reported non-containment."""
    if g.n <= BRUTE_FORCE_MAX and t.n <= 8:
        return brute_force_embed(t, g) is None
    return decide(t, g, budget * 10).verdict == NOT_CONTAINED


def _scan_host(job) -> dict:
    idx, g6, kind, ks, budget = job
    g = graph6.decode(g6)
    hyp = _HYPOTHESES[kind]
    out = {"pairs": 0, "checked": 0, "skipped": 0, "per_k": {}, "violations": [], "unconfirmed": [], "timeouts": []}
    for k in ks:
        if k < 1 or not hyp(g, k):
            out["skipped"] += 1
            continue
        out["pairs"] += 1
        for t in _trees(k + 1):
            res = decide(t, g, budget)
            out["checked"] += 1
            out["per_k"][k] = out["per_k"].get(k, 0) + 1
            if res.verdict == CONTAINED:
                continue
            rec = {"index": idx, "host": g6, "tree": t.to_parent_line(), "k": k}
            if res.verdict == TIMEOUT:
                out["timeouts"].append(rec)
            elif _confirm(t, g, budget):
                out["violations"].append(rec)
            else:
                out["unconfirmed"].append(rec)
    return out


def _as_g6(h) -> str:
    if isinstance(h, Graph):
        return graph6.encode(h).decode("ascii")
    if isinstance(h, bytes):
        return h.decode("ascii").strip()
    return str(h).strip()


def _run_scan(kind: str, hosts: Iterable, k_range: Sequence[int], budget: int, jobs: int) -> ScanReport:
    start = time.perf_counter()
    ks = sorted(set(int(k) for k in k_range))
    jobs_iter = ((i, _as_g6(h), kind, ks, budget) for i, h in enumerate(hosts))
    rep = ScanReport(kind)
    if jobs > 1:
        with Pool(jobs) as pool:
            results = pool.imap(_scan_host, jobs_iter, chunksize=64)
            _merge(rep, results)
    else:
        _merge(rep, map(_scan_host, jobs_iter))
    rep.runtime = time.perf_counter() - start
    return rep


def _merge(rep: ScanReport, results) -> None:
    for res in results:
        rep.hosts += 1
        rep.host_k_pairs += res["pairs"]
        rep.instances_checked += res["checked"]
        rep.skipped += res["skipped"]
        for k, c in res["per_k"].items():
            rep.per_k[k] = rep.per_k.get(k, 0) + c
        rep.violations.extend(res["violations"])
        rep.unconfirmed.extend(res["unconfirmed"])
        rep.timeouts.extend(res["timeouts"])


def iter_hosts(paths: Iterable) -> Iterable[bytes]:
    """Raw graph6 lines from one or more files, in order."""
    for p in paths:
        with open(p, "rb") as fh:
            for line in fh:
                line = line.strip()
                if line and not line.startswith(b">>"):
                    yield line


def erdos_sos_scan(hosts: Iterable, k_range: Sequence[int], *, budget: int = DEFAULT_BUDGET, jobs: int = 1) -> ScanReport:
    """Check every free tree on k+1 vertices in every host with average degree > k-1.

    ``hosts`` may hold :class:`Graph` objects or graph6 strings/bytes.
    """
    return _run_scan("es", hosts, k_range, budget, jobs)


def sqrt_probe(k: int, budget: int = DEFAULT_BUDGET) -> dict:
    """The tightness construction at k must miss the hypothesis and not contain its tree."""
    rep = sqrt_tightness(k)
    degs = rep.host.degrees()
    high = sum(1 for d in degs if d >= k)
    verdict = decide(rep.tree, rep.host, budget).verdict
    excluded = not c13_hypothesis(rep.host, k)
    return {
        "k": k,
        "n": rep.host.n,
        "high_degree": high,
        "threshold": str(Fraction(rep.host.n, 2) / Fraction(math.isqrt(k))),
        "hypothesis_excluded": excluded,
        "certificates_ok": rep.ok,
        "oracle": verdict,
        "ok": excluded and rep.ok and verdict == NOT_CONTAINED,
    }


def conjecture13_scan(hosts: Iterable, k_range: Sequence[int], *, budget: int = DEFAULT_BUDGET, jobs: int = 1,
                      probes: Iterable[int] | None = None) -> ScanReport:
    """Check every tree of order k+1 in hosts meeting the minimum/high degree hypotheses.

    ``probes`` lists k values at which the tightness construction is run;
    by default the odd squares in ``k_range``, or 9 if there are none.
    """
    rep = _run_scan("c13", hosts, k_range, budget, jobs)
    if probes is None:
        probes = [k for k in k_range if k > 1 and math.isqrt(k) ** 2 == k and k % 2] or [9]
    start = time.perf_counter()
    rep.probes = [sqrt_probe(k, budget) for k in probes]
    rep.runtime += time.perf_counter() - start
    return rep


# -- balanced trees ---------------------------------------------------------------


@dataclass
class ExperimentRow:
    k: int
    method: str
    balanced_fraction: float
    stderr: float
    balanced: int
    total: int

    def as_tuple(self) -> tuple:
        return (self.k, self.method, f"{self.balanced_fraction:.10g}", f"{self.stderr:.10g}", self.balanced, self.total)


def _branches_balanced(sizes: list[int], half: int) -> bool:
    return bool((subset_sum_reachable(sizes) >> half) & 1)


def exact_balanced(k: int) -> ExperimentRow:
    if k % 2:
        raise PreconditionError("k must be even")
    total = otter_counts(k + 1).free[k + 1]
    good = sum(1 for t in enumerate_free_trees(k + 1) if is_balanced(t))
    return ExperimentRow(k, "exact", good / total, 0.0, good, total)


def sampled_balanced(k: int, samples: int, seed) -> ExperimentRow:
    if k % 2:
        raise PreconditionError("k must be even")
    if samples < 2:
        raise PreconditionError("need at least two samples")
    rng = make_rng(seed)
    half = k // 2
    good = sum(1 for _ in range(samples) if _branches_balanced(sample_centroid_branch_sizes(k + 1, rng), half))
    p = good / samples
    return ExperimentRow(k, "sampled", p, math.sqrt(p * (1 - p) / samples), good, samples)


def _experiment_job(job) -> list[ExperimentRow]:
    k, method, samples, seed = job
    rows = []
    if method in ("exact", "both") or (method == "auto" and k + 1 <= EXACT_MAX_ORDER):
        rows.append(exact_balanced(k))
    if method in ("sampled", "both") or (method == "auto" and k + 1 > EXACT_MAX_ORDER):
        rows.append(sampled_balanced(k, samples, [seed, k]))
    return rows


def balanced_tree_experiment(k_list: Sequence[int], samples: int, seed=0, *, method: str = "auto",
                             jobs: int = 1) -> list[ExperimentRow]:
    """Fraction of free trees on k+1 vertices that are balanced, per even k.

    ``method`` is ``auto`` (exact while k+1 <= 17, sampled above), ``exact``,
    ``sampled`` or ``both``.  Each k gets its own random stream derived from
    ``(seed, k)``.
    """
    if method not in ("auto", "exact", "sampled", "both"):
        raise PreconditionError(f"unknown method {method!r}")
    for k in k_list:
        if k < 2 or k % 2:
            raise PreconditionError(f"k={k} must be even and >= 2")
    jobs_list = [(k, method, samples, seed) for k in k_list]
    if jobs > 1:
        with Pool(jobs) as pool:
            parts = pool.map(_experiment_job, jobs_list)
    else:
        parts = [_experiment_job(j) for j in jobs_list]
    return [row for part in parts for row in part]


def rows_to_csv(rows: Iterable[ExperimentRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for row in rows:
        w.writerow(row.as_tuple())
    return buf.getvalue()


def loglog_slope(rows: Iterable[ExperimentRow]) -> float:
    """Least-squares slope of log(fraction) against log(k)."""
    import numpy as np

    pts = [(math.log(r.k), math.log(r.balanced_fraction)) for r in rows if r.balanced_fraction > 0]
    if len(pts) < 2:
        raise PreconditionError("need two rows with positive fraction")
    x, y = np.array(pts).T
    return float(np.polyfit(x, y, 1)[0])


def balanced_equivalence(k: int, *, budget: int = DEFAULT_BUDGET) -> dict:
    """Compare is_balanced with containment in the two-clique host, over all trees on k+1 vertices."""
    if k % 2:
        raise PreconditionError("k must be even")
    host = two_clique_host(k)
    checked, mismatches, timeouts = 0, [], 0
    for t in enumerate_free_trees(k + 1):
        verdict = decide(t, host, budget).verdict
        checked += 1
        if verdict == TIMEOUT:
            timeouts += 1
        elif (verdict == CONTAINED) != is_balanced(t):
            mismatches.append(t.to_parent_line())
    return {"k": k, "trees": checked, "mismatches": mismatches, "timeouts": timeouts}
