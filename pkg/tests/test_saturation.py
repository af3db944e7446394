from __future__ import annotations

from fractions import Fraction

import pytest
import sympy as sp

from treeembed.audit import Audit, PRACTICAL
from treeembed.constants import THEORETICAL, ConstantSchedule, cluster_bound, derive_constants
from treeembed.errors import NoEligibleTree, PreconditionError, ProofInvariantError
from treeembed.fixtures import blowup, pipeline_tree
from treeembed.graph import complete, mask_of
from treeembed.partition import one_sided_partition
from treeembed.regularity import ClusterGraph
from treeembed.saturation import (SaturationEngine, build_matching_structure, run_three_phases, saturation_status)
from treeembed.trees import path_tree
from treeembed.validate import validate_embedding


def cluster_graph(m: int, edges) -> ClusterGraph:
    return ClusterGraph([tuple(range(i * 3, i * 3 + 3)) for i in range(m)], set(range(m)),
                        {(min(a, b), max(a, b)): Fraction(1, 2) for a, b in edges})


# -- constants ------------------------------------------------------------------------


def test_theoretical_d_example():
    s = derive_constants(Fraction(1, 10), Fraction(1, 2))
    assert s.d == Fraction(1, 400000)


def test_theoretical_matches_symbolic_rederivation():
    eta, r = sp.Rational(1, 10), sp.Rational(1, 2)
    d = (eta * r) ** 2 / 1000
    eps = (eta * r * d) ** 20 / sp.Integer(10) ** 15
    M = 4096  # 2**ceil(1/eps) is astronomically larger than the cap
    beta = sp.Min(eps / M, eta * d / (10**5 * M))
    gamma = beta * d / (2000 * M)
    s = derive_constants(Fraction(1, 10), Fraction(1, 2), THEORETICAL)
    for ours, ref in ((s.d, d), (s.eps, eps), (s.beta, beta), (s.gamma, gamma)):
        assert sp.Rational(ours.numerator, ours.denominator) == ref
    assert s.M == M
    assert s.k0 == 10 / s.gamma


def test_practical_boundary_and_rejection():
    s = derive_constants(0.1, 0.5, "practical", d=Fraction(1, 10), eps=Fraction(1, 10**4))
    assert s.eps == s.d ** 2 / 100
    with pytest.raises(PreconditionError, match=r"eps <= d\^2/100"):
        derive_constants(0.1, 0.5, "practical", d=Fraction(1, 10), eps=Fraction(1, 100))
    with pytest.raises(PreconditionError):
        derive_constants(0.1, 0.5, THEORETICAL, d=Fraction(1, 10))
    with pytest.raises(PreconditionError):
        derive_constants(1, 0.5)


def test_cluster_bound_model():
    assert cluster_bound(Fraction(1, 4)) == 16
    assert cluster_bound(Fraction(1, 100)) == 4096
    assert cluster_bound(Fraction(1, 3), cap=4) == 4


# -- matching structure -----------------------------------------------------------------


def test_star_of_clusters_has_empty_matching():
    cg = cluster_graph(6, [(0, i) for i in range(1, 6)])
    ms = build_matching_structure(cg, 0, Fraction(1, 10))
    assert ms.M == [] and ms.O1 == {1, 2, 3, 4, 5}
    assert ms.O2 == set()


def test_perfect_matching_neighbourhood():
    cg = cluster_graph(7, [(0, i) for i in range(1, 7)] + [(1, 2), (3, 4), (5, 6)])
    audit = Audit(PRACTICAL)
    ms = build_matching_structure(cg, 0, Fraction(1, 10), audit)
    assert ms.O1 == set()
    assert {frozenset(e) for e in ms.M} == {frozenset((1, 2)), frozenset((3, 4)), frozenset((5, 6))}
    assert not audit.failed


def test_augmenting_path_is_removed():
    # greedy lowest-id would match 1-2 and strand 3 and 4; 3-1=2-4 is augmenting
    cg = cluster_graph(5, [(0, i) for i in range(1, 5)] + [(1, 2), (1, 3), (2, 4)])
    ms = build_matching_structure(cg, 0, Fraction(1, 10))
    assert len(ms.M) == 2 and ms.O1 == set()


def test_structure_invariants_on_denser_cluster_graph():
    edges = [(0, i) for i in range(1, 9)] + [(1, 2), (2, 3), (3, 4), (5, 6), (7, 9), (8, 9), (4, 9)]
    cg = cluster_graph(10, edges)
    audit = Audit(PRACTICAL)
    ms = build_matching_structure(cg, 0, Fraction(1, 10), audit)
    assert not audit.failed
    nb = {i: cg.neighbours(i) for i in cg.alive}
    assert all(not (nb[o] & ms.O1) for o in ms.O1)
    assert all(not (nb[u] & ms.O1) for u in ms.M1)
    assert not (ms.O2 & nb[0])


# -- engine state ------------------------------------------------------------------------


def small_engine(eta=Fraction(1, 10), r=Fraction(1, 2), d=Fraction(1, 10), eps=Fraction(1, 100), s=300):
    g, clusters = blowup({(0, 1): 0.9, (0, 2): 0.9, (1, 2): 0.7}, 3, s, seed=1, shuffle=False)
    cg = ClusterGraph([tuple(c) for c in clusters], {0, 1, 2},
                      {(0, 1): Fraction(9, 10), (0, 2): Fraction(9, 10), (1, 2): Fraction(7, 10)})
    ms = build_matching_structure(cg, 0, eta)
    t = path_tree(41)
    part = one_sided_partition(t.oriented(), 4)
    sched = ConstantSchedule(eta, r, d, eps, Fraction(1, 50), Fraction(1, 20), 4096, Fraction(200), Fraction(1000),
                             mode="practical")
    return SaturationEngine(g, t.oriented(), part, cg, ms, sched, Audit(PRACTICAL), typical_eps=Fraction(1, 4))


def test_reserve_subset_sizes():
    eng = small_engine(eta=Fraction(1), r=Fraction(1), d=Fraction(1))
    eng.fix_reserve_subsets()
    assert eng.F_sub and all(Fu.bit_count() == 1 for Fu in eng.F_sub.values())
    eng = small_engine()
    eng.fix_reserve_subsets()
    assert all(Fu == 0 for Fu in eng.F_sub.values())


def test_saturation_status_boundaries():
    eng = small_engine()
    (u, v), = eng.ms.M
    assert eng.deg_v1[u] == 270
    assert saturation_status(eng, u) == {"full": False, "saturated": False}
    # 4 sqrt(eps) |u| = 120, so usage 150 sits exactly on the saturation threshold
    members = eng.cg.clusters[u]
    eng.F = mask_of(members[:149])
    assert not saturation_status(eng, u)["saturated"]
    eng.F = mask_of(members[:150])
    assert saturation_status(eng, u)["saturated"]
    eng.F = mask_of(members)
    assert saturation_status(eng, u) == {"full": True, "saturated": True}
    assert set(saturation_status(eng, (u, v))) == {"full", "saturated"}


def test_place_and_no_eligible_tree():
    eng = small_engine()
    (u, v), = eng.ms.M
    eng.embed_seed_level(v)
    eng.reserve_F()
    assert eng.check_F()
    i = eng.place(u, v, "test")
    assert i in eng.where
    assert validate_embedding(eng.t, eng.g, eng.phi.map).ok
    # hide every remaining tree: nothing is nice to u any more
    eng.typ[u] = 0
    with pytest.raises(NoEligibleTree):
        eng.place(u, v, "test")


# -- pipeline --------------------------------------------------------------------------


def test_complete_host_pipeline():
    g = complete(600)
    t = pipeline_tree(200, 8, Fraction(1, 2), 0)
    s = derive_constants(0.1, 0.5, "practical")
    res = run_three_phases(g, t, s, seed=0)
    assert res.ok and res.report["route"] == "saturation"
    assert res.report["audit"]["failed"] == []
    assert validate_embedding(t.oriented(), g, res.embedding.map, require_total=True).ok


def test_pipeline_rejects_unskewed_tree():
    s = derive_constants(0.1, Fraction(1, 4), "practical")
    with pytest.raises(PreconditionError, match="smaller colour class"):
        run_three_phases(complete(400), path_tree(100), s)


def test_theoretical_audit_raises():
    audit = Audit(THEORETICAL)
    with pytest.raises(ProofInvariantError):
        audit.check("x", False, 1, 0)
