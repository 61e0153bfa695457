import pytest

from triunicast.coding import NetworkCode, random_code, routing_rows, zero_code
from triunicast.counterexample import FamilyId, generate
from triunicast.graph import Dag
from triunicast.instance import Session, UnicastInstance, connectivity
from triunicast.verify import (
    BudgetExceededError,
    brute_force_linear_feasibility,
    coefficient_count,
    verify_decoding,
)


def disjoint_333():
    g = Dag()
    for i in (1, 2, 3):
        for j in range(3):
            g.add_edge(f"s{i}", f"m{i}{j}")
            g.add_edge(f"m{i}{j}", f"t{i}")
    return UnicastInstance(g, [Session(f"s{i}", f"t{i}") for i in (1, 2, 3)])


def test_routing_solution_all_decodable():
    inst = disjoint_333()
    # route each session over its first chain
    assignments = {}
    for e in inst.dag.edges():
        if e.head in ("m10", "m20", "m30") or e.tail in ("m10", "m20", "m30"):
            assignments[e.id] = 0
    code = NetworkCode(5, routing_rows(inst, assignments))
    report = verify_decoding(inst, code)
    assert report.all_decodable
    assert all(t.method == "zero-forcing" for t in report.terminals)


def test_zero_code_decodes_nothing():
    inst = disjoint_333()
    report = verify_decoding(inst, zero_code(inst, 5))
    assert not report.all_decodable
    assert all(not t.decodable for t in report.terminals)


def test_verify_is_certificate_not_sampling():
    # a code whose interference aligns: t receives X1+X2 and X2; certificate
    # must accept (desired separates) even though every row mixes sources
    g = Dag.from_edges([("s1", "m"), ("s2", "m"), ("m", "t1"), ("s2", "t1"), ("s2", "t2"), ("s1", "z"), ("z", "t2")])
    inst = UnicastInstance(g, [Session("s1", "t1"), Session("s2", "t2")])
    rows = {0: (1,), 1: (1,), 2: (1, 1), 3: (1,), 4: (1,), 5: (0,), 6: (1,)}
    report = verify_decoding(inst, NetworkCode(2, rows))
    t1 = report.terminals[0]
    assert t1.decodable and t1.interference_rank == 1
    t2 = report.terminals[1]
    assert t2.decodable and t2.method == "zero-forcing"


def test_brute_force_fig222_infeasible_gf2():
    inst = generate(FamilyId.FIG222)
    res = brute_force_linear_feasibility(inst, 2, T=1)
    assert not res.feasible
    assert res.witness is None


def test_brute_force_small_333_feasible_with_witness():
    g = Dag()
    for i in (1, 2, 3):
        g.add_edge(f"s{i}", f"m{i}")
        g.add_edge(f"m{i}", f"t{i}")
    inst = UnicastInstance(g, [Session(f"s{i}", f"t{i}") for i in (1, 2, 3)])
    res = brute_force_linear_feasibility(inst, 2, T=1)
    assert res.feasible
    assert res.witness is not None
    assert verify_decoding(res.expanded, res.witness).all_decodable


def test_brute_force_respects_budget():
    inst = generate(FamilyId.FIG23_RATE21)
    assert coefficient_count(inst, 1) == 23
    with pytest.raises(BudgetExceededError):
        brute_force_linear_feasibility(inst, 2, T=1, budget=10)


def test_brute_force_fig23_infeasible_gf2_T1():
    inst = generate(FamilyId.FIG23_RATE21)
    assert connectivity(inst) == (2, 3)
    res = brute_force_linear_feasibility(inst, 2, T=1)
    assert not res.feasible


def test_brute_force_matches_cut_certificates():
    # every cut-violated family must also be brute-force infeasible
    for fam in (FamilyId.FIG222, FamilyId.FIG113):
        inst = generate(fam)
        res = brute_force_linear_feasibility(inst, 2, T=1)
        assert not res.feasible, fam


def test_brute_force_feasible_at_higher_T_when_routing_needs_vectoring():
    # one shared relay for two sessions is infeasible at T=1 but the demand
    # pattern [1 1] over separate chains stays feasible at T=2 as well
    g = Dag()
    g.add_edge("s1", "a"), g.add_edge("a", "t1")
    g.add_edge("s2", "b"), g.add_edge("b", "t2")
    inst = UnicastInstance(g, [Session("s1", "t1"), Session("s2", "t2")])
    res = brute_force_linear_feasibility(inst, 2, T=2)
    assert res.feasible
    assert res.expanded.dag.num_edges() == 8
    assert verify_decoding(res.expanded, res.witness).all_decodable


def test_random_code_on_disjoint_instance_usually_decodes_at_large_p():
    inst = disjoint_333()
    ok = 0
    for seed in range(20):
        if verify_decoding(inst, random_code(inst, 257, seed)).all_decodable:
            ok += 1
    assert ok >= 19
