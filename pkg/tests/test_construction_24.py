import pytest

from fixtures import two_four_case1, two_four_case2
from triunicast.construction import (
    ConstructionError,
    construct_224,
    construct_two_unicast_24,
)
from triunicast.field import FieldMatrix, enumerate_vectors
from triunicast.graph import Dag
from triunicast.instance import Session, UnicastInstance, connectivity


def test_fixture_connectivities():
    assert connectivity(two_four_case1()) == (2, 4)
    assert connectivity(two_four_case2()) == (2, 4)


def test_case1_fixture_decodes():
    res = construct_two_unicast_24(two_four_case1(), p=257, seed=0)
    assert res.all_decodable
    assert any("case 1" in line for line in res.transcript)
    assert res.details["two_four"]["case"] == 1


def test_case2_fixture_uses_deterministic_relay():
    res = construct_two_unicast_24(two_four_case2(), p=257, seed=0)
    assert res.all_decodable
    assert any("case 2" in line for line in res.transcript)


def test_no_red_overlap_reduces():
    # the red path is disjoint from the carriers; blue crosses two of them
    g = Dag()
    for i in range(4):
        g.add_edge("s2", f"a{i}")
        g.add_edge(f"a{i}", f"b{i}")
        g.add_edge(f"b{i}", "t2")
    g.add_edge("s1", "r")
    g.add_edge("r", "t1")  # clean red path
    g.add_edge("s1", "a0")
    g.add_edge("b0", "a1")
    g.add_edge("b1", "t1")  # blue crosses carriers 0 and 1
    inst = UnicastInstance(g, [Session("s1", "t1", 2), Session("s2", "t2", 1)])
    assert connectivity(inst) == (2, 4)
    res = construct_two_unicast_24(inst, p=257, seed=0)
    assert res.all_decodable
    assert any("overlap-free; routing it" in line for line in res.transcript)


def test_free_carrier_routes_everything():
    # both direct paths overlap carriers 0 and 1, carriers 2 and 3 are free
    g = Dag()
    for i in range(4):
        g.add_edge("s2", f"a{i}")
        g.add_edge(f"a{i}", f"b{i}")
        g.add_edge(f"b{i}", "t2")
    g.add_edge("s1", "a0")
    g.add_edge("b0", "t1")
    g.add_edge("s1", "a1")
    g.add_edge("b1", "t1")
    inst = UnicastInstance(g, [Session("s1", "t1", 2), Session("s2", "t2", 1)])
    res = construct_two_unicast_24(inst, p=257, seed=0)
    assert res.all_decodable
    assert any("overlap-free; pure routing" in line for line in res.transcript)


def test_case1_theta_choice_count_at_p3():
    """Admissible carrier precoders over GF(3): at least q^2 - q - 1 = 5."""
    res = None
    for seed in range(60):
        try:
            res = construct_two_unicast_24(two_four_case1(), p=3, seed=seed, retries=64)
            if res.details["two_four"]["case"] == 1:
                break
        except ConstructionError:
            continue
    assert res is not None
    info = res.details["two_four"]
    m12, W = info["M12"], info["W"]
    count = 0
    for c in enumerate_vectors(4, 3):
        theta = FieldMatrix.column(c, 3)
        if theta.is_zero():
            continue
        if not (m12 @ theta).is_zero():
            continue
        if (W @ theta).is_zero():
            continue
        count += 1
    assert count >= 3**2 - 3 - 1


def test_swapped_session_order():
    base = two_four_case1()
    swapped = UnicastInstance(base.dag.copy(), [base.sessions[1], base.sessions[0]])
    res = construct_two_unicast_24(swapped, p=257, seed=2)
    assert res.all_decodable
    assert res.instance.sessions[0].rate == 1


def test_224_two_slot_composition():
    # widen a [2 4] fixture into a three-session [2 2 4] instance
    g = two_four_case1().dag.copy()
    g.add_edge("s3", "z0")
    g.add_edge("z0", "t3")
    g.add_edge("s3", "z1")
    g.add_edge("z1", "t3")
    inst = UnicastInstance(
        g, [Session("s1", "t1"), Session("s3", "t3"), Session("s2", "t2")]
    )
    assert connectivity(inst) == (2, 2, 4)
    res = construct_224(inst, p=257, seed=0)
    assert res.all_decodable
    assert res.scheme == "224"
    assert connectivity(res.instance) == (4, 4, 8)


def test_224_permutation_covariance():
    g = two_four_case1().dag.copy()
    g.add_edge("s3", "z0")
    g.add_edge("z0", "t3")
    g.add_edge("s3", "z1")
    g.add_edge("z1", "t3")
    inst = UnicastInstance(
        g, [Session("s2", "t2"), Session("s1", "t1"), Session("s3", "t3")]
    )
    assert connectivity(inst) == (4, 2, 2)
    res = construct_224(inst, p=257, seed=5)
    assert res.all_decodable


def test_224_rejects_wrong_class():
    g = Dag.from_edges([("s1", "t1"), ("s2", "t2"), ("s3", "t3")])
    inst = UnicastInstance(g, [Session(f"s{i}", f"t{i}") for i in (1, 2, 3)])
    with pytest.raises(ConstructionError):
        construct_224(inst)
