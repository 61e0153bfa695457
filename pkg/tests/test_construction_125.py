import pytest

from fixtures import (
    one_two_five_case1,
    one_two_five_case2,
    one_two_five_disconnected_cross,
)
from triunicast.construction import (
    ConstructionError,
    construct,
    construct_125,
    find_Gprime,
)
from triunicast.field import FieldMatrix, enumerate_vectors
from triunicast.instance import UnicastInstance, Verdict, classify, connectivity


def test_fixture_connectivities():
    assert connectivity(one_two_five_case1()) == (1, 2, 5)
    assert connectivity(one_two_five_disconnected_cross()) == (1, 2, 5)
    assert connectivity(one_two_five_case2("b")) == (1, 2, 5)
    assert connectivity(one_two_five_case2("c")) == (1, 2, 5)


def test_case_analysis_tags():
    assert find_Gprime(one_two_five_case1()).case == "case1"
    assert find_Gprime(one_two_five_disconnected_cross()).case == "case1"
    assert find_Gprime(one_two_five_case2("b")).case in ("fig6b", "fig6c")
    assert find_Gprime(one_two_five_case2("c")).case in ("fig6b", "fig6c")


def test_case1_overlap_fixture_decodes():
    res = construct_125(one_two_five_case1(), p=257, seed=0)
    assert res.all_decodable
    assert res.scheme == "125"
    assert any("case1" in line for line in res.transcript)


def test_case1_disconnected_cross_decodes():
    res = construct_125(one_two_five_disconnected_cross(), p=257, seed=0)
    assert res.all_decodable
    assert any("clean-carrier-row" in line for line in res.transcript)


@pytest.mark.parametrize("variant", ["b", "c"])
def test_case2_fixtures_use_modified_branch(variant):
    res = construct_125(one_two_five_case2(variant), p=257, seed=0)
    assert res.all_decodable
    assert any("modified branch" in line for line in res.transcript)


def test_permuted_roles_decode():
    base = one_two_five_case1()
    permuted = UnicastInstance(
        base.dag.copy(), [base.sessions[2], base.sessions[0], base.sessions[1]]
    )
    assert connectivity(permuted) == (5, 1, 2)
    res = construct_125(permuted, p=257, seed=1)
    assert res.all_decodable


def test_dispatch_construct_picks_125():
    inst = one_two_five_case1()
    assert classify(inst).verdict is Verdict.FEASIBLE_125
    res = construct(inst, p=257, seed=0)
    assert res.scheme == "125" and res.all_decodable


def test_case1_theta_count_at_p3():
    """Admissible wide-session precoders over GF(3): the two linear
    constraints plus span exclusion leave at least q^3 - q^2 - 1 = 17."""
    res = None
    for seed in range(80):
        try:
            res = construct_125(one_two_five_case1(), p=3, seed=seed, retries=64)
            break
        except ConstructionError:
            continue
    assert res is not None, "no seed passed the rank gates at p=3"
    info = res.details["one_two_five"]
    constraints, m33, interference = (
        info["theta_constraints"],
        info["M33"],
        info["interference"],
    )
    i_rank = interference.rank()
    count = 0
    for c in enumerate_vectors(5, 3):
        theta = FieldMatrix.column(c, 3)
        if theta.is_zero() or not (constraints @ theta).is_zero():
            continue
        if interference.hstack(m33 @ theta).rank() == i_rank + 1:
            count += 1
    assert count >= 3**3 - 3**2 - 1


@pytest.mark.parametrize("variant", ["b", "c"])
def test_case2_theta_count_at_p3(variant):
    """Modified branch: at least q^2 - q - 1 = 5 admissible precoders."""
    res = None
    for seed in range(80):
        try:
            res = construct_125(one_two_five_case2(variant), p=3, seed=seed, retries=64)
            break
        except ConstructionError:
            continue
    assert res is not None, "no seed passed the rank gates at p=3"
    info = res.details["one_two_five"]
    if info["branch"] != "modified":
        pytest.skip("fixture resolved to the random-precoding branch")
    constraints = info["theta_constraints"]
    m33r, i_part = info["M33_reduced"], info["interference_reduced"]
    i_rank = i_part.rank()
    count = 0
    for c in enumerate_vectors(5, 3):
        theta = FieldMatrix.column(c, 3)
        if theta.is_zero() or not (constraints @ theta).is_zero():
            continue
        if i_part.hstack(m33r @ theta).rank() == i_rank + 1:
            count += 1
    assert count >= 3**2 - 3 - 1
