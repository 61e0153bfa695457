import itertools
import random

import pytest

from triunicast.coding import (
    CodingError,
    NetworkCode,
    det_identity_check,
    distinct_image_count,
    edge_basis_vectors,
    format_code,
    lift_code,
    parse_code,
    partial_decode,
    precoding_matrix,
    propagate,
    random_code,
    routing_rows,
    transfer_matrix,
)
from triunicast.field import FieldMatrix, enumerate_vectors
from triunicast.graph import Dag, max_flow, structure
from triunicast.instance import Session, UnicastInstance


def chain_instance():
    g = Dag.from_edges([("s1", "a"), ("a", "t1"), ("s2", "b"), ("b", "t2")])
    return UnicastInstance(g, [Session("s1", "t1"), Session("s2", "t2")])


def test_propagate_routing_gives_unit_vectors():
    inst = chain_instance()
    code = NetworkCode(2, routing_rows(inst, {0: 0, 1: 0, 2: 0, 3: 0}))
    vec = propagate(inst, code)
    assert vec[0] == (1, 0) and vec[1] == (1, 0)
    assert vec[2] == (0, 1) and vec[3] == (0, 1)


def test_propagate_merge_node_xors_over_gf2():
    g = Dag.from_edges([("s1", "m"), ("s2", "m"), ("m", "x"), ("x", "t1"), ("x", "t2")])
    inst = UnicastInstance(g, [Session("s1", "t1"), Session("s2", "t2")])
    rows = {0: (1,), 1: (1,), 2: (1, 1), 3: (1,), 4: (1,)}
    vec = propagate(inst, NetworkCode(2, rows))
    assert vec[2] == (1, 1)
    assert vec[3] == (1, 1) and vec[4] == (1, 1)


def test_propagate_linearity_in_source_row():
    g = Dag.from_edges([("s1", "m"), ("s2", "m"), ("m", "t1"), ("s2", "t2")])
    inst = UnicastInstance(g, [Session("s1", "t1"), Session("s2", "t2")])
    base = {0: (1,), 1: (2,), 2: (3, 4), 3: (1,)}
    vec1 = propagate(inst, NetworkCode(7, base))
    scaled = dict(base)
    scaled[0] = (5,)  # scale session-1 injection by 5
    vec2 = propagate(inst, NetworkCode(7, scaled))
    for eid in (0, 2):
        assert vec2[eid][0] == (5 * vec1[eid][0]) % 7
        assert vec2[eid][1] == vec1[eid][1]


def test_propagate_missing_row_names_edge():
    inst = chain_instance()
    with pytest.raises(CodingError) as err:
        propagate(inst, NetworkCode(2, {0: (1,)}))
    assert "edge" in str(err.value)


def test_transfer_identity_block_at_source_edges():
    g = Dag.from_edges([("s1", "a"), ("s1", "b"), ("a", "t1"), ("b", "t1"), ("s2", "t2")])
    inst = UnicastInstance(g, [Session("s1", "t1", rate=2), Session("s2", "t2")])
    rows = {0: (1, 0), 1: (0, 1), 2: (1,), 3: (1,), 4: (1,)}
    tm = transfer_matrix(inst, NetworkCode(5, rows), [0, 1])
    assert tm.block(0) == FieldMatrix.identity(2, 5)
    assert tm.block(1).is_zero()


def test_transfer_rank_bounded_by_max_flow():
    rng = random.Random(5)
    g = Dag()
    names = [f"n{i}" for i in range(9)]
    for i, j in itertools.combinations(range(9), 2):
        if rng.random() < 0.35:
            g.add_edge(names[i], names[j])
    g.add_edge("S", "n0"), g.add_edge("S", "n1"), g.add_edge("S", "n2")
    g.add_edge("n8", "T"), g.add_edge("n7", "T")
    g.add_edge("S2", "n3"), g.add_edge("n6", "T2")
    inst = UnicastInstance(g, [Session("S", "T"), Session("S2", "T2")])
    for seed in range(5):
        code = random_code(inst, 257, seed)
        tm = transfer_matrix(inst, code, "T", basis="source_edge")
        assert tm.block_by_label("S").rank() <= max_flow(g, "S", "T")
        assert tm.block_by_label("S2").rank() <= max_flow(g, "S2", "T")


def test_random_code_deterministic_per_seed():
    inst = chain_instance()
    assert random_code(inst, 257, 9) == random_code(inst, 257, 9)
    assert random_code(inst, 257, 9) != random_code(inst, 257, 10)


def test_random_code_small_field_can_zero_a_path():
    g = Dag.from_edges([("s1", "a"), ("a", "b"), ("b", "t1"), ("s2", "t2")])
    inst = UnicastInstance(g, [Session("s1", "t1"), Session("s2", "t2")])
    alive = 0
    for seed in range(200):
        vec = propagate(inst, random_code(inst, 2, seed))
        if any(vec[2]):
            alive += 1
    assert 0 < alive < 200  # GF(2) kills the path in a positive fraction of seeds


def admissible_gf2_inputs():
    for entries in itertools.product(range(2), repeat=6):
        m2 = FieldMatrix.from_rows([list(entries[:3]), list(entries[3:])], 2)
        for b2 in range(2):
            beta = (1, b2)
            for x1, x2 in itertools.product(range(2), repeat=2):
                if x2 == 0 or (beta[0] * x1 + beta[1] * x2) % 2 != 0:
                    continue
                yield m2, beta, (x1, x2)


def test_det_identity_exhaustive_gf2():
    count = 0
    for m2, beta, xi in admissible_gf2_inputs():
        assert det_identity_check(m2, beta, xi)
        count += 1
    assert count > 0


def test_det_identity_random_gf7():
    rng = random.Random(3)
    for _ in range(300):
        m2 = FieldMatrix.from_rows(
            [[rng.randrange(7) for _ in range(3)] for _ in range(2)], 7
        )
        b1 = rng.randrange(1, 7)
        b2 = rng.randrange(7)
        x2 = rng.randrange(1, 7)
        x1 = (-b2 * x2 * pow(b1, 5, 7)) % 7
        assert det_identity_check(m2, (b1, b2), (x1, x2))


def test_det_identity_substitution_case():
    # beta=[1,0], xi=[0,1]: reduces to det([M21 | second column of M22])
    rng = random.Random(4)
    for _ in range(50):
        m2 = FieldMatrix.from_rows(
            [[rng.randrange(5) for _ in range(3)] for _ in range(2)], 5
        )
        assert det_identity_check(m2, (1, 0), (0, 1))
        lhs = m2.take_cols([0, 2]).det()
        m21 = m2.take_cols([0])
        m22 = m2.take_cols([1, 2])
        direct = m21.hstack(m22 @ FieldMatrix.column([0, 1], 5)).det()
        assert lhs == direct


def test_det_identity_precondition_errors_are_distinct():
    m2 = FieldMatrix.zeros(2, 3, 5)
    with pytest.raises(CodingError, match="beta\\[0\\]"):
        det_identity_check(m2, (0, 1), (1, 1))
    with pytest.raises(CodingError, match="beta . xi"):
        det_identity_check(m2, (1, 1), (1, 1))
    with pytest.raises(CodingError, match="xi\\[1\\]"):
        det_identity_check(m2, (1, 0), (0, 0))


def test_partial_decode_identity_case():
    z = FieldMatrix.column([2, 0, 1], 3)
    h1 = FieldMatrix.zeros(3, 0, 3)
    h2 = FieldMatrix.identity(3, 3)
    x2 = partial_decode(z, h1, h2)
    assert x2 == z


def test_partial_decode_brute_force_gf3():
    # H1 rank 1 (sigma = 1 with l1 = 2), H2 full rank, spans intersect trivially
    h1 = FieldMatrix.from_rows([[1, 2], [2, 4 % 3], [0, 0], [0, 0]], 3)
    h2 = FieldMatrix.from_rows([[0, 0], [1, 0], [0, 1], [1, 1]], 3)
    assert h1.rank() == 1 and h2.rank() == 2
    assert h1.hstack(h2).rank() == 3
    for x1 in enumerate_vectors(2, 3, include_zero=True):
        for x2 in enumerate_vectors(2, 3, include_zero=True):
            z = (h1 @ FieldMatrix.column(x1, 3)) + (h2 @ FieldMatrix.column(x2, 3))
            got = partial_decode(z, h1, h2)
            assert got is not None
            assert got == FieldMatrix.column(x2, 3)


def test_partial_decode_violated_span_condition_returns_none():
    h1 = FieldMatrix.from_rows([[1], [0]], 3)
    h2 = FieldMatrix.from_rows([[2], [0]], 3)  # same span as h1
    z = FieldMatrix.column([1, 0], 3)
    assert partial_decode(z, h1, h2) is None


def test_distinct_image_count_identity_and_rank0():
    ident = FieldMatrix.identity(3, 3)
    assert distinct_image_count(ident, None) == 3**3 - 1
    zero = FieldMatrix.zeros(2, 3, 3)
    assert distinct_image_count(zero, None) == 1
    with pytest.raises(CodingError):
        distinct_image_count(FieldMatrix.identity(2, 7), None)


def test_lift_code_reproduces_structured_vectors():
    g = Dag.from_edges(
        [("s", "a"), ("s", "b"), ("a", "v"), ("b", "v"), ("v", "c"), ("v", "d"),
         ("c", "t"), ("d", "t"), ("s2", "v2"), ("v2", "t2")]
    )
    inst = UnicastInstance(g, [Session("s", "t", rate=2), Session("s2", "t2")])
    smap = structure(g, [("s", "t"), ("s2", "t2")])
    hat_inst = UnicastInstance(smap.structured, inst.sessions)
    hat_code = random_code(hat_inst, 257, 12)
    lifted = lift_code(smap, inst, hat_code)
    vec_hat = propagate(hat_inst, hat_code)
    vec_orig = propagate(inst, lifted)
    for eid, hid in smap.edge_map.items():
        assert vec_orig[eid] == vec_hat[hid], eid


def test_precoding_matrix_stacks_source_rows():
    inst = chain_instance()
    code = NetworkCode(5, {0: (3,), 1: (1,), 2: (2,), 3: (1,)})
    theta = precoding_matrix(inst, code, "s1")
    assert theta.tolist() == [[3]]
    with pytest.raises(CodingError):
        precoding_matrix(inst, code, "a")


def test_code_serialization_roundtrip():
    inst = chain_instance()
    code = random_code(inst, 257, 77)
    text = format_code(code)
    back = parse_code(text)
    assert back == code
    assert format_code(back) == text


def test_edge_basis_vectors_unit_at_source_edges():
    inst = chain_instance()
    code = random_code(inst, 7, 0)
    vec = edge_basis_vectors(inst, code)
    assert vec[0] == (1, 0) and vec[2] == (0, 1)
