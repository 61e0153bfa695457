"""Shared instance fixtures: hand-built minimal structured networks for each
scheme, plus seeded random generators used by the acceptance battery."""

import random

from triunicast.graph import Dag, max_flow, minimize, structure
from triunicast.instance import Session, UnicastInstance, connectivity


def uneven_full_overlap(m: int = 1) -> UnicastInstance:
    """Rates {1, m}: the direct path crosses every one of the m+1 carrier
    paths once, in order.  Connectivity [1, m+1]."""
    g = Dag()
    prev = None
    for i in range(m + 1):
        g.add_edge("s2", f"a{i}")
        g.add_edge(f"a{i}", f"b{i}")
        g.add_edge(f"b{i}", "t2")
        if prev is None:
            g.add_edge("s1", f"a{i}")
        else:
            g.add_edge(prev, f"a{i}")
        prev = f"b{i}"
    g.add_edge(prev, "t1")
    return UnicastInstance(g, [Session("s1", "t1", 1), Session("s2", "t2", m)])


def uneven_partial_overlap() -> UnicastInstance:
    """Rates {1, 2}, connectivity [1, 3]; one carrier path is overlap-free."""
    g = Dag()
    # two crossed carrier paths
    prev = None
    for i in range(2):
        g.add_edge("s2", f"a{i}")
        g.add_edge(f"a{i}", f"b{i}")
        g.add_edge(f"b{i}", "t2")
        if prev is None:
            g.add_edge("s1", f"a{i}")
        else:
            g.add_edge(prev, f"a{i}")
        prev = f"b{i}"
    g.add_edge(prev, "t1")
    # free carrier path
    g.add_edge("s2", "f0")
    g.add_edge("f0", "t2")
    return UnicastInstance(g, [Session("s1", "t1", 1), Session("s2", "t2", 2)])


def chain_133() -> UnicastInstance:
    """[1 3 3]: the single session-1 path crosses all three carrier paths of
    session 2, then all three of session 3."""
    g = Dag()
    prev = "s1"
    for owner, src, dst in (("a", "s2", "t2"), ("c", "s3", "t3")):
        for i in range(3):
            node_in, node_out = f"{owner}{i}", f"{owner}{i}x"
            g.add_edge(src, node_in)
            g.add_edge(node_in, node_out)
            g.add_edge(node_out, dst)
            g.add_edge(prev, node_in)
            prev = node_out
    g.add_edge(prev, "t1")
    return UnicastInstance(
        g, [Session("s1", "t1"), Session("s2", "t2"), Session("s3", "t3")]
    )


def two_four_case1() -> UnicastInstance:
    """Rates {2, 1}, connectivity [2 4]; the red path crosses carriers 1 and
    3, the blue path crosses carriers 2 and 4, so the last red and blue
    segments sit on different carrier paths."""
    g = Dag()
    for i in range(4):
        g.add_edge("s2", f"a{i}")
        g.add_edge(f"a{i}", f"b{i}")
        g.add_edge(f"b{i}", "t2")
    # red path: crosses carriers 0 then 2
    g.add_edge("s1", "a0")
    g.add_edge("b0", "a2")
    g.add_edge("b2", "t1")
    # blue path: crosses carriers 1 then 3
    g.add_edge("s1", "a1")
    g.add_edge("b1", "a3")
    g.add_edge("b3", "t1")
    return UnicastInstance(g, [Session("s1", "t1", 2), Session("s2", "t2", 1)])


def two_four_case2() -> UnicastInstance:
    """Rates {2, 1}, connectivity [2 4]; the last red and blue segments both
    sit on carrier 0, blue downstream of red, and the blue path also crosses
    carrier 1 upstream."""
    g = Dag()
    # carrier 0 passes through a red segment then a blue segment
    g.add_edge("s2", "r0")       # 0
    g.add_edge("r0", "r0x")      # 1  red segment (on carrier 0)
    g.add_edge("r0x", "q0")      # 2
    g.add_edge("q0", "q0x")      # 3  blue segment (on carrier 0, last)
    g.add_edge("q0x", "t2")      # 4
    # carrier 1 with an upstream blue segment
    g.add_edge("s2", "q1")       # 5
    g.add_edge("q1", "q1x")      # 6  blue segment (on carrier 1)
    g.add_edge("q1x", "t2")      # 7
    # carriers 2 and 3 with red segments (so no overlap-free carrier)
    g.add_edge("s2", "r2")       # 8
    g.add_edge("r2", "r2x")      # 9  red segment
    g.add_edge("r2x", "t2")      # 10
    g.add_edge("s2", "r3")       # 11
    g.add_edge("r3", "r3x")      # 12 red segment
    g.add_edge("r3x", "t2")      # 13
    # red path: s1 -> carrier2 seg -> carrier3 seg -> carrier0 red seg -> t1
    g.add_edge("s1", "r2")       # 14
    g.add_edge("r2x", "r3")      # 15
    g.add_edge("r3x", "r0")      # 16
    g.add_edge("r0x", "t1")      # 17
    # blue path: s1 -> carrier1 seg -> carrier0 blue seg -> t1
    g.add_edge("s1", "q1")       # 18
    g.add_edge("q1x", "q0")      # 19
    g.add_edge("q0x", "t1")      # 20
    return UnicastInstance(g, [Session("s1", "t1", 2), Session("s2", "t2", 1)])


def one_two_five_case1() -> UnicastInstance:
    """[1 2 5] where the direct path overlaps a session-2 carrier path."""
    g = Dag()
    # session 2: two carrier paths
    g.add_edge("s2", "m0")
    g.add_edge("m0", "m0x")   # shared with the direct path
    g.add_edge("m0x", "t2")
    g.add_edge("s2", "m1")
    g.add_edge("m1", "t2")
    # direct path crosses m0->m0x then one session-3 segment
    g.add_edge("s1", "m0")
    g.add_edge("m0x", "c0")
    g.add_edge("c0", "c0x")
    g.add_edge("c0x", "t1")
    # session 3: five carrier paths, the first crossing the direct path
    g.add_edge("s3", "c0")
    g.add_edge("c0x", "t3")
    for j in range(1, 5):
        g.add_edge("s3", f"c{j}")
        g.add_edge(f"c{j}", "t3")
    return UnicastInstance(
        g, [Session("s1", "t1"), Session("s2", "t2"), Session("s3", "t3")]
    )


def one_two_five_disconnected_cross() -> UnicastInstance:
    """[1 2 5] with no path between s1 and t2 in either direction: the
    direct path only meets session 3."""
    g = Dag()
    g.add_edge("s1", "c0")
    g.add_edge("c0", "c0x")
    g.add_edge("c0x", "t1")
    g.add_edge("s3", "c0")
    g.add_edge("c0x", "t3")
    for j in range(1, 5):
        g.add_edge("s3", f"c{j}")
        g.add_edge(f"c{j}", "t3")
    for i in range(2):
        g.add_edge("s2", f"m{i}")
        g.add_edge(f"m{i}", "t2")
    return UnicastInstance(
        g, [Session("s1", "t1"), Session("s2", "t2"), Session("s3", "t3")]
    )


def one_two_five_case2(variant: str = "b") -> UnicastInstance:
    """[1 2 5], the direct path disjoint from both session-2 carriers, with
    s1->t2 and s2->t1 connections riding two of the wide session's paths
    (in a minimal instance every cross-connection edge must serve some
    session's max-flow, so the wide paths thread the other sessions).

    variant "b": the s2->t1 thread joins the direct path downstream of where
    the s1->t2 thread leaves it.
    variant "c": the threads cross (the s2->t1 thread joins upstream).
    """
    g = Dag()
    # direct path
    g.add_edge("s1", "d1")
    g.add_edge("d1", "d2")
    g.add_edge("d2", "d3")
    g.add_edge("d3", "d4")
    g.add_edge("d4", "t1")
    # carriers: w-chain and x-chain
    g.add_edge("s2", "w1")
    g.add_edge("w1", "w2")
    g.add_edge("w2", "t2")
    g.add_edge("s2", "x1")
    g.add_edge("x1", "x2")
    g.add_edge("x2", "x3")
    g.add_edge("x3", "t2")
    # three clean wide paths
    for j in range(3):
        g.add_edge("s3", f"c{j}")
        g.add_edge(f"c{j}", "t3")
    if variant == "b":
        # wide thread A: shares d1->d2 then x2->x3 (creates s1 -> t2)
        g.add_edge("s3", "d1")
        g.add_edge("d2", "x2")
        g.add_edge("x3", "t3")
        # wide thread B: shares w1->w2 then d3->d4 (creates s2 -> t1)
        g.add_edge("s3", "w1")
        g.add_edge("w2", "d3")
        g.add_edge("d4", "t3")
    elif variant == "c":
        # wide thread A: shares d3->d4 then x2->x3 (s1 -> t2 leaves late)
        g.add_edge("s3", "d3")
        g.add_edge("d4", "x2")
        g.add_edge("x3", "t3")
        # wide thread B: shares w1->w2 then d1->d2 (s2 -> t1 joins early)
        g.add_edge("s3", "w1")
        g.add_edge("w2", "d1")
        g.add_edge("d2", "t3")
    else:
        raise ValueError(variant)
    return UnicastInstance(
        g, [Session("s1", "t1"), Session("s2", "t2"), Session("s3", "t3")]
    )


# -- seeded random minimal structured instances -------------------------------------


def random_class_instance(pattern: tuple[int, ...], seed: int) -> UnicastInstance:
    """Random minimal structured instance whose connectivity vector equals
    the pattern exactly (session order = pattern order).

    Starts from disjoint per-session path skeletons and fuses random edge
    pairs across sessions into shared segments, which preserves each
    session's max-flow while creating overlap; the result is normalized,
    structured, and pruned back to the exact pattern.
    """
    rng = random.Random(seed)
    attempt = 0
    while True:
        attempt += 1
        inst = _skeleton_with_fusions(pattern, rng)
        work = inst.normalized().separated().split_capacities()
        pairs = [(s.source, s.terminal) for s in work.sessions]
        conn = connectivity(work)
        if any(c < k for c, k in zip(conn, pattern)):
            continue
        smap = structure(work.dag, pairs)
        dag = minimize(smap.structured, pairs, target=list(pattern))
        out = UnicastInstance(dag, work.sessions)
        if connectivity(out) == tuple(pattern):
            return out
        if attempt > 50:
            raise RuntimeError(f"could not generate pattern {pattern} from seed {seed}")


def _skeleton_with_fusions(pattern, rng) -> UnicastInstance:
    g = Dag()
    sessions = []
    paths = []  # (session index, list of nodes)
    for i, k in enumerate(pattern):
        s, t = f"s{i}", f"t{i}"
        for j in range(k):
            length = rng.randint(1, 3)
            nodes = [s] + [f"n{i}_{j}_{h}" for h in range(length)] + [t]
            for a, b in zip(nodes, nodes[1:]):
                g.add_edge(a, b)
            paths.append((i, nodes))
        sessions.append(Session(s, t))
    edges = [e for e in g.edges()]
    for _ in range(rng.randint(1, 5)):
        e1, e2 = rng.sample(edges, 2)
        if e1.tail[0] == "s" or e2.tail[0] == "s":
            continue
        if e1.head[0] == "t" or e2.head[0] == "t":
            continue
        if e1.tail == e2.tail or e1.head == e2.head:
            continue
        # fuse: both flows ride a fresh shared segment
        mid_a, mid_b = f"f{e1.id}_{e2.id}a", f"f{e1.id}_{e2.id}b"
        try:
            h = g.copy()
            h_edges = {e.id for e in h.edges()}
            h = h.without_edges([e1.id, e2.id])
            h.add_edge(e1.tail, mid_a)
            h.add_edge(e2.tail, mid_a)
            h.add_edge(mid_a, mid_b)
            h.add_edge(mid_b, e1.head)
            h.add_edge(mid_b, e2.head)
            h.topo_order()
        except Exception:
            continue
        g = h
        edges = [e for e in g.edges()]
    return UnicastInstance(g, sessions)
