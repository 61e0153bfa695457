"""Generators for the known-infeasible network families and their
certification hooks.

Two families are certified by an explicit violated cut (demand across a
node set exceeds its capacity, which no code can beat); the other two need
the exhaustive linear-code search because their cut bounds are loose.

The figure topologies are reconstructions: they realize the connectivity
levels, the stated cuts, and (for the [2 3] instance) the functional
dependency chain Y11 -> Y12 -> Y21 -> Y22 with relay copies feeding each
terminal, but edge-level details beyond those properties are our choice.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

from .graph import Dag, cut_value
from .instance import Session, UnicastInstance, connectivity
from .verify import (
    DEFAULT_COEFFICIENT_BUDGET,
    BruteForceResult,
    brute_force_linear_feasibility,
)


class FamilyId(enum.Enum):
    FIG222 = "fig222"
    FIG113 = "fig113"
    FIG23_RATE21 = "fig23"
    COROLLARY232 = "corollary232"


def generate(family: FamilyId) -> UnicastInstance:
    if family is FamilyId.FIG222:
        g = Dag()
        for i in (1, 2, 3):
            g.add_edge(f"s{i}", "v1")
            g.add_edge(f"s{i}", "v2")
        g.add_edge("v1", "w1")
        g.add_edge("v2", "w2")
        for i in (1, 2, 3):
            g.add_edge("w1", f"t{i}")
            g.add_edge("w2", f"t{i}")
        return UnicastInstance(g, [Session(f"s{i}", f"t{i}") for i in (1, 2, 3)])

    if family is FamilyId.FIG113:
        g = Dag()
        g.add_edge("s1", "v1")
        g.add_edge("s2", "v1")
        g.add_edge("v1", "w")
        g.add_edge("w", "t1")
        g.add_edge("w", "t2")
        for j in (1, 2, 3):
            g.add_edge("s3", f"x{j}")
            g.add_edge(f"x{j}", "t3")
        return UnicastInstance(g, [Session(f"s{i}", f"t{i}") for i in (1, 2, 3)])

    if family in (FamilyId.FIG23_RATE21, FamilyId.COROLLARY232):
        g = _two_three_graph()
        if family is FamilyId.FIG23_RATE21:
            return UnicastInstance(g, [Session("s1", "t1", rate=2), Session("s2", "t2", rate=1)])
        # two unit-rate sessions collocated at s1/t1 plus the s2 session
        return UnicastInstance(
            g, [Session("s1", "t1"), Session("s2", "t2"), Session("s1", "t1")]
        )

    raise ValueError(f"unknown family {family!r}")


def _two_three_graph() -> Dag:
    """[2 3] connectivity with the relay-chain dependency structure.

    Signal names: v0's output is Y11, v1's is Y12, the direct s1 edge into
    v2 is Y20, v2's output is Y21 and v3's is Y22.  Each u-node copies one
    signal to its two consumers.
    """
    g = Dag()
    g.add_edge("s1", "v0")   # feeds Y11
    g.add_edge("s2", "v0")
    g.add_edge("v0", "u0")   # Y11
    g.add_edge("u0", "v1")
    g.add_edge("u0", "t2")
    g.add_edge("s2", "v1")
    g.add_edge("v1", "u1")   # Y12
    g.add_edge("u1", "v2")
    g.add_edge("u1", "t1")
    g.add_edge("s1", "v2")   # Y20
    g.add_edge("v2", "u2")   # Y21
    g.add_edge("u2", "v3")
    g.add_edge("u2", "t2")
    g.add_edge("s2", "v3")
    g.add_edge("v3", "u3")   # Y22
    g.add_edge("u3", "t1")
    g.add_edge("u3", "t2")
    return g


@dataclass
class CutCertificate:
    family: FamilyId
    node_set: frozenset[str]
    value: int
    demand: int

    @property
    def violated(self) -> bool:
        return self.demand > self.value

    def __str__(self) -> str:
        nodes = ", ".join(sorted(self.node_set))
        return (
            f"{self.family.value}: cut {{{nodes}}} has value {self.value}"
            f" but must support total rate {self.demand}"
        )


@dataclass
class BruteForceCertificate:
    family: FamilyId
    result: BruteForceResult

    @property
    def violated(self) -> bool:
        return not self.result.feasible

    def __str__(self) -> str:
        return f"{self.family.value}: {self.result}"


CUT_SETS = {
    FamilyId.FIG222: frozenset({"s1", "s2", "s3", "v1", "v2"}),
    FamilyId.FIG113: frozenset({"s1", "s2", "v1"}),
}


def certify(
    family: FamilyId,
    p: int = 2,
    T: int = 1,
    budget: int = DEFAULT_COEFFICIENT_BUDGET,
):
    """Certificate that the family's instance cannot support its rates.

    Cut families return a CutCertificate (independent of p and T); the
    [2 3]-based families run the exhaustive linear-code search at (p, T).
    """
    inst = generate(family)
    if family in CUT_SETS:
        node_set = CUT_SETS[family]
        value = cut_value(inst.dag, node_set)
        demand = sum(
            s.rate
            for s in inst.sessions
            if s.source in node_set and s.terminal not in node_set
        )
        cert = CutCertificate(family, node_set, value, demand)
        assert cert.violated
        return cert
    result = brute_force_linear_feasibility(inst, p, T, budget=budget)
    return BruteForceCertificate(family, result)
