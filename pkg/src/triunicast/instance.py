"""Multiple-unicast problem instances and their classification by
connectivity level.

An instance is a capacitated DAG plus an ordered list of sessions
(source, terminal, rate).  The connectivity level is the vector of
per-session max-flow values; for three unit-rate sessions the sorted vector
determines which constructive scheme (if any) applies.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Optional, Sequence

from .graph import CycleError, Dag, GraphError, max_flow


@dataclass(frozen=True)
class Session:
    source: str
    terminal: str
    rate: int = 1

    def __post_init__(self):
        if self.rate < 1:
            raise GraphError(f"session rate must be >= 1, got {self.rate}")
        if self.source == self.terminal:
            raise GraphError("session source equals terminal")


@dataclass
class UnicastInstance:
    dag: Dag
    sessions: list[Session]

    def __post_init__(self):
        self.dag.topo_order()  # validates acyclicity
        for s in self.sessions:
            if not self.dag.has_node(s.source) or not self.dag.has_node(s.terminal):
                raise GraphError(f"session endpoint missing from graph: {s}")

    # -- symbol bookkeeping ----------------------------------------------------

    def symbol_offsets(self) -> list[int]:
        """Start of each session's block in the stacked message vector."""
        offs, acc = [], 0
        for s in self.sessions:
            offs.append(acc)
            acc += s.rate
        return offs

    def total_symbols(self) -> int:
        return sum(s.rate for s in self.sessions)

    def observed_sessions(self, node: str) -> list[int]:
        """Session indices whose source is this node (collocation allowed)."""
        return [i for i, s in enumerate(self.sessions) if s.source == node]

    def source_nodes(self) -> list[str]:
        seen = []
        for s in self.sessions:
            if s.source not in seen:
                seen.append(s.source)
        return seen

    def is_wrapped(self) -> bool:
        return all(
            self.dag.in_degree(s.source) == 0 and self.dag.out_degree(s.terminal) == 0
            for s in self.sessions
        )

    # -- normalization ---------------------------------------------------------

    def normalized(self) -> "UnicastInstance":
        """Wrap sources with in-edges / terminals with out-edges behind
        artificial endpoint nodes, preserving each session's max-flow."""
        if self.is_wrapped():
            return self
        g = self.dag.copy()
        new_sessions = []
        for i, s in enumerate(self.sessions):
            src, dst = s.source, s.terminal
            if g.in_degree(src) > 0:
                flow = max(max_flow(self.dag, s.source, s.terminal), s.rate)
                wrapped = f"{src}~src{i}"
                g.add_edge(wrapped, src, cap=flow)
                src = wrapped
            if g.out_degree(dst) > 0:
                flow = max(max_flow(self.dag, s.source, s.terminal), s.rate)
                wrapped = f"{dst}~ter{i}"
                g.add_edge(dst, wrapped, cap=flow)
                dst = wrapped
            new_sessions.append(Session(src, dst, s.rate))
        return UnicastInstance(g, new_sessions)

    def separated(self) -> "UnicastInstance":
        """Give every session private endpoint nodes.

        Collocated sources (or terminals) are wrapped behind per-session
        artificial nodes with connectivity-preserving capacity, so that
        construction schemes can treat session endpoints as distinct."""
        usage: dict[str, int] = {}
        for s in self.sessions:
            usage[s.source] = usage.get(s.source, 0) + 1
            usage[s.terminal] = usage.get(s.terminal, 0) + 1
        if all(v == 1 for v in usage.values()):
            return self
        g = self.dag.copy()
        new_sessions = []
        for i, s in enumerate(self.sessions):
            src, dst = s.source, s.terminal
            flow = max(max_flow(self.dag, s.source, s.terminal), s.rate)
            if usage[src] > 1:
                wrapped = f"{src}~src{i}"
                g.add_edge(wrapped, src, cap=flow)
                src = wrapped
            if usage[dst] > 1:
                wrapped = f"{dst}~ter{i}"
                g.add_edge(dst, wrapped, cap=flow)
                dst = wrapped
            new_sessions.append(Session(src, dst, s.rate))
        return UnicastInstance(g, new_sessions)

    def split_capacities(self) -> "UnicastInstance":
        """Replace every capacity-c edge by c parallel unit edges."""
        if self.dag.is_unit_capacity():
            return self
        g = Dag()
        for n in self.dag.nodes:
            g.add_node(n)
        for e in self.dag.edges():
            for _ in range(e.cap):
                g.add_edge(e.tail, e.head, 1)
        return UnicastInstance(g, list(self.sessions))


def connectivity(inst: UnicastInstance) -> tuple[int, ...]:
    """Per-session max-flow vector."""
    return tuple(max_flow(inst.dag, s.source, s.terminal) for s in inst.sessions)


def time_expand(inst: UnicastInstance, T: int) -> tuple["UnicastInstance", dict[int, list[int]]]:
    """Replace each edge by T parallel copies and multiply rates by T.

    Returns the expanded instance and the original-edge -> copies map.
    """
    if T < 1:
        raise GraphError("T must be >= 1")
    g = Dag()
    for n in inst.dag.nodes:
        g.add_node(n)
    copies: dict[int, list[int]] = {}
    for e in inst.dag.edges():
        copies[e.id] = [g.add_edge(e.tail, e.head, e.cap).id for _ in range(T)]
    sessions = [replace(s, rate=s.rate * T) for s in inst.sessions]
    return UnicastInstance(g, sessions), copies


# -- classification --------------------------------------------------------------


class Verdict(enum.Enum):
    FEASIBLE_ROUTING = "FeasibleRouting"
    FEASIBLE_133 = "Feasible133"
    FEASIBLE_224 = "Feasible224"
    FEASIBLE_125 = "Feasible125"
    KNOWN_INFEASIBLE_CLASS = "KnownInfeasibleClass"
    UNKNOWN_124 = "Unknown124"
    UNDETERMINED = "Undetermined"


@dataclass(frozen=True)
class Classification:
    verdict: Verdict
    connectivity: tuple[int, ...]
    sorted_connectivity: tuple[int, ...]
    order: tuple[int, ...]  # session indices sorted by ascending connectivity

    def __str__(self) -> str:
        vec = " ".join(str(k) for k in self.connectivity)
        return f"[{vec}] {self.verdict.value}"


def _dominates(vec: Sequence[int], base: Sequence[int]) -> bool:
    return all(v >= b for v, b in zip(vec, base))


def classify(inst: UnicastInstance) -> Classification:
    """Classify a three-session unit-rate instance by its connectivity level.

    The verdict depends only on the sorted connectivity vector.  Verdicts:

    * ``FeasibleRouting`` -- every component >= 3; vector routing suffices.
    * ``Feasible133`` / ``Feasible224`` / ``Feasible125`` -- the sorted vector
      dominates [1 3 3], [2 2 4] or [1 2 5]; the matching constructive scheme
      applies.  When several bases are dominated the cheapest scheme wins, in
      the order [1 3 3], [2 2 4], [1 2 5].
    * ``KnownInfeasibleClass`` -- the sorted vector is dominated by [2 2 3] or
      matches the [1 1 *] pattern.  These classes contain instances that
      provably cannot be supported; the verdict says nothing about this
      particular instance.
    * ``Unknown124`` -- exactly [1 2 4]; no scheme and no counterexample is
      known for this class.
    * ``Undetermined`` -- anything else.
    """
    if len(inst.sessions) != 3:
        raise GraphError(f"classification needs exactly 3 sessions, got {len(inst.sessions)}")
    if any(s.rate != 1 for s in inst.sessions):
        raise GraphError("classification needs unit-rate sessions")
    vec = connectivity(inst)
    order = tuple(sorted(range(3), key=lambda i: (vec[i], i)))
    k = tuple(vec[i] for i in order)

    if k[0] >= 3:
        verdict = Verdict.FEASIBLE_ROUTING
    elif _dominates(k, (1, 3, 3)):
        verdict = Verdict.FEASIBLE_133
    elif _dominates(k, (2, 2, 4)):
        verdict = Verdict.FEASIBLE_224
    elif _dominates(k, (1, 2, 5)):
        verdict = Verdict.FEASIBLE_125
    elif k == (1, 2, 4):
        verdict = Verdict.UNKNOWN_124
    elif _dominates((2, 2, 3), k) or (k[0] <= 1 and k[1] <= 1):
        verdict = Verdict.KNOWN_INFEASIBLE_CLASS
    else:
        verdict = Verdict.UNDETERMINED
    return Classification(verdict, vec, k, order)


# -- instance file format ---------------------------------------------------------
#
# Line-oriented text:
#
#     # comment
#     node a
#     edge tail head capacity
#     session source terminal rate
#
# Node lines are optional for nodes that appear in edges.  The parser reports
# errors with line numbers and rejects cycles, dangling session endpoints,
# and non-positive capacities or rates.


class InstanceParseError(Exception):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def parse_instance(text: str) -> UnicastInstance:
    g = Dag()
    sessions: list[Session] = []
    declared: set[str] = set()
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind = parts[0]
        if kind == "node":
            if len(parts) != 2:
                raise InstanceParseError(ln, "expected: node NAME")
            g.add_node(parts[1])
            declared.add(parts[1])
        elif kind == "edge":
            if len(parts) != 4:
                raise InstanceParseError(ln, "expected: edge TAIL HEAD CAPACITY")
            tail, head = parts[1], parts[2]
            try:
                cap = int(parts[3])
            except ValueError:
                raise InstanceParseError(ln, f"capacity is not an integer: {parts[3]!r}")
            if cap < 1:
                raise InstanceParseError(ln, f"capacity must be >= 1, got {cap}")
            try:
                g.add_edge(tail, head, cap)
            except GraphError as exc:
                raise InstanceParseError(ln, str(exc))
            declared.update((tail, head))
        elif kind == "session":
            if len(parts) != 4:
                raise InstanceParseError(ln, "expected: session SOURCE TERMINAL RATE")
            try:
                rate = int(parts[3])
            except ValueError:
                raise InstanceParseError(ln, f"rate is not an integer: {parts[3]!r}")
            if rate < 1:
                raise InstanceParseError(ln, f"rate must be >= 1, got {rate}")
            if parts[1] not in declared or parts[2] not in declared:
                missing = parts[1] if parts[1] not in declared else parts[2]
                raise InstanceParseError(ln, f"session endpoint {missing!r} is not a declared node")
            try:
                sessions.append(Session(parts[1], parts[2], rate))
            except GraphError as exc:
                raise InstanceParseError(ln, str(exc))
        else:
            raise InstanceParseError(ln, f"unknown directive {kind!r}")
    if not sessions:
        raise InstanceParseError(0, "no sessions declared")
    try:
        g.topo_order()
    except CycleError:
        raise InstanceParseError(0, "graph contains a cycle")
    return UnicastInstance(g, sessions)


def format_instance(inst: UnicastInstance) -> str:
    lines = []
    for n in inst.dag.nodes:
        lines.append(f"node {n}")
    for e in inst.dag.edges():
        lines.append(f"edge {e.tail} {e.head} {e.cap}")
    for s in inst.sessions:
        lines.append(f"session {s.source} {s.terminal} {s.rate}")
    return "\n".join(lines) + "\n"
