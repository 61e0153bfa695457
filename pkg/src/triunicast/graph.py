"""Directed acyclic multigraphs with integer capacities, plus the path and
flow machinery used by the coding schemes.

Edge ids are stable: subgraph operations keep the original ids, so a network
code assigned on a subgraph maps directly onto the parent graph.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence


class GraphError(Exception):
    pass


class CycleError(GraphError):
    pass


@dataclass(frozen=True)
class Edge:
    id: int
    tail: str
    head: str
    cap: int = 1


class Dag:
    """Directed acyclic multigraph. Capacities are positive integers."""

    def __init__(self):
        self._nodes: dict[str, None] = {}
        self._edges: dict[int, Edge] = {}
        self._out: dict[str, list[int]] = {}
        self._in: dict[str, list[int]] = {}
        self._next_id = 0

    # -- construction ----------------------------------------------------------

    def add_node(self, name: str) -> str:
        if name not in self._nodes:
            self._nodes[name] = None
            self._out[name] = []
            self._in[name] = []
        return name

    def add_edge(self, tail: str, head: str, cap: int = 1, eid: Optional[int] = None) -> Edge:
        if cap < 1:
            raise GraphError(f"capacity must be >= 1, got {cap}")
        if tail == head:
            raise GraphError(f"self-loop at {tail!r}")
        self.add_node(tail)
        self.add_node(head)
        if eid is None:
            eid = self._next_id
        elif eid in self._edges:
            raise GraphError(f"duplicate edge id {eid}")
        self._next_id = max(self._next_id, eid + 1)
        e = Edge(eid, tail, head, cap)
        self._edges[eid] = e
        self._out[tail].append(eid)
        self._in[head].append(eid)
        return e

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[str, str] | tuple[str, str, int]]) -> "Dag":
        g = cls()
        for spec in edges:
            if len(spec) == 2:
                g.add_edge(spec[0], spec[1])
            else:
                g.add_edge(spec[0], spec[1], spec[2])
        g.topo_order()  # validates acyclicity
        return g

    def copy(self) -> "Dag":
        g = Dag()
        for n in self._nodes:
            g.add_node(n)
        for e in self.edges():
            g.add_edge(e.tail, e.head, e.cap, eid=e.id)
        return g

    def without_edges(self, ids: Iterable[int]) -> "Dag":
        drop = set(ids)
        g = Dag()
        for n in self._nodes:
            g.add_node(n)
        for e in self.edges():
            if e.id not in drop:
                g.add_edge(e.tail, e.head, e.cap, eid=e.id)
        return g

    def restricted_to(self, ids: Iterable[int]) -> "Dag":
        keep = set(ids)
        g = Dag()
        for n in self._nodes:
            g.add_node(n)
        for e in self.edges():
            if e.id in keep:
                g.add_edge(e.tail, e.head, e.cap, eid=e.id)
        return g

    # -- queries ---------------------------------------------------------------

    @property
    def nodes(self) -> list[str]:
        return list(self._nodes)

    def has_node(self, name: str) -> bool:
        return name in self._nodes

    def edges(self) -> list[Edge]:
        return [self._edges[i] for i in sorted(self._edges)]

    def edge(self, eid: int) -> Edge:
        return self._edges[eid]

    def has_edge(self, eid: int) -> bool:
        return eid in self._edges

    def num_edges(self) -> int:
        return len(self._edges)

    def out_edges(self, v: str) -> list[Edge]:
        return [self._edges[i] for i in sorted(self._out.get(v, []))]

    def in_edges(self, v: str) -> list[Edge]:
        return [self._edges[i] for i in sorted(self._in.get(v, []))]

    def out_degree(self, v: str) -> int:
        return len(self._out.get(v, []))

    def in_degree(self, v: str) -> int:
        return len(self._in.get(v, []))

    def topo_order(self) -> list[str]:
        indeg = {n: len(self._in[n]) for n in self._nodes}
        ready = sorted(n for n, d in indeg.items() if d == 0)
        order = []
        while ready:
            n = ready.pop(0)
            order.append(n)
            added = []
            for eid in self._out[n]:
                h = self._edges[eid].head
                indeg[h] -= 1
                if indeg[h] == 0:
                    added.append(h)
            if added:
                ready = sorted(ready + added)
        if len(order) != len(self._nodes):
            raise CycleError("graph contains a cycle")
        return order

    def topo_edges(self) -> list[Edge]:
        """Edges ordered by (topological position of tail, edge id)."""
        pos = {n: i for i, n in enumerate(self.topo_order())}
        return sorted(self.edges(), key=lambda e: (pos[e.tail], e.id))

    def reachable_from(self, start: str, ignore: Optional[set[int]] = None) -> set[str]:
        ignore = ignore or set()
        seen = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for e in self.out_edges(v):
                if e.id in ignore:
                    continue
                if e.head not in seen:
                    seen.add(e.head)
                    stack.append(e.head)
        return seen

    def reaching_to(self, target: str) -> set[str]:
        seen = {target}
        stack = [target]
        while stack:
            v = stack.pop()
            for e in self.in_edges(v):
                if e.tail not in seen:
                    seen.add(e.tail)
                    stack.append(e.tail)
        return seen

    def is_unit_capacity(self) -> bool:
        return all(e.cap == 1 for e in self._edges.values())

    def __repr__(self) -> str:
        return f"Dag({len(self._nodes)} nodes, {len(self._edges)} edges)"


@dataclass(frozen=True)
class Path:
    """A tail-to-head chain of edges."""

    edges: tuple[Edge, ...]

    def __post_init__(self):
        for a, b in zip(self.edges, self.edges[1:]):
            if a.head != b.tail:
                raise GraphError(f"broken chain: {a} then {b}")

    @property
    def source(self) -> str:
        return self.edges[0].tail

    @property
    def target(self) -> str:
        return self.edges[-1].head

    def edge_ids(self) -> tuple[int, ...]:
        return tuple(e.id for e in self.edges)

    def nodes(self) -> list[str]:
        return [self.edges[0].tail] + [e.head for e in self.edges]

    def internal_nodes(self) -> list[str]:
        return [e.head for e in self.edges[:-1]]

    def index_of(self, eid: int) -> int:
        for i, e in enumerate(self.edges):
            if e.id == eid:
                return i
        raise KeyError(eid)

    def __contains__(self, eid: int) -> bool:
        return any(e.id == eid for e in self.edges)

    def __len__(self) -> int:
        return len(self.edges)


def paths_edge_disjoint(paths: Sequence[Path]) -> bool:
    seen: set[int] = set()
    for p in paths:
        for e in p.edges:
            if e.id in seen:
                return False
            seen.add(e.id)
    return True


def paths_vertex_disjoint(paths: Sequence[Path]) -> bool:
    """Internally vertex disjoint (shared endpoints are allowed)."""
    seen: set[str] = set()
    for p in paths:
        for v in p.internal_nodes():
            if v in seen:
                return False
            seen.add(v)
    return True


@dataclass(frozen=True)
class OverlapSegment:
    """A maximal run of edges shared by two paths."""

    edges: tuple[Edge, ...]

    @property
    def first(self) -> Edge:
        return self.edges[0]

    @property
    def last(self) -> Edge:
        return self.edges[-1]

    def edge_ids(self) -> tuple[int, ...]:
        return tuple(e.id for e in self.edges)


# -- flows ---------------------------------------------------------------------


def max_flow(g: Dag, s: str, t: str) -> int:
    """Value of a maximum s-t flow (integer capacities, parallel edges ok)."""
    if s == t:
        raise GraphError("source equals target")
    if not g.has_node(s) or not g.has_node(t):
        return 0
    flow = {e.id: 0 for e in g.edges()}
    total = 0
    while True:
        # BFS over residual graph; parent[node] = (edge id, forward?)
        parent: dict[str, tuple[int, bool]] = {}
        seen = {s}
        queue = [s]
        while queue and t not in seen:
            v = queue.pop(0)
            for e in g.out_edges(v):
                if e.head not in seen and flow[e.id] < e.cap:
                    seen.add(e.head)
                    parent[e.head] = (e.id, True)
                    queue.append(e.head)
            for e in g.in_edges(v):
                if e.tail not in seen and flow[e.id] > 0:
                    seen.add(e.tail)
                    parent[e.tail] = (e.id, False)
                    queue.append(e.tail)
        if t not in seen:
            return total
        # bottleneck along the augmenting path
        path = []
        v = t
        while v != s:
            eid, fwd = parent[v]
            e = g.edge(eid)
            path.append((eid, fwd))
            v = e.tail if fwd else e.head
        aug = min((g.edge(eid).cap - flow[eid]) if fwd else flow[eid] for eid, fwd in path)
        for eid, fwd in path:
            flow[eid] += aug if fwd else -aug
        total += aug


def _flow_assignment(g: Dag, s: str, t: str) -> tuple[int, dict[int, int]]:
    """Max flow together with the per-edge flow values."""
    flow = {e.id: 0 for e in g.edges()}
    total = 0
    while True:
        parent: dict[str, tuple[int, bool]] = {}
        seen = {s}
        queue = [s]
        while queue and t not in seen:
            v = queue.pop(0)
            for e in g.out_edges(v):
                if e.head not in seen and flow[e.id] < e.cap:
                    seen.add(e.head)
                    parent[e.head] = (e.id, True)
                    queue.append(e.head)
            for e in g.in_edges(v):
                if e.tail not in seen and flow[e.id] > 0:
                    seen.add(e.tail)
                    parent[e.tail] = (e.id, False)
                    queue.append(e.tail)
        if t not in seen:
            return total, flow
        path = []
        v = t
        while v != s:
            eid, fwd = parent[v]
            e = g.edge(eid)
            path.append((eid, fwd))
            v = e.tail if fwd else e.head
        aug = min((g.edge(eid).cap - flow[eid]) if fwd else flow[eid] for eid, fwd in path)
        for eid, fwd in path:
            flow[eid] += aug if fwd else -aug
        total += aug


def edge_disjoint_paths(g: Dag, s: str, t: str, k: int) -> Optional[list[Path]]:
    """k pairwise edge-disjoint s-t paths via flow decomposition, or None.

    Requires unit capacities (split higher capacities into parallel edges
    first); that is the only setting in which flow decomposition yields
    genuinely edge-disjoint paths.
    """
    if not g.is_unit_capacity():
        raise GraphError("edge_disjoint_paths requires unit capacities")
    if k < 0:
        raise GraphError("k must be nonnegative")
    if k == 0:
        return []
    value, flow = _flow_assignment(g, s, t)
    if value < k:
        return None
    paths = []
    for _ in range(k):
        chain = []
        v = s
        while v != t:
            nxt = None
            for e in g.out_edges(v):
                if flow[e.id] > 0:
                    nxt = e
                    break
            if nxt is None:  # cannot happen for a valid flow
                raise GraphError("flow decomposition failed")
            flow[nxt.id] -= 1
            chain.append(nxt)
            v = nxt.head
        paths.append(Path(tuple(chain)))
    assert paths_edge_disjoint(paths)
    return paths


def cut_value(g: Dag, node_set: Iterable[str]) -> int:
    """Total capacity of edges leaving the node set."""
    s = set(node_set)
    if not s:
        raise GraphError("node set must be nonempty")
    return sum(e.cap for e in g.edges() if e.tail in s and e.head not in s)


# -- overlap segments ----------------------------------------------------------


def overlap_segments(p1: Path, p2: Path) -> list[OverlapSegment]:
    """All maximal runs of edges shared by p1 and p2, ordered along p1.

    On a DAG, shared edges that are consecutive along one path are
    necessarily consecutive along the other, so grouping along p1 is enough.
    """
    shared = set(p1.edge_ids()) & set(p2.edge_ids())
    segments = []
    run: list[Edge] = []
    for e in p1.edges:
        if e.id in shared:
            run.append(e)
        elif run:
            segments.append(OverlapSegment(tuple(run)))
            run = []
    if run:
        segments.append(OverlapSegment(tuple(run)))
    return segments


def all_overlap_segments(p: Path, others: Sequence[Path]) -> list[tuple[OverlapSegment, int]]:
    """Overlap segments of p with each path in others, ordered along p."""
    found = []
    for j, q in enumerate(others):
        for seg in overlap_segments(p, q):
            found.append((seg, j))
    found.sort(key=lambda item: (p.index_of(item[0].last.id), p.index_of(item[0].first.id), item[1]))
    return found


def last_overlap_segment(p: Path, others: Sequence[Path]) -> Optional[tuple[OverlapSegment, int]]:
    """The overlap segment of p (with any path in others) whose last edge is
    latest along p, together with the index of the hosting path."""
    found = all_overlap_segments(p, others)
    return found[-1] if found else None


# -- minimization ---------------------------------------------------------------


def minimize(g: Dag, sessions: Sequence[tuple[str, str]], target: Optional[Sequence[int]] = None) -> Dag:
    """Remove every edge whose removal keeps each session's max-flow at or
    above the target vector (default: the current connectivity).

    Single greedy pass in reverse topological order; once an edge survives,
    later removals cannot make it removable, so one pass reaches a fixpoint.
    """
    if target is None:
        target = [max_flow(g, s, t) for s, t in sessions]
    target = list(target)
    current = g.copy()
    for e in reversed(current.topo_edges()):
        trial = current.without_edges([e.id])
        if all(max_flow(trial, s, t) >= want for (s, t), want in zip(sessions, target)):
            current = trial
    return current


# -- structuring ----------------------------------------------------------------


@dataclass
class StructureMap:
    """Correspondence between a graph and its degree-3 structured version."""

    original: Dag
    structured: Dag
    edge_map: dict[int, int]  # original edge id -> structured edge id
    gadget_edges: dict[str, list[int]] = field(default_factory=dict)  # node -> internal edge ids
    gadget_order: dict[str, list[int]] = field(default_factory=dict)  # node -> topo order of internals

    def image(self, eid: int) -> int:
        return self.edge_map[eid]

    def image_path(self, p: Path) -> list[int]:
        return [self.edge_map[e.id] for e in p.edges]


def structure(g: Dag, sessions: Sequence[tuple[str, str]]) -> StructureMap:
    """Equivalent graph in which every internal node has total degree <= 3.

    Each high-degree internal node becomes a grid of two-node crosspoints:
    entry i feeds row i, column j drains to exit j, and a cell routes
    left->right, left->down or top->down through two separate nodes.  Any
    in/out matching is then routable on vertex-disjoint cell nodes, which
    preserves every session's max-flow and turns edge-disjoint paths of a
    session into vertex-disjoint ones.
    """
    if not g.is_unit_capacity():
        raise GraphError("structure requires unit capacities")
    endpoints = set()
    for s, t in sessions:
        endpoints.add(s)
        endpoints.add(t)

    # Drop edges that lie on no source-to-terminal path; they carry nothing,
    # and pruning them guarantees surviving internal nodes have both in- and
    # out-edges (so the gadget below applies).
    original = g
    useful: set[int] = set()
    for s, t in sessions:
        fwd = g.reachable_from(s)
        bwd = g.reaching_to(t)
        for e in g.edges():
            if e.tail in fwd and e.head in bwd:
                useful.add(e.id)
    g = g.restricted_to(useful)

    hat = Dag()
    entry: dict[tuple[str, int], str] = {}  # (node, in-edge id) -> entry node
    exit_: dict[tuple[str, int], str] = {}  # (node, out-edge id) -> exit node
    gadget_edges: dict[str, list[int]] = {}
    gadget_order: dict[str, list[int]] = {}

    for v in g.topo_order():
        ins = g.in_edges(v)
        outs = g.out_edges(v)
        expand = v not in endpoints and ins and outs and len(ins) + len(outs) > 3
        if not expand:
            hat.add_node(v)
            for e in ins:
                entry[(v, e.id)] = v
            for e in outs:
                exit_[(v, e.id)] = v
            continue
        m, n = len(ins), len(outs)
        internal: list[int] = []
        n1 = [[f"{v}.r{i}c{j}a" for j in range(n)] for i in range(m)]
        n2 = [[f"{v}.r{i}c{j}b" for j in range(n)] for i in range(m)]
        for i in range(m):
            for j in range(n):
                hat.add_node(n1[i][j])
                hat.add_node(n2[i][j])
        for i in range(m):
            entry[(v, ins[i].id)] = n1[i][0]
            for j in range(n):
                internal.append(hat.add_edge(n1[i][j], n2[i][j]).id)  # turn down
                if j + 1 < n:
                    internal.append(hat.add_edge(n1[i][j], n1[i][j + 1]).id)  # continue right
        for j in range(n):
            for i in range(m - 1):
                internal.append(hat.add_edge(n2[i][j], n2[i + 1][j]).id)  # continue down
            exit_[(v, outs[j].id)] = n2[m - 1][j]
        gadget_edges[v] = internal
        gadget_order[v] = internal  # added in a valid topological order

    edge_map = {}
    for e in g.edges():
        ne = hat.add_edge(exit_[(e.tail, e.id)], entry[(e.head, e.id)])
        edge_map[e.id] = ne.id

    smap = StructureMap(original, hat, edge_map, gadget_edges, gadget_order)
    return smap
