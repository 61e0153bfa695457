"""Linear network codes: local coefficient rows, global coding vectors,
transfer matrices, random coding, and the decoding-side linear algebra.

A code assigns one coefficient row per edge:

* source edge (tail is a session source): one coefficient per message symbol
  observed at the tail, so the stacked rows of a source's out-edges form its
  precoding matrix;
* other edges: one coefficient per in-edge of the tail, in edge-id order.

Global coding vectors live in the stacked message space of all sessions.
Transfer matrices can alternatively be taken over the source out-edge basis
(unit injection per source out-edge, ignoring precoding), which is what the
construction schemes reason about before choosing precoders.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .field import FieldMatrix, is_prime
from .graph import Dag, StructureMap
from .instance import UnicastInstance


class CodingError(Exception):
    pass


@dataclass
class NetworkCode:
    """Per-edge local coefficient rows over GF(p)."""

    p: int
    rows: dict[int, tuple[int, ...]]

    def __post_init__(self):
        if not is_prime(self.p):
            raise CodingError(f"modulus must be prime, got {self.p}")
        self.rows = {eid: tuple(int(c) % self.p for c in row) for eid, row in self.rows.items()}

    def row(self, eid: int) -> tuple[int, ...]:
        return self.rows[eid]

    def with_rows(self, updates: dict[int, Sequence[int]]) -> "NetworkCode":
        merged = dict(self.rows)
        for eid, row in updates.items():
            merged[eid] = tuple(int(c) % self.p for c in row)
        return NetworkCode(self.p, merged)

    def __eq__(self, other) -> bool:
        return isinstance(other, NetworkCode) and other.p == self.p and other.rows == self.rows


def expected_row_length(inst: UnicastInstance, eid: int) -> int:
    e = inst.dag.edge(eid)
    observed = inst.observed_sessions(e.tail)
    if observed:
        if inst.dag.in_degree(e.tail) > 0:
            raise CodingError(
                f"source node {e.tail!r} has in-edges; normalize the instance first"
            )
        return sum(inst.sessions[i].rate for i in observed)
    return inst.dag.in_degree(e.tail)


def check_complete(inst: UnicastInstance, code: NetworkCode) -> None:
    for e in inst.dag.edges():
        if e.id not in code.rows:
            raise CodingError(f"code is missing a coefficient row for edge {e.id} ({e.tail}->{e.head})")
        want = expected_row_length(inst, e.id)
        got = len(code.rows[e.id])
        if got != want:
            raise CodingError(
                f"edge {e.id} ({e.tail}->{e.head}): row length {got}, expected {want}"
            )


def random_code(inst: UnicastInstance, p: int, seed: int) -> NetworkCode:
    """Uniform independent local rows for every edge; deterministic per seed."""
    if p < 2 or not is_prime(p):
        raise CodingError(f"modulus must be a prime >= 2, got {p}")
    rng = random.Random(seed)
    rows = {}
    for e in inst.dag.edges():
        rows[e.id] = tuple(rng.randrange(p) for _ in range(expected_row_length(inst, e.id)))
    return NetworkCode(p, rows)


def routing_rows(inst: UnicastInstance, assignments: dict[int, int]) -> dict[int, tuple[int, ...]]:
    """One-hot rows: assignments maps edge id -> index to copy (symbol index
    at a source edge, in-edge position otherwise).  Unlisted edges get zero
    rows; useful for building pure routing codes."""
    rows = {}
    for e in inst.dag.edges():
        n = expected_row_length(inst, e.id)
        row = [0] * n
        if e.id in assignments:
            row[assignments[e.id]] = 1
        rows[e.id] = tuple(row)
    return rows


def zero_code(inst: UnicastInstance, p: int) -> NetworkCode:
    return NetworkCode(p, routing_rows(inst, {}))


def precoding_matrix(inst: UnicastInstance, code: NetworkCode, source: str) -> FieldMatrix:
    """Rows of the source's out-edges stacked in edge-id order."""
    if not inst.observed_sessions(source):
        raise CodingError(f"{source!r} is not a source node")
    rows = [code.row(e.id) for e in inst.dag.out_edges(source)]
    return FieldMatrix.from_rows(rows, code.p)


# -- propagation -----------------------------------------------------------------


def propagate(inst: UnicastInstance, code: NetworkCode) -> dict[int, tuple[int, ...]]:
    """Global coding vector of every edge in the stacked message space.

    Processed in topological order: a source edge's vector is its precoding
    row placed in the session block; any other edge's vector is its local row
    times the stacked vectors of its tail's in-edges.
    """
    check_complete(inst, code)
    p = code.p
    n = inst.total_symbols()
    offsets = inst.symbol_offsets()
    vec: dict[int, tuple[int, ...]] = {}
    for e in inst.dag.topo_edges():
        row = code.row(e.id)
        out = [0] * n
        observed = inst.observed_sessions(e.tail)
        if observed:
            k = 0
            for i in observed:
                for j in range(inst.sessions[i].rate):
                    out[offsets[i] + j] = row[k]
                    k += 1
        else:
            for coeff, e_in in zip(row, inst.dag.in_edges(e.tail)):
                if coeff:
                    src = vec[e_in.id]
                    for idx in range(n):
                        if src[idx]:
                            out[idx] = (out[idx] + coeff * src[idx]) % p
        vec[e.id] = tuple(out)
    return vec


def source_edge_columns(inst: UnicastInstance) -> list[tuple[str, int]]:
    """Column layout of the source out-edge basis: (source node, edge id)."""
    cols = []
    for s in inst.source_nodes():
        for e in inst.dag.out_edges(s):
            cols.append((s, e.id))
    return cols


def edge_basis_vectors(inst: UnicastInstance, code: NetworkCode) -> dict[int, tuple[int, ...]]:
    """Global vectors over the source out-edge basis (precoding ignored)."""
    check_complete(inst, code)
    p = code.p
    cols = source_edge_columns(inst)
    col_of = {eid: k for k, (_, eid) in enumerate(cols)}
    n = len(cols)
    vec: dict[int, tuple[int, ...]] = {}
    for e in inst.dag.topo_edges():
        out = [0] * n
        if e.id in col_of:
            out[col_of[e.id]] = 1
        elif not inst.observed_sessions(e.tail):
            row = code.row(e.id)
            for coeff, e_in in zip(row, inst.dag.in_edges(e.tail)):
                if coeff:
                    src = vec[e_in.id]
                    for idx in range(n):
                        if src[idx]:
                            out[idx] = (out[idx] + coeff * src[idx]) % p
        vec[e.id] = tuple(out)
    return vec


@dataclass
class TransferMatrix:
    """Stacked received vectors for a target edge set, with labelled column
    blocks (one per session in the symbol basis, one per source node in the
    source-edge basis)."""

    matrix: FieldMatrix
    blocks: list[tuple[str, int]]  # (label, width)
    target_edges: list[int]
    basis: str  # "symbol" or "source_edge"

    def block(self, index: int) -> FieldMatrix:
        start = sum(w for _, w in self.blocks[:index])
        width = self.blocks[index][1]
        return self.matrix.take_cols(range(start, start + width))

    def block_by_label(self, label: str) -> FieldMatrix:
        for i, (lab, _) in enumerate(self.blocks):
            if lab == label:
                return self.block(i)
        raise KeyError(label)

    def blocks_except(self, index: int) -> FieldMatrix:
        start = sum(w for _, w in self.blocks[:index])
        width = self.blocks[index][1]
        keep = [j for j in range(self.matrix.cols) if not start <= j < start + width]
        return self.matrix.take_cols(keep)


def _resolve_targets(inst: UnicastInstance, target) -> list[int]:
    if isinstance(target, str):
        return [e.id for e in inst.dag.in_edges(target)]
    return [int(t) for t in target]


def transfer_matrix(
    inst: UnicastInstance,
    code: NetworkCode,
    target,
    basis: str = "symbol",
    vectors: Optional[dict[int, tuple[int, ...]]] = None,
) -> TransferMatrix:
    """Transfer matrix to a terminal (by name) or an explicit edge list.

    ``basis="symbol"`` stacks the global coding vectors (precoding applied),
    with one column block per session.  ``basis="source_edge"`` uses unit
    injections at the source out-edges, one block per source node.
    """
    targets = _resolve_targets(inst, target)
    if basis == "symbol":
        if vectors is None:
            vectors = propagate(inst, code)
        blocks = [(f"session{i}", s.rate) for i, s in enumerate(inst.sessions)]
    elif basis == "source_edge":
        if vectors is None:
            vectors = edge_basis_vectors(inst, code)
        blocks = [(s, inst.dag.out_degree(s)) for s in inst.source_nodes()]
    else:
        raise CodingError(f"unknown basis {basis!r}")
    width = sum(w for _, w in blocks)
    rows = [vectors[t] for t in targets] if targets else []
    m = FieldMatrix.from_rows(rows, code.p) if rows else FieldMatrix.zeros(0, width, code.p)
    return TransferMatrix(m, blocks, targets, basis)


# -- decoding-side linear algebra ---------------------------------------------


def det_identity_check(m2: FieldMatrix, beta: Sequence[int], xi: Sequence[int]) -> bool:
    """Check the closed form for det([M21 | M22 xi]).

    ``m2`` is the 2x3 matrix [M21 | M22] (first column from source 1, last
    two from source 2).  Requires beta[0] != 0, beta . xi = 0 and xi[1] != 0;
    violations raise with a message naming the failed condition.  Returns
    True when the determinant equals (xi2/beta1) * det of the 2x2 matrix
    built from the cross-combination of the M22 columns.
    """
    p = m2.p
    if m2.shape != (2, 3):
        raise CodingError(f"expected a 2x3 matrix [M21 | M22], got {m2.shape}")
    b1, b2 = int(beta[0]) % p, int(beta[1]) % p
    x1, x2 = int(xi[0]) % p, int(xi[1]) % p
    if b1 == 0:
        raise CodingError("precondition failed: beta[0] must be nonzero")
    if (b1 * x1 + b2 * x2) % p != 0:
        raise CodingError("precondition failed: beta . xi must be zero")
    if x2 == 0:
        raise CodingError("precondition failed: xi[1] must be nonzero")
    m21 = m2.take_cols([0])
    m22 = m2.take_cols([1, 2])
    lhs = m21.hstack(m22 @ FieldMatrix.column([x1, x2], p)).det()
    a1, a2 = int(m2.a[0, 0]), int(m2.a[1, 0])
    b11, b12 = int(m2.a[0, 1]), int(m2.a[0, 2])
    b21, b22 = int(m2.a[1, 1]), int(m2.a[1, 2])
    inner = FieldMatrix.from_rows(
        [[a1, (-b2 * b11 + b1 * b12) % p], [a2, (-b2 * b21 + b1 * b22) % p]], p
    ).det()
    rhs = (x2 * pow(b1, p - 2, p) * inner) % p
    return lhs == rhs


def partial_decode(Z: FieldMatrix, H1: FieldMatrix, H2: FieldMatrix) -> Optional[FieldMatrix]:
    """Unique X2 with Z = H1 X1 + H2 X2, or None.

    Requires H2 full column rank, trivially intersecting spans
    (rank([H1|H2]) = rank(H1) + rank(H2)) and Z in span([H1|H2]); any
    failure returns None, meaning the caller cannot decode.
    """
    if H1.p != H2.p or Z.p != H2.p:
        raise CodingError("mixed moduli")
    if H1.rows != H2.rows or Z.rows != H2.rows:
        raise CodingError("row count mismatch")
    if H2.cols == 0 or H2.rank() != H2.cols:
        return None
    joint = H1.hstack(H2)
    if joint.rank() != H1.rank() + H2.rank():
        return None
    x = joint.solve(Z)
    if x is None:
        return None
    return FieldMatrix(x.a[H1.cols :, :].copy(), x.p)


def distinct_image_count(M: FieldMatrix, constraints: Optional[FieldMatrix]) -> int:
    """Number of distinct M @ theta over nonzero theta with
    constraints @ theta = 0.  Enumeration only; p must be 2, 3 or 5."""
    p = M.p
    if p not in (2, 3, 5):
        raise CodingError("distinct_image_count enumerates; use p in {2, 3, 5}")
    if constraints is None or constraints.rows == 0:
        basis = FieldMatrix.identity(M.cols, p)
    else:
        if constraints.cols != M.cols:
            raise CodingError("constraint width mismatch")
        basis = constraints.null_space()
    images = set()
    from .field import enumerate_vectors

    for coeffs in enumerate_vectors(basis.cols, p):
        if not any(coeffs):
            continue
        theta = basis @ FieldMatrix.column(coeffs, p)
        if theta.is_zero():
            continue
        images.add(tuple(v[0] for v in (M @ theta).tolist()))
    return len(images)


# -- lifting codes through the structuring correspondence -----------------------


def lift_code(smap: StructureMap, inst: UnicastInstance, hat_code: NetworkCode) -> NetworkCode:
    """Convert a code on the structured graph into one on the original graph.

    Per original node, the gadget's internal coefficients compose into one
    local row per out-edge; the lifted code then reproduces, edge for edge,
    the structured code's global coding vectors.  Original edges with no
    structured image (pruned as useless) get zero rows.
    """
    g: Dag = smap.original
    hat: Dag = smap.structured
    p = hat_code.p
    rows: dict[int, tuple[int, ...]] = {}
    for v in g.nodes:
        outs = g.out_edges(v)
        if not outs:
            continue
        ins = g.in_edges(v)
        observed = inst.observed_sessions(v)
        if observed:
            width = sum(inst.sessions[i].rate for i in observed)
            for f in outs:
                hid = smap.edge_map.get(f.id)
                rows[f.id] = hat_code.row(hid) if hid is not None else (0,) * width
            continue
        surviving = [e for e in ins if e.id in smap.edge_map]
        pos = {e.id: i for i, e in enumerate(ins)}
        if v not in smap.gadget_edges:
            # node kept as-is; map hat-row coefficients back to original in-edges
            hat_ins = [e.id for e in hat.in_edges(v)] if hat.has_node(v) else []
            back = {smap.edge_map[e.id]: e.id for e in surviving}
            for f in outs:
                hid = smap.edge_map.get(f.id)
                row = [0] * len(ins)
                if hid is not None:
                    for coeff, hin in zip(hat_code.row(hid), hat_ins):
                        row[pos[back[hin]]] = coeff
                rows[f.id] = tuple(row)
            continue
        # expanded node: propagate unit vectors through the gadget
        width = len(surviving)
        local: dict[int, tuple[int, ...]] = {}
        for i, e in enumerate(surviving):
            unit = [0] * width
            unit[i] = 1
            local[smap.edge_map[e.id]] = tuple(unit)
        for gid in smap.gadget_order[v]:
            tail = hat.edge(gid).tail
            acc = [0] * width
            for coeff, e_in in zip(hat_code.row(gid), hat.in_edges(tail)):
                if coeff:
                    src = local[e_in.id]
                    for idx in range(width):
                        acc[idx] = (acc[idx] + coeff * src[idx]) % p
            local[gid] = tuple(acc)
        for f in outs:
            hid = smap.edge_map.get(f.id)
            row = [0] * len(ins)
            if hid is not None:
                tail = hat.edge(hid).tail
                acc = [0] * width
                for coeff, e_in in zip(hat_code.row(hid), hat.in_edges(tail)):
                    if coeff:
                        src = local[e_in.id]
                        for idx in range(width):
                            acc[idx] = (acc[idx] + coeff * src[idx]) % p
                for i, e in enumerate(surviving):
                    row[pos[e.id]] = acc[i]
            rows[f.id] = tuple(row)
    # dead edges (tail has neither in-edges nor symbols)
    for e in g.edges():
        if e.id not in rows:
            rows[e.id] = ()
    return NetworkCode(p, rows)


# -- serialization ----------------------------------------------------------------
#
# Text format, one row per edge:
#
#     field 257
#     row 0 : 3 17 250
#     row 1 :
#
# Coefficients are integers mod p in edge-id order of the instance the code
# belongs to; the format round-trips exactly.


def format_code(code: NetworkCode) -> str:
    lines = [f"field {code.p}"]
    for eid in sorted(code.rows):
        coeffs = " ".join(str(c) for c in code.rows[eid])
        lines.append(f"row {eid} : {coeffs}".rstrip())
    return "\n".join(lines) + "\n"


class CodeParseError(Exception):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def parse_code(text: str) -> NetworkCode:
    p = None
    rows: dict[int, tuple[int, ...]] = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "field":
            if len(parts) != 2 or not parts[1].isdigit():
                raise CodeParseError(ln, "expected: field P")
            p = int(parts[1])
        elif parts[0] == "row":
            if p is None:
                raise CodeParseError(ln, "field must be declared before rows")
            if len(parts) < 3 or parts[2] != ":":
                raise CodeParseError(ln, "expected: row EDGEID : c1 c2 ...")
            try:
                eid = int(parts[1])
                coeffs = tuple(int(c) for c in parts[3:])
            except ValueError:
                raise CodeParseError(ln, "coefficients must be integers")
            if eid in rows:
                raise CodeParseError(ln, f"duplicate row for edge {eid}")
            rows[eid] = coeffs
        else:
            raise CodeParseError(ln, f"unknown directive {parts[0]!r}")
    if p is None:
        raise CodeParseError(0, "missing field declaration")
    try:
        return NetworkCode(p, rows)
    except CodingError as exc:
        raise CodeParseError(0, str(exc))
