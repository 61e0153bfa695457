"""Constructive network-coding schemes, by connectivity class.

Every public constructor follows the same pipeline: normalize and
unit-split the instance, restructure it to internal degree three, prune to
a minimal subgraph at the scheme's exact connectivity target, run the
scheme on that working graph, lift the code back through the structuring
correspondence, and verify.  A returned result always passes the exact
decodability certificate at every terminal; random-coding rank gates are
retried with fresh seeds a bounded number of times and then raise.

Schemes:

* vector routing over three time units for connectivity [3 3 3];
* the uneven two-unicast scheme (rates {1, m}, connectivity [1 m+1]):
  random coding plus a source precoder solving a diagonal target system;
* the {2, 1}-rate two-unicast scheme on connectivity [2 4]: colored overlap
  segments, interference nulling at one terminal, and a cancellation
  argument at the other;
* three-session [1 3 3] and [2 2 4]: two time units, one two-unicast
  sub-problem per time slot;
* three-session [1 2 5]: alignment precoding with several topological
  cases, including a graph-modification branch with one deterministic
  cancellation edge.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from typing import Optional, Sequence

from .coding import (
    NetworkCode,
    edge_basis_vectors,
    lift_code,
    transfer_matrix,
)
from .field import DEFAULT_MODULUS, FieldMatrix, enumerate_vectors
from .graph import (
    Dag,
    Path,
    all_overlap_segments,
    edge_disjoint_paths,
    last_overlap_segment,
    minimize,
    structure,
)
from .instance import Session, UnicastInstance, Verdict, classify, connectivity, time_expand
from .verify import DecodeReport, verify_decoding

DEFAULT_RETRIES = 16


class ConstructionError(Exception):
    pass


class NotFeasibleError(ConstructionError):
    """The instance's class has no constructive scheme."""


class RetryExhaustedError(ConstructionError):
    def __init__(self, gate: str, attempts: int):
        super().__init__(f"rank gate {gate!r} failed after {attempts} attempts")
        self.gate = gate
        self.attempts = attempts


@dataclass
class ConstructionResult:
    instance: UnicastInstance  # the (possibly time-expanded) instance the code lives on
    code: NetworkCode
    scheme: str
    report: DecodeReport
    transcript: list[str] = dc_field(default_factory=list)
    recipes: dict[int, str] = dc_field(default_factory=dict)
    expansion: Optional[dict[int, list[int]]] = None  # original edge -> copies
    details: dict = dc_field(default_factory=dict)

    @property
    def all_decodable(self) -> bool:
        return self.report.all_decodable


# -- shared plumbing ---------------------------------------------------------------


def _prepare(inst: UnicastInstance, target: Sequence[int]):
    """normalize -> unit-split -> structure -> minimize to the exact target.

    Returns (work instance, structure map, base instance).  The base
    instance is what the lifted code will live on.
    """
    base = inst.normalized().separated().split_capacities()
    pairs = [(s.source, s.terminal) for s in base.sessions]
    conn = connectivity(base)
    for have, want in zip(conn, target):
        if have < want:
            raise ConstructionError(f"connectivity {conn} does not dominate {tuple(target)}")
    smap = structure(base.dag, pairs)
    hat = UnicastInstance(smap.structured, list(base.sessions))
    work_dag = minimize(hat.dag, pairs, target=list(target))
    work = UnicastInstance(work_dag, list(base.sessions))
    got = connectivity(work)
    if tuple(got) != tuple(target):
        raise ConstructionError(f"minimization reached {got}, expected {tuple(target)}")
    return work, smap, hat, base


def embed_rows(
    full_inst: UnicastInstance,
    sub_inst: UnicastInstance,
    rows: dict[int, Sequence[int]],
    symbol_map: dict[int, tuple[int, int]],
) -> dict[int, tuple[int, ...]]:
    """Re-express rows of a sub-instance code in a larger instance.

    Edge ids must agree (sub graphs keep parent ids).  ``symbol_map`` sends
    a sub-session index to (full-session index, offset of the sub-session's
    symbols inside the full session's block).  In-edge coefficient rows are
    padded with zeros at in-edges absent from the sub-instance.
    """
    out: dict[int, tuple[int, ...]] = {}
    for eid, row in rows.items():
        e = full_inst.dag.edge(eid)
        obs_full = full_inst.observed_sessions(e.tail)
        if obs_full:
            full_len = sum(full_inst.sessions[i].rate for i in obs_full)
            full_row = [0] * full_len
            pos = 0
            for si in sub_inst.observed_sessions(e.tail):
                fi, off = symbol_map[si]
                base = sum(full_inst.sessions[j].rate for j in obs_full if j < fi)
                for j in range(sub_inst.sessions[si].rate):
                    full_row[base + off + j] = row[pos]
                    pos += 1
            out[eid] = tuple(full_row)
        else:
            full_ins = full_inst.dag.in_edges(e.tail)
            posmap = {e2.id: i for i, e2 in enumerate(full_ins)}
            full_row = [0] * len(full_ins)
            for coeff, e2 in zip(row, sub_inst.dag.in_edges(e.tail)):
                full_row[posmap[e2.id]] = coeff
            out[eid] = tuple(full_row)
    return out


def _complete_zero(inst: UnicastInstance, rows: dict[int, tuple[int, ...]], p: int) -> NetworkCode:
    """Fill every unlisted edge with a zero row of the right length."""
    from .coding import expected_row_length

    full = dict(rows)
    for e in inst.dag.edges():
        if e.id not in full:
            full[e.id] = (0,) * expected_row_length(inst, e.id)
    return NetworkCode(p, full)


def _lift_and_verify(
    base: UnicastInstance,
    hat: UnicastInstance,
    smap,
    work: UnicastInstance,
    rows: dict[int, tuple[int, ...]],
    p: int,
    scheme: str,
    transcript: list[str],
    details: dict,
) -> ConstructionResult:
    hat_rows = embed_rows(hat, work, rows, {i: (i, 0) for i in range(len(work.sessions))})
    hat_code = _complete_zero(hat, hat_rows, p)
    lifted = lift_code(smap, base, hat_code)
    report = verify_decoding(base, lifted)
    if not report.all_decodable:
        raise ConstructionError(f"lifted {scheme} code failed verification:\n{report}")
    recipes = {i: t.method for i, t in enumerate(report.terminals)}
    return ConstructionResult(base, lifted, scheme, report, transcript, recipes, None, details)


def _random_internal_rows(
    work: UnicastInstance, edge_ids: Sequence[int], p: int, rng: random.Random
) -> dict[int, tuple[int, ...]]:
    """Uniform rows for the given non-source edges of the working graph."""
    rows = {}
    for eid in edge_ids:
        e = work.dag.edge(eid)
        if work.observed_sessions(e.tail):
            continue
        rows[eid] = tuple(rng.randrange(p) for _ in range(work.dag.in_degree(e.tail)))
    return rows


def _routing_chain_rows(work: UnicastInstance, path: Path, prefer: set[int]) -> dict[int, tuple[int, ...]]:
    """Relay rows along a path: each edge copies its path predecessor (or,
    at a merge, the in-edge listed in ``prefer``)."""
    rows = {}
    for k, e in enumerate(path.edges):
        ins = work.dag.in_edges(e.tail)
        if not ins:
            continue
        row = [0] * len(ins)
        pick = None
        if k > 0:
            pick = path.edges[k - 1].id
        else:
            for cand in ins:
                if cand.id in prefer:
                    pick = cand.id
                    break
        if pick is not None:
            for i, cand in enumerate(ins):
                if cand.id == pick:
                    row[i] = 1
        rows[e.id] = tuple(row)
    return rows


def _source_row(work: UnicastInstance, session_index: int, symbol: int) -> tuple[int, ...]:
    """One-hot row selecting one symbol of one session at its source node."""
    src = work.sessions[session_index].source
    obs = work.observed_sessions(src)
    row = [0] * sum(work.sessions[i].rate for i in obs)
    base = sum(work.sessions[j].rate for j in obs if j < session_index)
    row[base + symbol] = 1
    return tuple(row)


def _source_row_values(work: UnicastInstance, session_index: int, values: Sequence[int]) -> tuple[int, ...]:
    """Row carrying an arbitrary combination of one session's symbols."""
    src = work.sessions[session_index].source
    obs = work.observed_sessions(src)
    row = [0] * sum(work.sessions[i].rate for i in obs)
    base = sum(work.sessions[j].rate for j in obs if j < session_index)
    for j, v in enumerate(values):
        row[base + j] = v
    return tuple(row)


def _scan_vectors(basis: FieldMatrix, predicate, limit: int = 512) -> Optional[FieldMatrix]:
    """First nonzero combination of basis columns satisfying the predicate,
    in odometer order over the coefficients."""
    p = basis.p
    count = 0
    for coeffs in enumerate_vectors(basis.cols, p):
        if not any(coeffs):
            continue
        v = basis @ FieldMatrix.column(coeffs, p)
        if v.is_zero():
            continue
        if predicate(v):
            return v
        count += 1
        if count >= limit:
            break
    return None


# -- vector routing for [3 3 3] ----------------------------------------------------


def construct_routing(inst: UnicastInstance, p: int = DEFAULT_MODULUS, seed: int = 0) -> ConstructionResult:
    """Vector routing over n=3 time units: time slot i carries session i's
    three symbols over three edge-disjoint paths in its own edge copy."""
    base = inst.normalized().separated().split_capacities()
    conn = connectivity(base)
    if len(base.sessions) != 3 or any(k < 3 for k in conn):
        raise ConstructionError(f"routing construction needs connectivity >= [3 3 3], got {conn}")
    expanded, copies = time_expand(base, 3)
    transcript = [f"vector routing over 3 time units; connectivity {conn}"]
    full: dict[int, tuple[int, ...]] = {}
    for c, sess in enumerate(base.sessions):
        sub_dag = expanded.dag.restricted_to([copies[e.id][c] for e in base.dag.edges()])
        paths = edge_disjoint_paths(sub_dag, sess.source, sess.terminal, 3)
        assert paths is not None
        sub = UnicastInstance(sub_dag, list(expanded.sessions))
        rows: dict[int, tuple[int, ...]] = {}
        for j, path in enumerate(paths):
            first = path.edges[0]
            rows[first.id] = _source_row(sub, c, j)
            chain = _routing_chain_rows(sub, path, set())
            chain.pop(first.id, None)
            for eid, row in chain.items():
                rows[eid] = row
        full.update(embed_rows(expanded, sub, rows, {i: (i, 0) for i in range(3)}))
        transcript.append(f"slot {c}: session {c} routed over {len(paths)} disjoint paths")
    code = _complete_zero(expanded, full, p)
    report = verify_decoding(expanded, code)
    if not report.all_decodable:
        raise ConstructionError(f"routing construction failed verification:\n{report}")
    recipes = {i: t.method for i, t in enumerate(report.terminals)}
    return ConstructionResult(expanded, code, "routing", report, transcript, recipes, copies)


# -- uneven two-unicast: rates {1, m}, connectivity [1 m+1] -------------------------


def _one_m_core(
    work: UnicastInstance,
    p: int,
    seed: int,
    retries: int,
    transcript: list[str],
    details: dict,
) -> dict[int, tuple[int, ...]]:
    """Cable scheme on a minimal structured working instance.

    work.sessions[0] has rate 1 (symbol X1), work.sessions[1] rate m.
    Routes whatever rides overlap-free paths, then solves the diagonal
    target system for the overlapping bundle.
    """
    s1, s2 = work.sessions
    m = s2.rate
    p11 = edge_disjoint_paths(work.dag, s1.source, s1.terminal, 1)[0]
    p2 = edge_disjoint_paths(work.dag, s2.source, s2.terminal, m + 1)
    if p2 is None:
        raise ConstructionError("working instance lost its m+1 disjoint paths")
    p11_edges = set(p11.edge_ids())
    overlapping = [q for q in p2 if set(q.edge_ids()) & p11_edges]
    free = [q for q in p2 if not (set(q.edge_ids()) & p11_edges)]
    n = len(overlapping)
    transcript.append(f"one-m scheme: m={m}, {n} overlapping / {len(free)} free carrier paths")

    rows: dict[int, tuple[int, ...]] = {}
    # symbols n-1 .. m-1 ride the overlap-free paths
    routed = list(range(max(n - 1, 0), m))
    for k, sym in enumerate(routed):
        path = free[k]
        rows[path.edges[0].id] = _source_row_values(
            work, 1, [1 if j == sym else 0 for j in range(m)]
        )
        chain = _routing_chain_rows(work, path, set())
        chain.pop(path.edges[0].id, None)
        rows.update(chain)
    for path in free[len(routed) :]:  # spare free path when nothing overlaps
        rows[path.edges[0].id] = _source_row_values(work, 1, [0] * m)
        chain = _routing_chain_rows(work, path, set())
        chain.pop(path.edges[0].id, None)
        rows.update(chain)

    if n == 0:
        transcript.append("degenerate branch: all carrier paths overlap-free, pure routing")
        rows[p11.edges[0].id] = _source_row(work, 0, 0)
        chain = _routing_chain_rows(work, p11, set())
        chain.pop(p11.edges[0].id, None)
        rows.update(chain)
        return rows

    coded = list(range(0, n - 1))  # symbols mixed across the overlapping paths
    inner_edges = set(p11.edge_ids())
    for q in overlapping:
        inner_edges.update(q.edge_ids())
    host = last_overlap_segment(p11, overlapping)
    assert host is not None
    seg_last, host_index = host
    # the last overlap segment along the direct path is also the last along
    # its hosting carrier path (otherwise the graph would contain a cycle)
    host_last = last_overlap_segment(overlapping[host_index], [p11])
    assert host_last is not None and host_last[0].last.id == seg_last.last.id

    t2_targets = [q.edges[-1].id for q in overlapping]
    s2_out = {q.edges[0].id for q in overlapping}
    t1_in = work.dag.in_edges(s1.terminal)
    if len(t1_in) != 1:
        raise ConstructionError("direct session terminal should have a single in-edge")

    rng = random.Random(seed)
    for attempt in range(retries):
        trial = dict(rows)
        trial.update(_random_internal_rows(work, sorted(inner_edges), p, rng))
        probe = _complete_zero(work, trial, p)
        vec = edge_basis_vectors(work, probe)
        cols = _edge_basis_columns(work)
        alpha1 = vec[t1_in[0].id][cols[p11.edges[0].id]]
        if alpha1 == 0:
            continue  # gate: the direct path died
        m22 = _take_rows([vec[t] for t in t2_targets], cols, s2_out, p)
        if n >= 2 and m22.rank() != n:
            continue  # gate: carrier transfer not invertible
        theta_small = None
        if coded:
            target = FieldMatrix.zeros(n, len(coded), p)
            non_host = [i for i in range(n) if i != host_index]
            for j in range(len(coded)):
                target.a[non_host[j], j] = 1
            theta_small = m22.solve(target)
            assert theta_small is not None
        # source rows for the overlapping carrier bundle
        order = sorted(s2_out)
        for i, q in enumerate(overlapping):
            values = [0] * m
            if theta_small is not None:
                k = order.index(q.edges[0].id)
                for j, sym in enumerate(coded):
                    values[sym] = int(theta_small.a[k, j])
            trial[q.edges[0].id] = _source_row_values(work, 1, values)
        trial[p11.edges[0].id] = _source_row(work, 0, 0)
        code = _complete_zero(work, trial, p)
        report = verify_decoding(work, code)
        if report.all_decodable:
            transcript.append(
                f"diagonal target solved on attempt {attempt + 1}; zero row at carrier"
                f" path {host_index}"
            )
            details["one_m"] = {
                "work": work,
                "M22": m22,
                "host_index": host_index,
                "carrier_targets": t2_targets,
                "carrier_sources": order,
                "m": m,
                "coded_symbols": coded,
            }
            return dict(code.rows)
    raise RetryExhaustedError("one-m scheme (direct-path transfer and carrier determinant)", retries)


def _edge_basis_columns(work: UnicastInstance) -> dict[int, int]:
    from .coding import source_edge_columns

    return {eid: k for k, (_, eid) in enumerate(source_edge_columns(work))}


def _take_rows(
    vecs: Sequence[tuple[int, ...]], cols: dict[int, int], edge_ids: set[int], p: int
) -> FieldMatrix:
    """Submatrix of stacked edge-basis vectors, restricted to the columns of
    the given source out-edges (ascending edge id)."""
    idx = sorted(cols[e] for e in edge_ids)
    return FieldMatrix.from_rows([[v[i] for i in idx] for v in vecs], p)


def construct_two_unicast_1_m(
    inst: UnicastInstance,
    p: int = DEFAULT_MODULUS,
    seed: int = 0,
    retries: int = DEFAULT_RETRIES,
) -> ConstructionResult:
    """Two sessions with rates {1, m} on connectivity at least [1, m+1]."""
    if len(inst.sessions) != 2:
        raise ConstructionError("this scheme needs exactly two sessions")
    rates = sorted(s.rate for s in inst.sessions)
    if rates[0] != 1:
        raise ConstructionError(f"rates must be {{1, m}}, got {[s.rate for s in inst.sessions]}")
    if inst.sessions[0].rate == 1:
        order = [0, 1]
    else:
        order = [1, 0]
    m = inst.sessions[order[1]].rate
    oriented = UnicastInstance(inst.dag.copy(), [inst.sessions[i] for i in order])
    target = [1, m + 1]
    work, smap, hat, base = _prepare(oriented, target)
    transcript = [f"uneven two-unicast, rates {{1, {m}}}, target connectivity [1 {m + 1}]"]
    details: dict = {}
    rows = _one_m_core(work, p, seed, retries, transcript, details)
    result = _lift_and_verify(base, hat, smap, work, rows, p, "1m", transcript, details)
    if order != [0, 1]:
        # report sessions in the caller's order
        perm_sessions = [base.sessions[order.index(i)] for i in range(2)]
        rows_back = embed_rows(
            UnicastInstance(base.dag.copy(), perm_sessions),
            base,
            result.code.rows,
            {0: (order[0], 0), 1: (order[1], 0)},
        )
        back_inst = UnicastInstance(base.dag.copy(), perm_sessions)
        code = _complete_zero(back_inst, rows_back, p)
        report = verify_decoding(back_inst, code)
        assert report.all_decodable
        result = ConstructionResult(
            back_inst, code, "1m", report, transcript,
            {i: t.method for i, t in enumerate(report.terminals)}, None, details
        )
    return result


# -- [1 3 3]: two time units, two uneven two-unicast subproblems --------------------


def construct_133(
    inst: UnicastInstance,
    p: int = DEFAULT_MODULUS,
    seed: int = 0,
    retries: int = DEFAULT_RETRIES,
) -> ConstructionResult:
    """Three unit-rate sessions, connectivity dominating [1 3 3]."""
    base = inst.normalized().separated().split_capacities()
    conn = connectivity(base)
    roles = _pick_roles(conn, [1, 3, 3])
    if roles is None:
        raise ConstructionError(f"connectivity {conn} does not dominate [1 3 3]")
    expanded, copies = time_expand(base, 2)
    transcript = [
        f"[1 3 3] scheme over two time units; connectivity {conn};"
        f" direct role = session {roles[0]}"
    ]
    details: dict = {}
    rows: dict[int, tuple[int, ...]] = {}
    for c in (0, 1):
        pair = roles[1 + c]
        sub_sessions = [
            Session(base.sessions[roles[0]].source, base.sessions[roles[0]].terminal, 1),
            Session(base.sessions[pair].source, base.sessions[pair].terminal, 2),
        ]
        sub_dag = expanded.dag.restricted_to([copies[e.id][c] for e in base.dag.edges()])
        sub_inst = UnicastInstance(sub_dag, sub_sessions)
        sub_result = construct_two_unicast_1_m(sub_inst, p, seed + 101 * c, retries)
        transcript.extend(f"slot {c}: {line}" for line in sub_result.transcript)
        details[f"slot{c}"] = sub_result.details
        rows.update(
            embed_rows(
                expanded,
                sub_result.instance,
                sub_result.code.rows,
                {0: (roles[0], c), 1: (pair, 0)},
            )
        )
    code = _complete_zero(expanded, rows, p)
    report = verify_decoding(expanded, code)
    if not report.all_decodable:
        raise ConstructionError(f"[1 3 3] composition failed verification:\n{report}")
    recipes = {i: t.method for i, t in enumerate(report.terminals)}
    return ConstructionResult(expanded, code, "133", report, transcript, recipes, copies, details)


def _pick_roles(conn: Sequence[int], pattern: Sequence[int]) -> Optional[list[int]]:
    """Assign session indices to the sorted pattern slots, smallest first."""
    order = sorted(range(len(conn)), key=lambda i: (conn[i], i))
    if all(conn[i] >= w for i, w in zip(order, sorted(pattern))):
        return order
    return None


# -- {2, 1}-rate two-unicast on connectivity [2 4] -----------------------------------


def _segment_positions(path: Path, seg) -> int:
    return path.index_of(seg.last.id)


def _relay_rows_after(work: UnicastInstance, path: Path, from_pos: int) -> dict[int, tuple[int, ...]]:
    """Deterministic unit relays along path.edges[from_pos:]; every tail on
    that stretch must have in-degree one."""
    rows = {}
    for k in range(from_pos, len(path.edges)):
        e = path.edges[k]
        ins = work.dag.in_edges(e.tail)
        if len(ins) == 1:
            rows[e.id] = (1,)
        else:
            row = [0] * len(ins)
            row[[x.id for x in ins].index(path.edges[k - 1].id)] = 1
            rows[e.id] = tuple(row)
    return rows


def _choose_theta(M12: FieldMatrix, I3: FieldMatrix, G3: FieldMatrix, p: int):
    """First nonzero theta in null(M12) whose image under the annihilator
    functionals of the interference rows is nonzero.

    I3/G3 are the direct-session and carrier blocks of the rows the second
    terminal combines; W stacks w = v^T G3 over a basis of left-annihilators
    v of I3 (v^T I3 = 0).  A valid theta keeps the carrier symbol visible in
    the annihilated combination.
    """
    null = M12.null_space()
    left = I3.transpose().null_space()  # columns v with v^T I3 = 0
    W = left.transpose() @ G3
    if null.cols == 0 or W.is_zero():
        return None, W
    theta = _scan_vectors(null, lambda v: not (W @ v).is_zero())
    return theta, W


def _two_four_route_all(
    work: UnicastInstance,
    pr: Path,
    pb: Path,
    carriers: list[Path],
    free_index: int,
    p: int,
    transcript: list[str],
) -> dict[int, tuple[int, ...]]:
    """A carrier path shares nothing with the direct paths: route everything
    (direct paths win at merge nodes)."""
    transcript.append(f"carrier path {free_index} is overlap-free; pure routing")
    rows: dict[int, tuple[int, ...]] = {}
    for i, q in enumerate(carriers):
        chain = _routing_chain_rows(work, q, set())
        chain.pop(q.edges[0].id, None)
        rows.update(chain)
        rows[q.edges[0].id] = _source_row_values(work, 1, [1 if i == free_index else 0])
    for path, sym in ((pb, 1), (pr, 0)):
        chain = _routing_chain_rows(work, path, set())
        chain.pop(path.edges[0].id, None)
        rows.update(chain)
        rows[path.edges[0].id] = _source_row(work, 0, sym)
    return rows


def _two_four_clean_direct(
    work: UnicastInstance,
    clean: Path,
    clean_sym: int,
    other_sym: int,
    p: int,
    seed: int,
    retries: int,
    transcript: list[str],
    details: dict,
) -> dict[int, tuple[int, ...]]:
    """One direct path has no carrier overlap: route its symbol there and
    solve the remaining {1, 1} problem with the uneven two-unicast scheme."""
    transcript.append(
        f"direct path for symbol {clean_sym} is overlap-free; routing it and reducing"
    )
    s1, s2 = work.sessions
    rows: dict[int, tuple[int, ...]] = {}
    chain = _routing_chain_rows(work, clean, set())
    chain.pop(clean.edges[0].id, None)
    rows.update(chain)
    rows[clean.edges[0].id] = _source_row(work, 0, clean_sym)
    sub_dag = work.dag.without_edges(clean.edge_ids())
    pairs = [(s1.source, s1.terminal), (s2.source, s2.terminal)]
    sub_dag = minimize(sub_dag, pairs, target=[1, 2])
    sub = UnicastInstance(sub_dag, [Session(s1.source, s1.terminal, 1), Session(s2.source, s2.terminal, 1)])
    sub_rows = _one_m_core(sub, p, seed, retries, transcript, details)
    rows.update(embed_rows(work, sub, sub_rows, {0: (0, other_sym), 1: (1, 0)}))
    return rows


def _two_four_core(
    work: UnicastInstance,
    p: int,
    seed: int,
    retries: int,
    transcript: list[str],
    details: dict,
) -> dict[int, tuple[int, ...]]:
    """Colored-segment scheme on a minimal structured [2 4] working instance.

    work.sessions[0] has rate 2 (symbols X1 red, X2 blue), work.sessions[1]
    rate 1 (X3 on four carrier paths)."""
    s1, s2 = work.sessions
    paths1 = edge_disjoint_paths(work.dag, s1.source, s1.terminal, 2)
    carriers = edge_disjoint_paths(work.dag, s2.source, s2.terminal, 4)
    if paths1 is None or carriers is None:
        raise ConstructionError("working instance lost its disjoint paths")
    pr, pb = paths1
    sym_r, sym_b = 0, 1
    er = last_overlap_segment(pr, carriers)
    eb = last_overlap_segment(pb, carriers)
    if er is None:
        return _two_four_clean_direct(work, pr, 0, 1, p, seed, retries, transcript, details)
    if eb is None:
        return _two_four_clean_direct(work, pb, 1, 0, p, seed, retries, transcript, details)
    mixed = {i: last_overlap_segment(carriers[i], [pr, pb]) for i in range(4)}
    free = [i for i in range(4) if mixed[i] is None]
    if free:
        return _two_four_route_all(work, pr, pb, carriers, free[0], p, transcript)

    (er_seg, er_host) = er
    (eb_seg, eb_host) = eb

    def swap_colors():
        nonlocal pr, pb, sym_r, sym_b, er_seg, eb_seg, er_host, eb_host
        pr, pb = pb, pr
        sym_r, sym_b = sym_b, sym_r
        er_seg, eb_seg = eb_seg, er_seg
        er_host, eb_host = eb_host, er_host

    if er_host != eb_host:
        # last segments on different carrier paths; orient so the red one is
        # also the last overlap along its hosting carrier
        if mixed[er_host][0].last.id == er_seg.last.id:
            pass
        elif mixed[eb_host][0].last.id == eb_seg.last.id:
            swap_colors()
            transcript.append("swapped direct-path colors to satisfy the last-overlap claim")
        else:
            raise ConstructionError(
                "neither last segment is last along its carrier (acyclicity violated?)"
            )
        others = [i for i in range(4) if i not in (er_host, eb_host)]
        combine_rows = [0, 2, 3]  # red-segment row plus the two spare-carrier rows
        targets = [
            er_seg.last.id,
            eb_seg.last.id,
            mixed[others[0]][0].last.id,
            mixed[others[1]][0].last.id,
        ]
        transcript.append(
            f"case 1: last red segment on carrier {er_host}, last blue on carrier {eb_host}"
        )
        deterministic: dict[int, tuple[int, ...]] = {}
        case = 1
    else:
        host = carriers[er_host]
        if host.index_of(eb_seg.last.id) < host.index_of(er_seg.last.id):
            swap_colors()
            transcript.append("swapped direct-path colors so the blue segment is downstream")
            host = carriers[er_host]
        assert mixed[er_host][0].last.id == eb_seg.last.id, "blue segment must close its carrier"
        blue_segs = all_overlap_segments(pb, carriers)
        assert blue_segs and blue_segs[-1][0].last.id == eb_seg.last.id
        if len(blue_segs) == 1:
            # the sole blue segment: route the blue symbol, reduce the rest
            transcript.append("case 2 with a single blue segment; routing it and reducing")
            rows: dict[int, tuple[int, ...]] = {}
            chain = _routing_chain_rows(work, pb, set())
            chain.pop(pb.edges[0].id, None)
            rows.update(chain)
            rows[pb.edges[0].id] = _source_row(work, 0, sym_b)
            sub_dag = work.dag.without_edges(pb.edge_ids())
            pairs = [(s1.source, s1.terminal), (s2.source, s2.terminal)]
            sub_dag = minimize(sub_dag, pairs, target=[1, 2])
            sub = UnicastInstance(
                sub_dag,
                [Session(s1.source, s1.terminal, 1), Session(s2.source, s2.terminal, 1)],
            )
            sub_rows = _one_m_core(sub, p, seed, retries, transcript, details)
            rows.update(embed_rows(work, sub, sub_rows, {0: (0, sym_r), 1: (1, 0)}))
            return rows
        ebp_seg, ebp_host = blue_segs[-2]
        if ebp_host == er_host:
            raise ConstructionError(
                "neighboring mixed segments share a carrier path (minimality violated)"
            )
        others = [i for i in range(4) if i not in (er_host, ebp_host)]
        combine_rows = [1, 2, 3]  # neighbor-blue row plus the spare-carrier rows
        targets = [
            er_seg.last.id,
            ebp_seg.last.id,
            mixed[others[0]][0].last.id,
            mixed[others[1]][0].last.id,
        ]
        transcript.append(
            f"case 2: both last segments on carrier {er_host}; deterministic relay at the"
            f" blue segment, neighbor on carrier {ebp_host}"
        )
        # deterministic coding: the blue segment copies its blue in-edge and
        # everything after it is a unit relay
        deterministic = {}
        pos = pb.index_of(eb_seg.first.id)
        ins = [x.id for x in work.dag.in_edges(eb_seg.first.tail)]
        row = [0] * len(ins)
        row[ins.index(pb.edges[pos - 1].id)] = 1
        deterministic[eb_seg.first.id] = tuple(row)
        for e in eb_seg.edges[1:]:
            deterministic[e.id] = (1,)
        deterministic.update(_relay_rows_after(work, host, host.index_of(eb_seg.last.id) + 1))
        deterministic.update(_relay_rows_after(work, pb, pb.index_of(eb_seg.last.id) + 1))
        case = 2

    t1_in = work.dag.in_edges(s1.terminal)
    if len(t1_in) != 2:
        raise ConstructionError("rate-2 terminal should have exactly two in-edges")
    s1_out = {pr.edges[0].id, pb.edges[0].id}
    s2_out = {q.edges[0].id for q in carriers}
    s2_order = sorted(s2_out)

    rng = random.Random(seed)
    for attempt in range(retries):
        trial = _random_internal_rows(
            work, [e.id for e in work.dag.edges()], p, rng
        )
        trial.update(deterministic)
        trial[pr.edges[0].id] = _source_row(work, 0, sym_r)
        trial[pb.edges[0].id] = _source_row(work, 0, sym_b)
        for q in carriers:
            trial[q.edges[0].id] = _source_row_values(work, 1, [0])
        probe = _complete_zero(work, trial, p)
        vec = edge_basis_vectors(work, probe)
        cols = _edge_basis_columns(work)
        m11 = _take_rows([vec[e.id] for e in t1_in], cols, s1_out, p)
        if m11.rank() != 2:
            continue
        m12 = _take_rows([vec[e.id] for e in t1_in], cols, s2_out, p)
        evecs = [vec[t] for t in targets]
        m22e = _take_rows(evecs, cols, s2_out, p)
        if m22e.rank() != 4:
            continue
        combine = [evecs[i] for i in combine_rows]
        I3 = _take_rows(combine, cols, s1_out, p)
        G3 = _take_rows(combine, cols, s2_out, p)
        theta, W = _choose_theta(m12, I3, G3, p)
        if theta is None:
            continue
        for q in carriers:
            k = s2_order.index(q.edges[0].id)
            trial[q.edges[0].id] = _source_row_values(work, 1, [int(theta.a[k, 0])])
        code = _complete_zero(work, trial, p)
        report = verify_decoding(work, code)
        if report.all_decodable:
            transcript.append(f"carrier precoder found on attempt {attempt + 1}")
            details["two_four"] = {
                "work": work,
                "case": case,
                "M12": m12,
                "W": W,
                "carrier_sources": s2_order,
                "targets": targets,
            }
            return dict(code.rows)
    raise RetryExhaustedError(
        "two-four scheme (direct-block rank and carrier edge-set rank)", retries
    )


def construct_two_unicast_24(
    inst: UnicastInstance,
    p: int = DEFAULT_MODULUS,
    seed: int = 0,
    retries: int = DEFAULT_RETRIES,
) -> ConstructionResult:
    """Two sessions with rates {2, 1} on connectivity at least [2, 4]."""
    if len(inst.sessions) != 2:
        raise ConstructionError("this scheme needs exactly two sessions")
    rates = sorted(s.rate for s in inst.sessions)
    if rates != [1, 2]:
        raise ConstructionError(f"rates must be {{2, 1}}, got {[s.rate for s in inst.sessions]}")
    order = [0, 1] if inst.sessions[0].rate == 2 else [1, 0]
    oriented = UnicastInstance(inst.dag.copy(), [inst.sessions[i] for i in order])
    work, smap, hat, base = _prepare(oriented, [2, 4])
    transcript = ["two-unicast with rates {2, 1}, target connectivity [2 4]"]
    details: dict = {}
    rows = _two_four_core(work, p, seed, retries, transcript, details)
    result = _lift_and_verify(base, hat, smap, work, rows, p, "24", transcript, details)
    if order != [0, 1]:
        perm_sessions = [base.sessions[order.index(i)] for i in range(2)]
        back_inst = UnicastInstance(base.dag.copy(), perm_sessions)
        rows_back = embed_rows(
            back_inst, base, result.code.rows, {0: (order[0], 0), 1: (order[1], 0)}
        )
        code = _complete_zero(back_inst, rows_back, p)
        report = verify_decoding(back_inst, code)
        assert report.all_decodable
        result = ConstructionResult(
            back_inst, code, "24", report, transcript,
            {i: t.method for i, t in enumerate(report.terminals)}, None, details
        )
    return result


def construct_224(
    inst: UnicastInstance,
    p: int = DEFAULT_MODULUS,
    seed: int = 0,
    retries: int = DEFAULT_RETRIES,
) -> ConstructionResult:
    """Three unit-rate sessions, connectivity dominating [2 2 4]."""
    base = inst.normalized().separated().split_capacities()
    conn = connectivity(base)
    roles = _pick_roles(conn, [2, 2, 4])
    if roles is None:
        raise ConstructionError(f"connectivity {conn} does not dominate [2 2 4]")
    expanded, copies = time_expand(base, 2)
    transcript = [
        f"[2 2 4] scheme over two time units; connectivity {conn};"
        f" wide role = session {roles[2]}"
    ]
    details: dict = {}
    rows: dict[int, tuple[int, ...]] = {}
    for c in (0, 1):
        pair = roles[c]
        sub_sessions = [
            Session(base.sessions[pair].source, base.sessions[pair].terminal, 2),
            Session(base.sessions[roles[2]].source, base.sessions[roles[2]].terminal, 1),
        ]
        sub_dag = expanded.dag.restricted_to([copies[e.id][c] for e in base.dag.edges()])
        sub_inst = UnicastInstance(sub_dag, sub_sessions)
        sub_result = construct_two_unicast_24(sub_inst, p, seed + 211 * c, retries)
        transcript.extend(f"slot {c}: {line}" for line in sub_result.transcript)
        details[f"slot{c}"] = sub_result.details
        rows.update(
            embed_rows(
                expanded,
                sub_result.instance,
                sub_result.code.rows,
                {0: (pair, 0), 1: (roles[2], c)},
            )
        )
    code = _complete_zero(expanded, rows, p)
    report = verify_decoding(expanded, code)
    if not report.all_decodable:
        raise ConstructionError(f"[2 2 4] composition failed verification:\n{report}")
    recipes = {i: t.method for i, t in enumerate(report.terminals)}
    return ConstructionResult(expanded, code, "224", report, transcript, recipes, copies, details)


# -- [1 2 5]: alignment precoding with topological case analysis ---------------------


@dataclass
class SubgraphCases:
    """Outcome of the minimal-subgraph analysis for the [1 2 5] scheme."""

    case: str  # "case1" or "fig6a" / "fig6b" / "fig6c"
    work: UnicastInstance
    direct: Path  # the session-1 path used (may overlap the carriers in case 1)
    carriers2: list[Path]
    subgraph: Optional[Dag] = None  # minimal cross-connection subgraph (case 2)
    cross_down: Optional[Path] = None  # s1 -> t2 path in the subgraph
    cross_up: Optional[Path] = None  # s2 -> t1 path in the subgraph
    e1: Optional[int] = None
    e2: Optional[int] = None
    e3: Optional[int] = None
    e4: Optional[int] = None
    host2: Optional[int] = None  # carrier hosting e2
    host4: Optional[int] = None  # carrier hosting e4


def _bfs_path(g: Dag, s: str, t: str) -> Optional[Path]:
    """Deterministic shortest path by BFS with edge-id tie-breaking."""
    if s == t:
        return None
    parent: dict[str, int] = {}
    seen = {s}
    queue = [s]
    while queue:
        v = queue.pop(0)
        for e in g.out_edges(v):
            if e.head not in seen:
                seen.add(e.head)
                parent[e.head] = e.id
                if e.head == t:
                    queue = []
                    break
                queue.append(e.head)
    if t not in seen:
        return None
    chain = []
    v = t
    while v != s:
        e = g.edge(parent[v])
        chain.append(e)
        v = e.tail
    return Path(tuple(reversed(chain)))


def _analyze_one_two_five(work: UnicastInstance) -> SubgraphCases:
    """Classify the working instance into the random-precoding case or one of
    the three cross-connection topologies that need graph modification."""
    s1, s2, s3 = work.sessions
    p2 = edge_disjoint_paths(work.dag, s2.source, s2.terminal, 2)
    if p2 is None:
        raise ConstructionError("working instance lost its two carrier paths")
    reach1 = work.dag.reachable_from(s1.source)
    reach2 = work.dag.reachable_from(s2.source)
    has_down = s2.terminal in reach1  # a path from s1 to t2 exists
    has_up = s1.terminal in reach2  # a path from s2 to t1 exists
    to_t1 = work.dag.reaching_to(s1.terminal)
    if not has_down or not has_up:
        direct = _bfs_path(work.dag, s1.source, s1.terminal)
        assert direct is not None
        return SubgraphCases("case1", work, direct, p2)
    # prefer a direct path that overlaps the carriers: then random coding plus
    # precoding suffices
    for q in p2:
        for e in q.edges:
            if e.tail in reach1 and e.head in to_t1:
                head_part = _bfs_path(work.dag, e.head, s1.terminal)
                tail_part = _bfs_path(work.dag, s1.source, e.tail)
                pieces = (tail_part.edges if tail_part else ()) + (e,) + (
                    head_part.edges if head_part else ()
                )
                return SubgraphCases("case1", work, Path(pieces), p2)
    # case 2: cross connections exist but the direct path cannot meet the
    # carriers; build the minimal subgraph of witnesses
    direct = _bfs_path(work.dag, s1.source, s1.terminal)
    down = _bfs_path(work.dag, s1.source, s2.terminal)
    up = _bfs_path(work.dag, s2.source, s1.terminal)
    assert direct and down and up
    union = set(direct.edge_ids())
    for q in p2:
        union.update(q.edge_ids())
    union.update(down.edge_ids())
    union.update(up.edge_ids())
    gp = work.dag.restricted_to(union)

    def intact(h: Dag) -> bool:
        return (
            s1.terminal in h.reachable_from(s1.source)
            and s2.terminal in h.reachable_from(s1.source)
            and s1.terminal in h.reachable_from(s2.source)
            and (edge_disjoint_paths(h, s2.source, s2.terminal, 2) is not None)
        )

    for e in reversed(gp.topo_edges()):
        trial = gp.without_edges([e.id])
        if intact(trial):
            gp = trial
    p11g = _bfs_path(gp, s1.source, s1.terminal)
    p2g = edge_disjoint_paths(gp, s2.source, s2.terminal, 2)
    downg = _bfs_path(gp, s1.source, s2.terminal)
    upg = _bfs_path(gp, s2.source, s1.terminal)
    assert p11g and p2g and downg and upg
    carrier_ids = set()
    for q in p2g:
        carrier_ids.update(q.edge_ids())
    if set(p11g.edge_ids()) & carrier_ids:
        raise ConstructionError("case analysis is inconsistent: direct path met a carrier")
    seg1 = last_overlap_segment(p11g, [downg])
    seg3 = all_overlap_segments(p11g, [upg])
    seg4 = all_overlap_segments(downg, p2g)
    seg2 = all_overlap_segments(upg, p2g)
    if not (seg1 and seg3 and seg4 and seg2):
        raise ConstructionError("cross-connection subgraph lacks an expected overlap")
    e1 = seg1[0].last
    e3 = seg3[0][0].first
    e4, host4 = seg4[0][0].first, seg4[0][1]
    e2, host2 = seg2[-1][0].last, seg2[-1][1]
    pos1 = p11g.index_of(e1.id)
    pos3 = p11g.index_of(e3.id)
    if pos3 > pos1:
        if host2 == host4:
            carrier = p2g[host2]
            if carrier.index_of(e4.id) <= carrier.index_of(e2.id):
                raise ConstructionError("unexpected carrier order in the type-a subgraph")
            fig = "fig6a"
        else:
            fig = "fig6b"
    else:
        if host2 == host4:
            raise ConstructionError("crossing pattern with a shared carrier (minimality violated)")
        fig = "fig6c"
    return SubgraphCases(
        fig, work, p11g, p2g, gp, downg, upg, e1.id, e2.id, e3.id, e4.id, host2, host4
    )


def find_Gprime(inst: UnicastInstance, target: Sequence[int] = (1, 2, 5)) -> SubgraphCases:
    """Public case analysis: prepare the instance and classify its topology."""
    work, _, _, _ = _prepare(inst, list(target))
    return _analyze_one_two_five(work)


def _blocks_for(
    work: UnicastInstance, vecs: Sequence[tuple[int, ...]], cols: dict[int, int], p: int
) -> list[FieldMatrix]:
    """Per-source blocks (in session order) of stacked edge-basis vectors."""
    out = []
    for sess in work.sessions:
        s_out = {e.id for e in work.dag.out_edges(sess.source)}
        out.append(_take_rows(vecs, cols, s_out, p))
    return out


def _ot5_random_precode(
    work: UnicastInstance,
    info: SubgraphCases,
    p: int,
    seed: int,
    retries: int,
    transcript: list[str],
    details: dict,
) -> dict[int, tuple[int, ...]]:
    """Random coding plus precoders: null the interference at the direct
    terminal, then either kill the wide interference on a clean carrier row
    or align it within the direct session's span, and finally steer the wide
    block outside the interference span at its own terminal."""
    s1, s2, s3 = work.sessions
    t1_in = work.dag.in_edges(s1.terminal)
    t2_in = work.dag.in_edges(s2.terminal)
    t3_in = work.dag.in_edges(s3.terminal)
    if len(t1_in) != 1 or len(t2_in) != 2 or len(t3_in) != 5:
        raise ConstructionError("working instance has unexpected terminal degrees")
    s2_order = sorted(e.id for e in work.dag.out_edges(s2.source))
    s3_order = sorted(e.id for e in work.dag.out_edges(s3.source))
    rng = random.Random(seed)
    for attempt in range(retries):
        trial = _random_internal_rows(work, [e.id for e in work.dag.edges()], p, rng)
        trial[work.dag.out_edges(s1.source)[0].id] = _source_row(work, 0, 0)
        probe = _complete_zero(work, trial, p)
        vec = edge_basis_vectors(work, probe)
        cols = _edge_basis_columns(work)
        b1 = _blocks_for(work, [vec[e.id] for e in t1_in], cols, p)
        b2 = _blocks_for(work, [vec[e.id] for e in t2_in], cols, p)
        b3 = _blocks_for(work, [vec[e.id] for e in t3_in], cols, p)
        alpha1, beta, gamma = b1
        m21, m22, m23 = b2
        m31, m32, m33 = b3
        if alpha1.is_zero() or m22.rank() != 2 or m33.rank() != 5:
            continue
        xi_basis = beta.null_space()
        if m21.is_zero():
            xi = _scan_vectors(xi_basis, lambda v: not (m22 @ v).is_zero())
            if xi is None:
                continue
            mv = m22 @ xi
            istar = 0 if mv.get(0, 0).value else 1
            extra = m23.row(istar)
            tag = "clean-carrier-row"
        else:
            xi = _scan_vectors(
                xi_basis, lambda v: m21.hstack(m22 @ v).rank() == 2
            )
            if xi is None:
                continue
            a1p, a2p = m21.get(0, 0).value, m21.get(1, 0).value
            if a2p != 0:
                rows_ord = (0, 1)
            else:
                rows_ord = (1, 0)
            top, bot = rows_ord
            a_top = m21.get(top, 0).value
            a_bot = m21.get(bot, 0).value
            factor = (a_top * pow(a_bot, p - 2, p)) % p
            extra = m23.row(top) - m23.row(bot).scale(factor)
            tag = "alignment"
        constraints = gamma.vstack(extra)
        theta_basis = constraints.null_space()
        interference = m31.hstack(m32 @ xi)
        i_rank = interference.rank()
        theta = _scan_vectors(
            theta_basis,
            lambda v: interference.hstack(m33 @ v).rank() == i_rank + 1,
        )
        if theta is None:
            continue
        for eid in s2_order:
            k = s2_order.index(eid)
            trial[eid] = _source_row_values(work, 1, [int(xi.a[k, 0])])
        for eid in s3_order:
            k = s3_order.index(eid)
            trial[eid] = _source_row_values(work, 2, [int(theta.a[k, 0])])
        code = _complete_zero(work, trial, p)
        report = verify_decoding(work, code)
        if report.all_decodable:
            transcript.append(
                f"random-precoding branch ({tag}) succeeded on attempt {attempt + 1}"
            )
            details["one_two_five"] = {
                "work": work,
                "case": info.case,
                "branch": tag,
                "theta_constraints": constraints,
                "M33": m33,
                "interference": interference,
                "xi": xi,
            }
            return dict(code.rows)
    raise RetryExhaustedError(
        "one-two-five random precoding (block ranks at the three terminals)", retries
    )


def _ot5_modified(
    work: UnicastInstance,
    info: SubgraphCases,
    p: int,
    seed: int,
    retries: int,
    transcript: list[str],
    details: dict,
) -> dict[int, tuple[int, ...]]:
    """Graph-modification branch for the two crossing topologies: prune the
    carriers, cancel the direct session deterministically at one special
    edge, and precode so each terminal separates."""
    s1, s2, s3 = work.sessions
    p21 = info.carriers2[info.host2]
    p22 = info.carriers2[info.host4]
    if info.host2 == info.host4:
        raise ConstructionError("modified branch expects the cross edges on distinct carriers")
    p3 = edge_disjoint_paths(work.dag, s3.source, s3.terminal, 5)
    assert p3 is not None
    p3_ids = set()
    for q in p3:
        p3_ids.update(q.edge_ids())

    # step 1: drop the tail of the e2-carrier that serves nobody else
    e2_pos = p21.index_of(info.e2)
    step1 = [e.id for e in p21.edges[e2_pos + 1 :] if e.id not in p3_ids]
    g1 = work.dag.without_edges(step1)
    transcript.append(f"modification step 1 removed {len(step1)} carrier-tail edges")

    # step 2: first carrier-2 edge reachable from the direct source
    reach1 = g1.reachable_from(s1.source)
    e_first = None
    for e in p22.edges:
        if e.tail in reach1:
            e_first = e
            break
    if e_first is None:
        raise ConstructionError("no carrier edge reachable from the direct source")

    # step 3: prune downstream of e_first keeping carrier-2 delivery, the wide
    # session's five paths, and the direct path itself
    protect = set(info.direct.edge_ids())
    downstream = {
        e.id
        for e in g1.edges()
        if e.tail in g1.reachable_from(e_first.head)
    }
    removed3 = 0
    for e in reversed(g1.topo_edges()):
        if e.id not in downstream or e.id in protect or not g1.has_edge(e.id):
            continue
        trial = g1.without_edges([e.id])
        if s2.terminal not in trial.reachable_from(e_first.head):
            continue
        if edge_disjoint_paths(trial, s3.source, s3.terminal, 5) is None:
            continue
        g1 = trial
        removed3 += 1
    transcript.append(f"modification step 3 removed {removed3} downstream edges")
    prefix = p22.edges[: p22.index_of(e_first.id) + 1]
    tail_cont = _bfs_path(g1, e_first.head, s2.terminal)
    assert tail_cont is not None
    new_p22 = Path(tuple(prefix) + tail_cont.edges)

    # step 4: the special edge closest to t2 with a source-1-fed side entry
    reach1 = g1.reachable_from(s1.source)
    p22_ids = set(new_p22.edge_ids())
    e_last = None
    e_side = None
    for k in range(len(new_p22.edges) - 1, 0, -1):
        e = new_p22.edges[k]
        for cand in g1.in_edges(e.tail):
            if cand.id not in p22_ids and cand.tail in reach1:
                e_last, e_side = e, cand
                break
        if e_last is not None:
            break
    if e_last is None:
        raise ConstructionError("no cancellation edge found on the carrier")
    k_last = new_p22.index_of(e_last.id)
    transcript.append(
        f"cancellation edge {e_last.id} with side entry {e_side.id};"
        f" carrier tail has {len(new_p22.edges) - k_last} edges"
    )
    frozen = {e.id for e in g1.edges() if e.tail in g1.reachable_from(e_last.tail)}
    last_ins = [x.id for x in g1.in_edges(e_last.tail)]
    if len(last_ins) != 2:
        raise ConstructionError("cancellation edge tail must merge exactly two edges")

    removed_all = {e.id for e in work.dag.edges() if not g1.has_edge(e.id)}
    s2_order = sorted(e.id for e in work.dag.out_edges(s2.source))
    s3_order = sorted(e.id for e in work.dag.out_edges(s3.source))
    t1_in = work.dag.in_edges(s1.terminal)
    t3_in = work.dag.in_edges(s3.terminal)
    rng = random.Random(seed)
    for attempt in range(retries):
        trial = _random_internal_rows(
            work, [e.id for e in g1.edges() if e.id not in frozen], p, rng
        )
        trial[work.dag.out_edges(s1.source)[0].id] = _source_row(work, 0, 0)
        probe = _complete_zero(work, trial, p)
        vec = edge_basis_vectors(work, probe)
        cols = _edge_basis_columns(work)
        side_vecs = [vec[e_side.id], vec[new_p22.edges[k_last - 1].id]]
        tm21, tm22, tm23 = _blocks_for(work, side_vecs, cols, p)
        if tm21.is_zero():
            continue
        # deterministic cancellation of the direct symbol at e_last
        a = tm21.get(1, 0).value
        b = (-tm21.get(0, 0).value) % p
        row = [0, 0]
        row[last_ins.index(e_side.id)] = a
        row[last_ins.index(new_p22.edges[k_last - 1].id)] = b
        trial[e_last.id] = tuple(row)
        trial.update(
            _random_internal_rows(
                work, [eid for eid in frozen if eid != e_last.id], p, rng
            )
        )
        probe = _complete_zero(work, trial, p)
        vec = edge_basis_vectors(work, probe)
        b1 = _blocks_for(work, [vec[e.id] for e in t1_in], cols, p)
        alpha1, beta, gamma = b1
        if alpha1.is_zero():
            continue
        xi_basis = beta.null_space()
        xi = _scan_vectors(xi_basis, lambda v: tm21.hstack(tm22 @ v).rank() == 2)
        if xi is None:
            continue
        # overlap segments of the wide session along the carrier tail
        p3g = edge_disjoint_paths(g1, s3.source, s3.terminal, 5)
        if p3g is None:
            continue
        tail_path = Path(new_p22.edges[k_last:])
        segs = all_overlap_segments(tail_path, p3g)
        if not segs or segs[0][0].first.id != e_last.id:
            raise ConstructionError("cancellation edge must open the first wide-session overlap")
        hosts = [h for _, h in segs]
        if len(set(hosts)) != len(hosts):
            raise ConstructionError("a wide path overlaps the carrier tail twice")
        last_seg, last_host = segs[-1]
        vhat = vec[last_seg.last.id]
        bh1, bh2, bh3 = _blocks_for(work, [vhat], cols, p)
        if not bh1.is_zero():
            raise ConstructionError("direct-session component survived past the cancellation edge")
        if (bh2 @ xi).is_zero():
            continue
        # wide terminal: drop the row that carries the carrier symbol
        carrier_row_edge = p3g[last_host].edges[-1].id
        reduced = [e for e in t3_in if e.id != carrier_row_edge]
        rb1, rb2, rb3 = _blocks_for(work, [vec[e.id] for e in reduced], cols, p)
        constraints = gamma.vstack(bh3)
        theta_basis = constraints.null_space()
        i_rank = rb1.rank()
        theta = _scan_vectors(
            theta_basis, lambda v: rb1.hstack(rb3 @ v).rank() == i_rank + 1
        )
        if theta is None:
            continue
        for eid in s2_order:
            trial[eid] = _source_row_values(work, 1, [int(xi.a[s2_order.index(eid), 0])])
        for eid in s3_order:
            trial[eid] = _source_row_values(work, 2, [int(theta.a[s3_order.index(eid), 0])])
        for eid in removed_all:
            e = work.dag.edge(eid)
            if not work.observed_sessions(e.tail):
                trial[eid] = (0,) * work.dag.in_degree(e.tail)
        code = _complete_zero(work, trial, p)
        report = verify_decoding(work, code)
        if report.all_decodable:
            transcript.append(
                f"modified branch ({info.case}) succeeded on attempt {attempt + 1}"
            )
            details["one_two_five"] = {
                "work": work,
                "case": info.case,
                "branch": "modified",
                "theta_constraints": constraints,
                "M33_reduced": rb3,
                "interference_reduced": rb1,
                "xi": xi,
            }
            return dict(code.rows)
    raise RetryExhaustedError(
        "one-two-five modified branch (cancellation-edge and carrier ranks)", retries
    )


def construct_125(
    inst: UnicastInstance,
    p: int = DEFAULT_MODULUS,
    seed: int = 0,
    retries: int = DEFAULT_RETRIES,
) -> ConstructionResult:
    """Three unit-rate sessions, connectivity dominating [1 2 5]."""
    if len(inst.sessions) != 3 or any(s.rate != 1 for s in inst.sessions):
        raise ConstructionError("this scheme needs three unit-rate sessions")
    conn = connectivity(inst)
    order = _pick_roles(conn, [1, 2, 5])
    if order is None:
        raise ConstructionError(f"connectivity {conn} does not dominate [1 2 5]")
    oriented = UnicastInstance(inst.dag.copy(), [inst.sessions[i] for i in order])
    work, smap, hat, base = _prepare(oriented, [1, 2, 5])
    transcript = [f"[1 2 5] scheme; connectivity {conn}; roles {order}"]
    details: dict = {}
    info = _analyze_one_two_five(work)
    transcript.append(f"topology case: {info.case}")
    if info.case in ("case1", "fig6a"):
        rows = _ot5_random_precode(work, info, p, seed, retries, transcript, details)
    else:
        rows = _ot5_modified(work, info, p, seed, retries, transcript, details)
    result = _lift_and_verify(base, hat, smap, work, rows, p, "125", transcript, details)
    if order != [0, 1, 2]:
        back_sessions = [base.sessions[order.index(i)] for i in range(3)]
        back_inst = UnicastInstance(base.dag.copy(), back_sessions)
        rows_back = embed_rows(
            back_inst, base, result.code.rows, {j: (order[j], 0) for j in range(3)}
        )
        code = _complete_zero(back_inst, rows_back, p)
        report = verify_decoding(back_inst, code)
        assert report.all_decodable
        result = ConstructionResult(
            back_inst, code, "125", report, transcript,
            {i: t.method for i, t in enumerate(report.terminals)}, None, details
        )
    return result


# -- dispatch ------------------------------------------------------------------------


def construct(
    inst: UnicastInstance,
    p: int = DEFAULT_MODULUS,
    seed: int = 0,
    retries: int = DEFAULT_RETRIES,
) -> ConstructionResult:
    """Classify a three-session unit-rate instance and run its scheme."""
    cls = classify(inst)
    if cls.verdict is Verdict.FEASIBLE_ROUTING:
        return construct_routing(inst, p, seed)
    if cls.verdict is Verdict.FEASIBLE_133:
        return construct_133(inst, p, seed, retries)
    if cls.verdict is Verdict.FEASIBLE_224:
        return construct_224(inst, p, seed, retries)
    if cls.verdict is Verdict.FEASIBLE_125:
        return construct_125(inst, p, seed, retries)
    raise NotFeasibleError(
        f"no constructive scheme for verdict {cls.verdict.value}"
        f" (connectivity {cls.connectivity})"
    )
