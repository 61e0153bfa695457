"""Ground-truth decodability checking.

``verify_decoding`` is certificate-based: a terminal is decodable exactly
when its desired column block has full message rank and is rank-separated
from the interference block.  That certificate implies unique recovery of
the desired symbols for every message assignment, so no sampling is
involved.

``brute_force_linear_feasibility`` decides whether ANY linear code over
GF(p) with T network uses can serve all terminals.  It enumerates, edge
bundle by edge bundle, the row space carried by the bundle (the T x cap
parallel copies of an original edge).  Decodability depends only on these
row spaces, and every reachable combination of row spaces corresponds to at
least one local-coefficient assignment, so searching row spaces is an exact
quotient of the raw coefficient search.  Three sound reductions keep it
small:

* a bundle fed by a single bundle, or by sources/inputs that fit entirely
  within its width, always carries the full available space (more rows at a
  decoder never hurt, and downstream consumers can still select);
* partial assignments are pruned when a terminal can no longer reach its
  desired rank, or already carries more interference rank than its final
  row budget allows;
* completed terminals are checked with the exact certificate.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

from .coding import NetworkCode, propagate, transfer_matrix
from .field import FieldMatrix, is_prime
from .instance import UnicastInstance, time_expand


class BudgetExceededError(Exception):
    pass


@dataclass
class TerminalReport:
    session: int
    terminal: str
    decodable: bool
    method: str  # zero-forcing | alignment | span-exclusion | none
    desired_rank: int
    interference_rank: int


@dataclass
class DecodeReport:
    terminals: list[TerminalReport]

    @property
    def all_decodable(self) -> bool:
        return all(t.decodable for t in self.terminals)

    def __str__(self) -> str:
        lines = []
        for t in self.terminals:
            status = "ok" if t.decodable else "FAIL"
            lines.append(
                f"session {t.session} at {t.terminal}: {status}"
                f" (method={t.method}, desired_rank={t.desired_rank},"
                f" interference_rank={t.interference_rank})"
            )
        return "\n".join(lines)


def verify_decoding(inst: UnicastInstance, code: NetworkCode) -> DecodeReport:
    """Exact per-terminal decodability of a complete code."""
    vectors = propagate(inst, code)
    reports = []
    for i, sess in enumerate(inst.sessions):
        tm = transfer_matrix(inst, code, sess.terminal, basis="symbol", vectors=vectors)
        desired = tm.block(i)
        interference = tm.blocks_except(i)
        d_rank = desired.rank()
        i_rank = interference.rank()
        total = tm.matrix.rank()
        decodable = d_rank == sess.rate and total == d_rank + i_rank
        if not decodable:
            method = "none"
        elif i_rank == 0:
            method = "zero-forcing"
        else:
            nonzero_cols = sum(
                1 for j in range(interference.cols) if not interference.col(j).is_zero()
            )
            method = "alignment" if i_rank < nonzero_cols else "span-exclusion"
        reports.append(TerminalReport(i, sess.terminal, decodable, method, d_rank, i_rank))
    return DecodeReport(reports)


# -- exhaustive linear feasibility ------------------------------------------------


def _rref_rows(rows: Sequence[Sequence[int]], p: int) -> tuple[tuple[int, ...], ...]:
    """Canonical reduced-echelon basis of the span of the given rows."""
    m = [list(r) for r in rows if any(r)]
    if not m:
        return ()
    cols = len(m[0])
    out = []
    r = 0
    for c in range(cols):
        pivot = None
        for i in range(r, len(m)):
            if m[i][c]:
                pivot = i
                break
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = pow(m[r][c], p - 2, p)
        m[r] = [(x * inv) % p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [(x - f * y) % p for x, y in zip(m[i], m[r])]
        r += 1
        if r == len(m):
            break
    for row in m[:r]:
        if any(row):
            out.append(tuple(row))
    return tuple(out)


def _rank(rows: Sequence[Sequence[int]], p: int) -> int:
    return len(_rref_rows(rows, p))


def _rank_cols(rows: Sequence[Sequence[int]], cols: Sequence[int], p: int) -> int:
    return len(_rref_rows([[r[c] for c in cols] for r in rows], p))


def _echelon_coefficient_matrices(d: int, k: int, p: int):
    """All k x d reduced-echelon coefficient matrices over GF(p)."""
    for pivots in itertools.combinations(range(d), k):
        free_cells = []
        for i in range(k):
            for c in range(pivots[i] + 1, d):
                if c not in pivots:
                    free_cells.append((i, c))
        base = [[0] * d for _ in range(k)]
        for i, pc in enumerate(pivots):
            base[i][pc] = 1
        if not free_cells:
            yield tuple(tuple(r) for r in base)
            continue
        for values in itertools.product(range(p), repeat=len(free_cells)):
            mat = [row[:] for row in base]
            for (i, c), v in zip(free_cells, values):
                mat[i][c] = v
            yield tuple(tuple(r) for r in mat)


class _SubspaceEnumerator:
    """Enumerate subspaces (as canonical bases) of a spanned ambient space,
    of dimension at most ``max_dim``, largest dimension first."""

    def __init__(self, p: int):
        self.p = p
        self.cache: dict[tuple, list[tuple]] = {}

    def subspaces(self, ambient: tuple[tuple[int, ...], ...], max_dim: int) -> list[tuple]:
        d = len(ambient)
        key = (ambient, min(max_dim, d))
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        out = []
        p = self.p
        for k in range(min(max_dim, d), -1, -1):
            if k == 0:
                out.append(())
                continue
            for coeff in _echelon_coefficient_matrices(d, k, p):
                rows = []
                width = len(ambient[0])
                for crow in coeff:
                    acc = [0] * width
                    for c, brow in zip(crow, ambient):
                        if c:
                            for idx in range(width):
                                acc[idx] = (acc[idx] + c * brow[idx]) % p
                    rows.append(tuple(acc))
                out.append(_rref_rows(rows, p))
        self.cache[key] = out
        return out


@dataclass
class BruteForceResult:
    feasible: bool
    p: int
    T: int
    witness: Optional[NetworkCode]
    expanded: UnicastInstance
    coefficient_count: int
    nodes_explored: int

    def __str__(self) -> str:
        verdict = "feasible" if self.feasible else "infeasible"
        return (
            f"{verdict} for all linear codes at p={self.p}, T={self.T}"
            f" ({self.coefficient_count} coefficients,"
            f" {self.nodes_explored} search states)"
        )


def coefficient_count(inst: UnicastInstance, T: int) -> int:
    """Local coefficients of the T-expanded, capacity-split instance."""
    total = 0
    for e in inst.dag.edges():
        copies = e.cap * T
        observed = inst.observed_sessions(e.tail)
        if observed:
            row_len = sum(inst.sessions[i].rate for i in observed) * T
        else:
            row_len = sum(e_in.cap for e_in in inst.dag.in_edges(e.tail)) * T
        total += copies * row_len
    return total


DEFAULT_COEFFICIENT_BUDGET = 96


def brute_force_linear_feasibility(
    inst: UnicastInstance,
    p: int,
    T: int = 1,
    budget: int = DEFAULT_COEFFICIENT_BUDGET,
) -> BruteForceResult:
    """Decide feasibility over ALL linear codes at (p, T), exhaustively.

    Refuses (raises BudgetExceededError) when the coefficient count of the
    expanded instance exceeds the budget; it never approximates silently.
    Returns a verified witness code on the T-expanded instance when
    feasible.

    Two further exact reductions on top of the row-space quotient:

    * sessions sharing a terminal are checked as one merged block (a
      terminal decodes each of its sessions iff it decodes them jointly);
    * a source whose sessions all end at one terminal has its message block
      canonicalized: its first enumerated bundle only ranges over one
      subspace per dimension, the second over one per (dimension,
      intersection-dimension) pair, because basis changes of the block map
      solutions to solutions and those invariants classify the orbits.
    """
    if not is_prime(p):
        raise ValueError(f"p must be prime, got {p}")
    inst = inst.normalized()
    n_coeffs = coefficient_count(inst, T)
    if n_coeffs > budget:
        raise BudgetExceededError(
            f"{n_coeffs} coefficients exceeds the enumeration budget of {budget}"
        )
    expanded, copies = time_expand(inst, T)

    g = inst.dag
    sessions = inst.sessions
    offsets_T = expanded.symbol_offsets()
    n_sym = expanded.total_symbols()

    # bundle layout, in topological edge order
    edges = g.topo_edges()
    widths = {e.id: e.cap * T for e in edges}
    symbol_rows: dict[int, tuple] = {}
    for eid in (e.id for e in edges):
        e = g.edge(eid)
        observed = inst.observed_sessions(e.tail)
        if observed:
            rows = []
            for i in observed:
                for j in range(sessions[i].rate * T):
                    row = [0] * n_sym
                    row[offsets_T[i] + j] = 1
                    rows.append(tuple(row))
            symbol_rows[eid] = tuple(rows)

    session_cols = [
        list(range(offsets_T[i], offsets_T[i] + s.rate)) for i, s in enumerate(expanded.sessions)
    ]

    # terminal groups: sessions sharing a terminal decode jointly
    group_of_terminal: dict[str, int] = {}
    groups: list[dict] = []
    for i, s in enumerate(sessions):
        gi = group_of_terminal.get(s.terminal)
        if gi is None:
            gi = len(groups)
            group_of_terminal[s.terminal] = gi
            groups.append(
                {
                    "terminal": s.terminal,
                    "pipes": [e.id for e in g.in_edges(s.terminal)],
                    "cols": [],
                    "m": 0,
                }
            )
        groups[gi]["cols"].extend(session_cols[i])
        groups[gi]["m"] += expanded.sessions[i].rate
    for grp in groups:
        grp["cols"] = sorted(grp["cols"])
        grp["other"] = [c for c in range(n_sym) if c not in grp["cols"]]
        grp["budget_rows"] = sum(widths[eid] for eid in grp["pipes"])
        if not grp["pipes"]:
            return BruteForceResult(False, p, T, None, expanded, n_coeffs, 0)
    pipe_groups: dict[int, list[int]] = {}
    for gi, grp in enumerate(groups):
        for eid in grp["pipes"]:
            pipe_groups.setdefault(eid, []).append(gi)

    # sources whose block may be canonicalized up to a basis change
    source_block: dict[str, list[int]] = {}
    canonical_source: dict[str, bool] = {}
    for node in inst.source_nodes():
        observed = inst.observed_sessions(node)
        cols: list[int] = []
        for i in observed:
            cols.extend(session_cols[i])
        source_block[node] = sorted(cols)
        canonical_source[node] = len({sessions[i].terminal for i in observed}) == 1

    pipe_pos = {e.id: k for k, e in enumerate(edges)}
    enum = _SubspaceEnumerator(p)
    spaces: dict[int, tuple] = {}
    state = {"nodes": 0}
    src_dims: dict[str, list[int]] = {node: [] for node in source_block}

    def unit_rows(cols: Sequence[int]) -> tuple:
        rows = []
        for c in cols:
            row = [0] * n_sym
            row[c] = 1
            rows.append(tuple(row))
        return tuple(rows)

    def ambient_for(eid: int) -> tuple:
        e = g.edge(eid)
        if eid in symbol_rows:
            return symbol_rows[eid]
        rows = []
        for e_in in g.in_edges(e.tail):
            rows.extend(spaces[e_in.id])
        return _rref_rows(rows, p)

    def check_groups(eid: int, k: int) -> bool:
        """True if no terminal group touching this pipe is provably dead."""
        for gi in pipe_groups.get(eid, ()):
            grp = groups[gi]
            rows = []
            remaining = 0
            for pe in grp["pipes"]:
                if pipe_pos[pe] <= k:
                    rows.extend(spaces[pe])
                else:
                    remaining += widths[pe]
            m = grp["m"]
            d_rank = _rank_cols(rows, grp["cols"], p)
            if d_rank + remaining < m:
                return False
            i_rank = _rank_cols(rows, grp["other"], p)
            if i_rank > grp["budget_rows"] - m:
                return False
            if not remaining:
                total = _rank(rows, p)
                if not (d_rank == m and total == d_rank + i_rank):
                    return False
        return True

    def source_candidates(node: str, w: int) -> Optional[list[tuple]]:
        """Canonical orbit representatives for this source's next bundle."""
        if not canonical_source[node]:
            return None
        chosen = src_dims[node]
        cols = source_block[node]
        D = len(cols)
        if len(chosen) == 0:
            return [unit_rows(cols[:d]) for d in range(min(w, D), -1, -1)]
        if len(chosen) == 1:
            d1 = chosen[0]
            reps = []
            for d2 in range(min(w, D), -1, -1):
                for i in range(min(d1, d2), max(0, d1 + d2 - D) - 1, -1):
                    picked = cols[:i] + cols[d1 : d1 + d2 - i]
                    reps.append(unit_rows(picked))
            return reps
        return None  # third bundle of one source: enumerate everything

    def assign(k: int) -> bool:
        if k == len(edges):
            return True
        eid = edges[k].id
        ambient = ambient_for(eid)
        w = widths[eid]
        if len(ambient) <= w:
            # full copy is without loss of generality
            spaces[eid] = ambient
            state["nodes"] += 1
            ok = check_groups(eid, k) and assign(k + 1)
            if not ok:
                del spaces[eid]
            return ok
        node = g.edge(eid).tail
        candidates = source_candidates(node, w) if eid in symbol_rows else None
        tracking = candidates is not None
        if candidates is None:
            candidates = enum.subspaces(ambient, w)
        for sub in candidates:
            spaces[eid] = sub
            if tracking:
                src_dims[node].append(len(sub))
            state["nodes"] += 1
            if check_groups(eid, k) and assign(k + 1):
                return True
            del spaces[eid]
            if tracking:
                src_dims[node].pop()
        return False

    feasible = assign(0)
    witness = None
    if feasible:
        witness = _reconstruct_witness(inst, expanded, copies, spaces, widths, symbol_rows, p, T)
    return BruteForceResult(feasible, p, T, witness, expanded, n_coeffs, state["nodes"])


def _reconstruct_witness(
    inst: UnicastInstance,
    expanded: UnicastInstance,
    copies: dict[int, list[int]],
    spaces: dict[int, tuple],
    widths: dict[int, int],
    symbol_rows: dict[int, tuple],
    p: int,
    T: int,
) -> NetworkCode:
    """Turn a satisfying row-space assignment into explicit local rows on the
    expanded instance, then double-check it with the exact verifier."""
    g = inst.dag
    n_sym = expanded.total_symbols()
    # physical rows per original bundle: chosen basis padded with zero rows
    physical: dict[int, list[tuple[int, ...]]] = {}
    for eid, w in widths.items():
        basis = list(spaces[eid])
        while len(basis) < w:
            basis.append(tuple([0] * n_sym))
        physical[eid] = basis

    rows: dict[int, tuple[int, ...]] = {}
    offsets_T = expanded.symbol_offsets()
    for e in g.edges():
        observed = inst.observed_sessions(e.tail)
        if observed:
            cols = []
            for i in observed:
                cols.extend(range(offsets_T[i], offsets_T[i] + inst.sessions[i].rate * T))
            for j, ce in enumerate(copies[e.id]):
                rows[ce] = tuple(physical[e.id][j][c] for c in cols)
            continue
        in_rows: list[tuple[int, ...]] = []
        for e_in in g.in_edges(e.tail):
            in_rows.extend(physical[e_in.id])
        if not in_rows:
            for ce in copies[e.id]:
                rows[ce] = ()
            continue
        A = FieldMatrix.from_rows(in_rows, p).transpose()
        for j, ce in enumerate(copies[e.id]):
            b = FieldMatrix.column(physical[e.id][j], p)
            x = A.solve(b)
            assert x is not None, "bundle row escaped the span of its inputs"
            rows[ce] = tuple(v[0] for v in x.tolist())
    code = NetworkCode(p, rows)
    report = verify_decoding(expanded, code)
    assert report.all_decodable, "witness reconstruction failed verification"
    return code
