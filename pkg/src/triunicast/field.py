"""Exact linear algebra over a prime field GF(p).

Matrices are dense integer arrays reduced mod p.  All results are exact;
there is no floating point anywhere.  Elimination is deterministic
(leftmost pivot column, first nonzero row) so ranks, null-space bases and
solutions are reproducible across runs.

The default working modulus for code construction is 257; the tiny primes
2, 3 and 5 are used where exhaustive enumeration is wanted.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

DEFAULT_MODULUS = 257


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


class Field:
    """The prime field GF(p)."""

    __slots__ = ("p",)

    def __init__(self, p: int):
        if not is_prime(p):
            raise ValueError(f"field modulus must be prime, got {p}")
        self.p = p

    def element(self, value: int) -> "FieldElement":
        return FieldElement(value % self.p, self.p)

    def elements(self) -> Iterable["FieldElement"]:
        return (FieldElement(v, self.p) for v in range(self.p))

    def __eq__(self, other) -> bool:
        return isinstance(other, Field) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("Field", self.p))

    def __repr__(self) -> str:
        return f"Field({self.p})"


@dataclass(frozen=True)
class FieldElement:
    """A single residue in GF(p)."""

    value: int
    p: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"field modulus must be prime, got {self.p}")
        if not 0 <= self.value < self.p:
            object.__setattr__(self, "value", self.value % self.p)

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.p != self.p:
                raise ValueError("mixed moduli")
            return other
        return FieldElement(int(other) % self.p, self.p)

    def __add__(self, other):
        o = self._coerce(other)
        return FieldElement((self.value + o.value) % self.p, self.p)

    def __sub__(self, other):
        o = self._coerce(other)
        return FieldElement((self.value - o.value) % self.p, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        return FieldElement((self.value * o.value) % self.p, self.p)

    def __neg__(self):
        return FieldElement((-self.value) % self.p, self.p)

    def inverse(self) -> "FieldElement":
        if self.value == 0:
            raise ZeroDivisionError("0 has no inverse")
        return FieldElement(pow(self.value, self.p - 2, self.p), self.p)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __bool__(self) -> bool:
        return self.value != 0

    def __int__(self) -> int:
        return self.value


def _inv_mod(a: int, p: int) -> int:
    return pow(a, p - 2, p)


class FieldMatrix:
    """Dense matrix over GF(p), row major.

    Wraps an int64 numpy array; every public operation keeps entries
    reduced into [0, p).
    """

    __slots__ = ("a", "p")

    def __init__(self, data, p: int):
        if not is_prime(p):
            raise ValueError(f"field modulus must be prime, got {p}")
        a = np.array(data, dtype=np.int64)
        if a.ndim == 1:
            a = a.reshape(1, -1)
        if a.ndim != 2:
            raise ValueError("matrix data must be 2-dimensional")
        self.a = np.mod(a, p)
        self.p = p

    # -- construction helpers -------------------------------------------------

    @classmethod
    def zeros(cls, rows: int, cols: int, p: int) -> "FieldMatrix":
        return cls(np.zeros((rows, cols), dtype=np.int64), p)

    @classmethod
    def identity(cls, n: int, p: int) -> "FieldMatrix":
        return cls(np.eye(n, dtype=np.int64), p)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], p: int) -> "FieldMatrix":
        return cls(np.array([list(r) for r in rows], dtype=np.int64), p)

    @classmethod
    def column(cls, values: Sequence[int], p: int) -> "FieldMatrix":
        return cls(np.array([[int(v)] for v in values], dtype=np.int64), p)

    # -- basic queries ---------------------------------------------------------

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    @property
    def shape(self):
        return self.a.shape

    def get(self, i: int, j: int) -> FieldElement:
        return FieldElement(int(self.a[i, j]), self.p)

    def row(self, i: int) -> "FieldMatrix":
        return FieldMatrix(self.a[i : i + 1, :].copy(), self.p)

    def col(self, j: int) -> "FieldMatrix":
        return FieldMatrix(self.a[:, j : j + 1].copy(), self.p)

    def submatrix(self, row_idx, col_idx) -> "FieldMatrix":
        return FieldMatrix(self.a[np.ix_(list(row_idx), list(col_idx))].copy(), self.p)

    def take_cols(self, col_idx) -> "FieldMatrix":
        return FieldMatrix(self.a[:, list(col_idx)].copy(), self.p)

    def is_zero(self) -> bool:
        return not self.a.any()

    def copy(self) -> "FieldMatrix":
        return FieldMatrix(self.a.copy(), self.p)

    def tolist(self):
        return self.a.tolist()

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FieldMatrix)
            and other.p == self.p
            and other.a.shape == self.a.shape
            and bool((other.a == self.a).all())
        )

    def __hash__(self):
        return hash((self.p, self.a.shape, self.a.tobytes()))

    def __repr__(self) -> str:
        return f"FieldMatrix({self.a.tolist()}, p={self.p})"

    # -- arithmetic ------------------------------------------------------------

    def _check(self, other: "FieldMatrix"):
        if self.p != other.p:
            raise ValueError("mixed moduli")

    def __add__(self, other: "FieldMatrix") -> "FieldMatrix":
        self._check(other)
        return FieldMatrix(self.a + other.a, self.p)

    def __sub__(self, other: "FieldMatrix") -> "FieldMatrix":
        self._check(other)
        return FieldMatrix(self.a - other.a, self.p)

    def __neg__(self) -> "FieldMatrix":
        return FieldMatrix(-self.a, self.p)

    def scale(self, c: int) -> "FieldMatrix":
        return FieldMatrix(self.a * (int(c) % self.p), self.p)

    def __matmul__(self, other: "FieldMatrix") -> "FieldMatrix":
        self._check(other)
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        return FieldMatrix(self.a @ other.a, self.p)

    def transpose(self) -> "FieldMatrix":
        return FieldMatrix(self.a.T.copy(), self.p)

    def hstack(self, other: "FieldMatrix") -> "FieldMatrix":
        self._check(other)
        return FieldMatrix(np.hstack([self.a, other.a]), self.p)

    def vstack(self, other: "FieldMatrix") -> "FieldMatrix":
        self._check(other)
        return FieldMatrix(np.vstack([self.a, other.a]), self.p)

    # -- elimination -----------------------------------------------------------

    def rref(self):
        """Reduced row echelon form.

        Returns (R, pivot_cols).  Deterministic: pivots are chosen at the
        leftmost unfinished column using the first row with a nonzero entry.
        """
        p = self.p
        m = self.a.copy()
        rows, cols = m.shape
        pivots = []
        r = 0
        for c in range(cols):
            if r == rows:
                break
            nz = np.nonzero(m[r:, c])[0]
            if nz.size == 0:
                continue
            i = r + int(nz[0])
            if i != r:
                m[[r, i]] = m[[i, r]]
            inv = _inv_mod(int(m[r, c]), p)
            m[r] = (m[r] * inv) % p
            for j in range(rows):
                if j != r and m[j, c]:
                    m[j] = (m[j] - m[j, c] * m[r]) % p
            pivots.append(c)
            r += 1
        return FieldMatrix(m, p), pivots

    def rank(self) -> int:
        _, pivots = self.rref()
        return len(pivots)

    def det(self) -> int:
        if self.rows != self.cols:
            raise ValueError("determinant of non-square matrix")
        p = self.p
        m = self.a.copy()
        n = self.rows
        det = 1
        for c in range(n):
            nz = np.nonzero(m[c:, c])[0]
            if nz.size == 0:
                return 0
            i = c + int(nz[0])
            if i != c:
                m[[c, i]] = m[[i, c]]
                det = (-det) % p
            det = (det * int(m[c, c])) % p
            inv = _inv_mod(int(m[c, c]), p)
            for j in range(c + 1, n):
                if m[j, c]:
                    m[j] = (m[j] - m[j, c] * inv * m[c]) % p
        return det

    def null_space(self) -> "FieldMatrix":
        """Basis of {x : self @ x = 0}, returned as columns.

        Basis size is always cols - rank.
        """
        R, pivots = self.rref()
        free = [c for c in range(self.cols) if c not in pivots]
        basis = np.zeros((self.cols, len(free)), dtype=np.int64)
        for k, fc in enumerate(free):
            basis[fc, k] = 1
            for r, pc in enumerate(pivots):
                basis[pc, k] = (-int(R.a[r, fc])) % self.p
        return FieldMatrix(basis, self.p)

    def solve(self, b: "FieldMatrix"):
        """One solution x of self @ x = b, or None if inconsistent."""
        self._check(b)
        if b.rows != self.rows:
            raise ValueError("right-hand side row count mismatch")
        aug = self.hstack(b)
        R, pivots = aug.rref()
        n = self.cols
        # a pivot in the right-hand block means an inconsistent row
        if any(c >= n for c in pivots):
            return None
        x = np.zeros((n, b.cols), dtype=np.int64)
        for r, pc in enumerate(pivots):
            x[pc] = R.a[r, n:]
        return FieldMatrix(x, self.p)


# Spec-level operation aliases; the methods above are the implementation.


def rank(m: FieldMatrix) -> int:
    return m.rank()


def null_space(m: FieldMatrix) -> FieldMatrix:
    return m.null_space()


def solve(a: FieldMatrix, b: FieldMatrix):
    return a.solve(b)


def enumerate_vectors(length: int, p: int, include_zero: bool = False):
    """All column vectors of the given length over GF(p), odometer order."""
    vec = [0] * length
    if include_zero:
        yield list(vec)
    total = p**length
    for _ in range(total - 1):
        i = length - 1
        while True:
            vec[i] += 1
            if vec[i] < p:
                break
            vec[i] = 0
            i -= 1
        yield list(vec)
