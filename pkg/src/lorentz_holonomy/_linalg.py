"""Exact linear algebra over the rationals (small dense matrices, Fractions)."""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Vector = list
Matrix = list


def frac_matrix(rows) -> Matrix:
    return [[Fraction(x) for x in row] for row in rows]


def identity(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    bt = list(zip(*b))
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt] for row in a]


def transpose(a: Matrix) -> Matrix:
    return [list(r) for r in zip(*a)]


def matsub(a: Matrix, b: Matrix) -> Matrix:
    return [[x - y for x, y in zip(r, s)] for r, s in zip(a, b)]


def matadd(a: Matrix, b: Matrix) -> Matrix:
    return [[x + y for x, y in zip(r, s)] for r, s in zip(a, b)]


def matscale(a: Matrix, c) -> Matrix:
    return [[x * c for x in r] for r in a]


def is_zero_matrix(a: Matrix) -> bool:
    return all(x == 0 for r in a for x in r)


def inverse(a: Matrix) -> Matrix:
    """Gauss-Jordan inverse; raises ZeroDivisionError if singular."""
    n = len(a)
    aug = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(a)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


class SpanBasis:
    """Incrementally maintained row-echelon basis of a subspace of Q^d.

    Rows are kept fully reduced with pivot entries equal to one, so membership
    and coordinates are read off by elimination.  Pivot choice is the first
    nonzero column, which makes the reduced basis deterministic.
    """

    def __init__(self, dim: int):
        self.dim = dim
        self.rows: list[list[Fraction]] = []
        self.pivots: list[int] = []

    def __len__(self) -> int:
        return len(self.rows)

    def reduce(self, vec: Sequence) -> list[Fraction]:
        r = [Fraction(x) for x in vec]
        for row, p in zip(self.rows, self.pivots):
            c = r[p]
            if c:
                r = [x - c * y for x, y in zip(r, row)]
        return r

    def add(self, vec: Sequence) -> bool:
        """Insert ``vec``; return True if it enlarged the span."""
        r = self.reduce(vec)
        p = next((i for i, x in enumerate(r) if x != 0), None)
        if p is None:
            return False
        inv = 1 / r[p]
        r = [x * inv for x in r]
        for k, row in enumerate(self.rows):
            c = row[p]
            if c:
                self.rows[k] = [x - c * y for x, y in zip(row, r)]
        pos = 0
        while pos < len(self.pivots) and self.pivots[pos] < p:
            pos += 1
        self.rows.insert(pos, r)
        self.pivots.insert(pos, p)
        return True

    def contains(self, vec: Sequence) -> bool:
        return all(x == 0 for x in self.reduce(vec))

    def coordinates(self, vec: Sequence) -> list[Fraction] | None:
        """Coefficients of ``vec`` in terms of ``self.rows`` (None if outside)."""
        r = self.reduce(vec)
        if any(x != 0 for x in r):
            return None
        return [Fraction(vec[p]) for p in self.pivots]

    def same_span(self, other: "SpanBasis") -> bool:
        return self.pivots == other.pivots and self.rows == other.rows


def row_basis(vectors, dim: int) -> SpanBasis:
    b = SpanBasis(dim)
    for v in vectors:
        b.add(v)
    return b


def solve_coordinates(basis: Sequence[Sequence], vec: Sequence) -> list[Fraction] | None:
    """Coefficients c with sum c_i basis[i] = vec, for a linearly independent basis."""
    m = len(basis)
    if m == 0:
        return [] if all(x == 0 for x in vec) else None
    d = len(vec)
    # augmented system, columns = basis vectors
    rows = [[Fraction(basis[i][k]) for i in range(m)] + [Fraction(vec[k])] for k in range(d)]
    piv_cols = []
    r = 0
    for col in range(m):
        piv = next((i for i in range(r, d) if rows[i][col] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][col]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(d):
            if i != r and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        piv_cols.append(col)
        r += 1
    if any(rows[i][m] != 0 for i in range(r, d)):
        return None
    out = [Fraction(0)] * m
    for i, col in enumerate(piv_cols):
        out[col] = rows[i][m]
    return out


def nullspace(a: Matrix) -> list[list[Fraction]]:
    """Basis of {x : a x = 0}."""
    if not a:
        return []
    rows = [list(map(Fraction, r)) for r in a]
    ncols = len(rows[0])
    pivots = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][col] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][col]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    free = [c for c in range(ncols) if c not in pivots]
    out = []
    for fcol in free:
        x = [Fraction(0)] * ncols
        x[fcol] = Fraction(1)
        for i, pc in enumerate(pivots):
            x[pc] = -rows[i][fcol]
        out.append(x)
    return out
