"""Exact dense linear algebra over any field with +,-,*,/ and == 0.

Used with Fraction, Quad and RatFn coefficients. Everything is plain
Gaussian elimination; sizes in this package are tiny (dim <= a few hundred).
"""

from __future__ import annotations

from fractions import Fraction


def _is_zero(x):
    return x == 0 or (hasattr(x, "is_zero") and x.is_zero())


def solve(A, b):
    """Solve A x = b exactly. A: list of rows, b: list.

    Returns one solution (free variables set to 0) or None if inconsistent.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    M = [list(A[i]) + [b[i]] for i in range(m)]
    pivots = []
    row = 0
    for col in range(n):
        piv = None
        for r in range(row, m):
            if not _is_zero(M[r][col]):
                piv = r
                break
        if piv is None:
            continue
        M[row], M[piv] = M[piv], M[row]
        inv = M[row][col]
        M[row] = [x / inv for x in M[row]]
        for r in range(m):
            if r != row and not _is_zero(M[r][col]):
                f = M[r][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[row])]
        pivots.append(col)
        row += 1
        if row == m:
            break
    for r in range(row, m):
        if not _is_zero(M[r][n]):
            return None
    zero = A[0][0] - A[0][0] if m and n else Fraction(0)
    x = [zero for _ in range(n)]
    for r, col in enumerate(pivots):
        x[col] = M[r][n]
    return x


def nullspace(A):
    """Basis of the right kernel of A (list of rows). Exact."""
    m = len(A)
    n = len(A[0]) if m else 0
    M = [list(row) for row in A]
    pivots = []
    row = 0
    for col in range(n):
        piv = None
        for r in range(row, m):
            if not _is_zero(M[r][col]):
                piv = r
                break
        if piv is None:
            continue
        M[row], M[piv] = M[piv], M[row]
        inv = M[row][col]
        M[row] = [x / inv for x in M[row]]
        for r in range(m):
            if r != row and not _is_zero(M[r][col]):
                f = M[r][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[row])]
        pivots.append(col)
        row += 1
        if row == m:
            break
    one = None
    for r in M:
        for x in r:
            if not _is_zero(x):
                one = x / x
                break
        if one is not None:
            break
    if one is None:
        one = Fraction(1)
    zero = one - one
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [zero] * n
        v[fc] = one
        for r, pc in enumerate(pivots):
            v[pc] = -M[r][fc]
        basis.append(v)
    return basis


def rank(A):
    if not A:
        return 0
    return len(A[0]) - len(nullspace(A))


def in_span(vectors, target):
    """Is `target` in the span of `vectors` (each a list)? Exact."""
    if not vectors:
        return all(_is_zero(t) for t in target)
    n = len(target)
    A = [[vectors[j][i] for j in range(len(vectors))] for i in range(n)]
    return solve(A, list(target)) is not None


class SpanChecker:
    """Row-reduced span with O(rank * dim) membership tests."""

    def __init__(self, vectors):
        self.rows = []
        self.pivots = []
        for v in vectors:
            self.add(list(v))

    def add(self, v):
        v = self._reduce(v)
        for i, x in enumerate(v):
            if not _is_zero(x):
                inv = x
                v = [y / inv for y in v]
                # keep rows sorted by pivot
                k = 0
                while k < len(self.pivots) and self.pivots[k] < i:
                    k += 1
                self.rows.insert(k, v)
                self.pivots.insert(k, i)
                return True
        return False

    def _reduce(self, v):
        v = list(v)
        for row, p in zip(self.rows, self.pivots):
            if not _is_zero(v[p]):
                f = v[p]
                v = [a - f * b for a, b in zip(v, row)]
        return v

    def contains(self, v):
        return all(_is_zero(x) for x in self._reduce(v))

    @property
    def rank(self):
        return len(self.rows)


def row_reduce_basis(vectors):
    """Reduced basis of the span of `vectors`; rows in echelon form."""
    M = [list(v) for v in vectors if any(not _is_zero(x) for x in v)]
    if not M:
        return []
    n = len(M[0])
    out = []
    row = 0
    for col in range(n):
        piv = None
        for r in range(row, len(M)):
            if not _is_zero(M[r][col]):
                piv = r
                break
        if piv is None:
            continue
        M[row], M[piv] = M[piv], M[row]
        inv = M[row][col]
        M[row] = [x / inv for x in M[row]]
        for r in range(len(M)):
            if r != row and not _is_zero(M[r][col]):
                f = M[r][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[row])]
        out.append(list(M[row]))
        row += 1
        if row == len(M):
            break
    return out
