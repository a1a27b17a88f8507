"""Tiny dense matrices over exact scalars (Fraction, Quad, EScalar).

Sizes are 2x2 and 3x3 throughout; inverses go through the adjugate.
"""

from __future__ import annotations

from fractions import Fraction


class Mat:
    __slots__ = ("rows",)

    def __init__(self, rows):
        self.rows = tuple(tuple(r) for r in rows)

    @property
    def n(self):
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __mul__(self, o):
        if isinstance(o, Mat):
            n = self.n
            return Mat(
                [
                    [
                        _dot(self.rows[i], tuple(o.rows[k][j] for k in range(n)))
                        for j in range(n)
                    ]
                    for i in range(n)
                ]
            )
        return Mat([[x * o for x in r] for r in self.rows])

    def __rmul__(self, o):
        return Mat([[o * x for x in r] for r in self.rows])

    def __add__(self, o):
        return Mat([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, o.rows)])

    def __sub__(self, o):
        return Mat([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, o.rows)])

    def __neg__(self):
        return Mat([[-x for x in r] for r in self.rows])

    def __eq__(self, o):
        return isinstance(o, Mat) and self.rows == o.rows

    def __hash__(self):
        return hash(self.rows)

    def transpose(self):
        n = self.n
        return Mat([[self.rows[j][i] for j in range(n)] for i in range(n)])

    def map(self, f):
        return Mat([[f(x) for x in r] for r in self.rows])

    def conj(self):
        return self.map(lambda x: x.conj())

    def det(self):
        r = self.rows
        if self.n == 1:
            return r[0][0]
        if self.n == 2:
            return r[0][0] * r[1][1] - r[0][1] * r[1][0]
        if self.n == 3:
            return (
                r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1])
                - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
                + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0])
            )
        raise ValueError("only n <= 3")

    def adjugate(self):
        r = self.rows
        if self.n == 2:
            return Mat([[r[1][1], -r[0][1]], [-r[1][0], r[0][0]]])
        if self.n == 3:
            def c(i, j):
                rs = [k for k in range(3) if k != i]
                cs = [k for k in range(3) if k != j]
                m = (
                    r[rs[0]][cs[0]] * r[rs[1]][cs[1]]
                    - r[rs[0]][cs[1]] * r[rs[1]][cs[0]]
                )
                return m if (i + j) % 2 == 0 else -m

            return Mat([[c(j, i) for j in range(3)] for i in range(3)])
        raise ValueError("only n <= 3")

    def inv(self):
        d = self.det()
        if hasattr(d, "is_zero") and d.is_zero() or d == 0:
            raise ZeroDivisionError("singular matrix")
        adj = self.adjugate()
        if hasattr(d, "inv"):
            di = d.inv()
            return adj.map(lambda x: x * di)
        return adj.map(lambda x: x * (Fraction(1) / Fraction(d)) if isinstance(x, (int, Fraction)) else x / d)

    def is_zero(self):
        return all(
            (x.is_zero() if hasattr(x, "is_zero") else x == 0) for r in self.rows for x in r
        )

    def __repr__(self):
        return "[" + "; ".join(", ".join(str(x) for x in r) for r in self.rows) + "]"


def _dot(row, col):
    acc = row[0] * col[0]
    for a, b in zip(row[1:], col[1:]):
        acc = acc + a * b
    return acc


def identity(n, one, zero):
    return Mat([[one if i == j else zero for j in range(n)] for i in range(n)])


def diag(*entries):
    n = len(entries)
    z = entries[0] - entries[0]
    return Mat([[entries[i] if i == j else z for j in range(n)] for i in range(n)])
