"""Schwartz functions on Q_l^2 as rational combinations of lattice cosets.

A term is (coeff, v, M): coeff * indicator of the coset v + Z^2 M, with v a
rational row vector and M an invertible rational 2x2 matrix (rows span the
lattice). The right GL_2(Q_l)-translation action (gamma . phi)(x) =
phi(x gamma) maps terms to terms, so group and Hecke actions are cheap;
equality and linear algebra go through refinement to a finite class grid
l^{-neg} Z^2 / l^{pos} Z^2, which is canonical and exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exactnum import lval
from .matrices import Mat


def _vec_mul(v, M: Mat):
    return (
        v[0] * M[0, 0] + v[1] * M[1, 0],
        v[0] * M[0, 1] + v[1] * M[1, 1],
    )


@dataclass(frozen=True)
class SchwartzFn:
    ell: int
    terms: tuple  # of (coeff: Fraction, v: (Fraction, Fraction), M: Mat)

    # -- constructors --------------------------------------------------------
    @staticmethod
    def zero(ell: int) -> "SchwartzFn":
        return SchwartzFn(ell, ())

    @staticmethod
    def lattice(ell: int, coeff, v, M: Mat) -> "SchwartzFn":
        return SchwartzFn(ell, ((Fraction(coeff), (Fraction(v[0]), Fraction(v[1])), M),))

    @staticmethod
    def phi0(ell: int) -> "SchwartzFn":
        return SchwartzFn.lattice(ell, 1, (0, 0), _diag(1, 1))

    @staticmethod
    def phi1t(ell: int, t: int) -> "SchwartzFn":
        """ch(l^t Z_l x (1 + l^t Z_l))."""
        lt = Fraction(ell) ** t
        return SchwartzFn.lattice(ell, 1, (0, 1), _diag(lt, lt))

    @staticmethod
    def phit(ell: int, t: int) -> "SchwartzFn":
        """ch(l^t Z_l x Z_l^*)."""
        lt = Fraction(ell) ** t
        a = SchwartzFn.lattice(ell, 1, (0, 0), _diag(lt, 1))
        b = SchwartzFn.lattice(ell, 1, (0, 0), _diag(lt, ell))
        return a - b

    # -- linear structure ----------------------------------------------------
    def __add__(self, o: "SchwartzFn") -> "SchwartzFn":
        return SchwartzFn(self.ell, self.terms + o.terms)

    def __sub__(self, o: "SchwartzFn") -> "SchwartzFn":
        return self + o.scale(-1)

    def scale(self, c) -> "SchwartzFn":
        c = Fraction(c)
        if c == 0:
            return SchwartzFn.zero(self.ell)
        return SchwartzFn(self.ell, tuple((c * t[0], t[1], t[2]) for t in self.terms))

    # -- actions ---------------------------------------------------------
    def translate(self, gamma: Mat) -> "SchwartzFn":
        """(gamma . phi)(x) = phi(x gamma)."""
        gi = gamma.inv()
        return SchwartzFn(
            self.ell,
            tuple((c, _vec_mul(v, gi), M * gi) for c, v, M in self.terms),
        )

    def scale_arg(self, a) -> "SchwartzFn":
        """phi(a * x) for a scalar a (the A-torus action)."""
        return self.translate(_diag(Fraction(a), Fraction(a)))

    def value(self, x) -> Fraction:
        out = Fraction(0)
        for c, v, M in self.terms:
            w = (x[0] - v[0], x[1] - v[1])
            z = _vec_mul(w, M.inv())
            if lval(z[0], self.ell) >= 0 and lval(z[1], self.ell) >= 0:
                out += c
        return out

    # -- canonical grid ----------------------------------------------------
    def window(self):
        """(neg, pos): support in l^-neg Z^2, invariance under l^pos Z^2."""
        ell = self.ell
        neg = 0
        pos = 0
        for c, v, M in self.terms:
            vb = min(
                min(lval(v[0], ell), lval(v[1], ell)),
                min(lval(M[i, j], ell) for i in range(2) for j in range(2)),
            )
            neg = max(neg, -min(vb, 0))
            Mi = M.inv()
            u = -min(lval(Mi[i, j], ell) for i in range(2) for j in range(2))
            pos = max(pos, u)
        return neg, pos

    def grid(self, neg: int = None, pos: int = None) -> dict:
        """Values on the classes of l^-neg Z^2 / l^pos Z^2 (sparse dict).

        Keys are integer pairs (i, j) for the class l^-neg (i, j) + l^pos Z^2.
        """
        ell = self.ell
        n0, p0 = self.window()
        neg = n0 if neg is None else neg
        pos = p0 if pos is None else pos
        if neg < n0 or pos < p0:
            raise ValueError(f"window ({neg},{pos}) too small for ({n0},{p0})")
        k = neg + pos
        mod = ell**k
        sc = Fraction(ell) ** (-neg)
        out = {}
        for i in range(mod):
            for j in range(mod):
                x = (i * sc, j * sc)
                val = self.value(x)
                if val:
                    out[(i, j)] = val
        return out

    def canonical(self):
        neg, pos = self.window()
        return (neg, pos, tuple(sorted(self.grid(neg, pos).items())))

    def __eq__(self, o):
        if not isinstance(o, SchwartzFn) or self.ell != o.ell:
            return NotImplemented
        n1, p1 = self.window()
        n2, p2 = o.window()
        neg, pos = max(n1, n2), max(p1, p2)
        return self.grid(neg, pos) == o.grid(neg, pos)

    def __hash__(self):
        return hash(self.canonical())

    def is_zero(self) -> bool:
        neg, pos = self.window()
        return not self.grid(neg, pos)

    # -- invariance tests --------------------------------------------------
    def is_a0_invariant(self) -> bool:
        """Invariance under scaling by Z_l^* (the A(Z_l)-action)."""
        ell = self.ell
        neg, pos = self.window()
        depth = neg + pos
        for u in range(2, ell ** min(depth, 2)):
            if u % ell == 0:
                continue
            if not (self.scale_arg(u) == self):
                return False
        return True

    def is_k_invariant(self) -> bool:
        ell = self.ell
        gens = [
            Mat([[Fraction(0), Fraction(1)], [Fraction(-1), Fraction(0)]]),
            Mat([[Fraction(1), Fraction(1)], [Fraction(0), Fraction(1)]]),
        ]
        neg, pos = self.window()
        for u in range(2, ell ** min(neg + pos, 2)):
            if u % ell:
                gens.append(_diag(Fraction(u), Fraction(1)))
        return all(self.translate(g) == self for g in gens)

    def stab_gamma(self, gamma: Mat) -> bool:
        """Does gamma fix this function under the right-translation action?"""
        return self.translate(gamma) == self

    @property
    def depth(self) -> int:
        neg, pos = self.window()
        return neg + pos


def _diag(a, b) -> Mat:
    return Mat([[Fraction(a), Fraction(0)], [Fraction(0), Fraction(b)]])
