"""Exact scalar arithmetic: l-adic valuations of rationals, the quadratic
etale algebra E (x) Q_l, and its two concrete models.

Every scalar in the package is built from `Fraction`; there is no floating
point anywhere. The imaginary quadratic field E = Q(sqrt(-disc)) is modeled
by `Quad` (a + b*delta with delta^2 = -disc). An element of E (x) Q_l is an
`EScalar`:

  * split l:  an ordered pair (x_w, x_wbar) of Quad coordinates (usually
    plain rationals); conjugation swaps the pair, Norm is the product.
  * inert l:  a single Quad a + b*delta; conjugation negates b, the
    valuation is normalized so val(l) = 1, i.e. 2*val = val_l(Norm).

Valuations are computed by factoring powers of l out of numerator and
denominator; val(0) is the +infinity sentinel `INF`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import inf as INF


class ConsistencyError(ArithmeticError):
    """An internal cross-check failed (e.g. inert valuation vs norm)."""


def lval(x, ell: int):
    """l-adic valuation of a rational; INF for zero."""
    x = Fraction(x)
    if x == 0:
        return INF
    v = 0
    n = x.numerator
    while n % ell == 0:
        n //= ell
        v += 1
    d = x.denominator
    while d % ell == 0:
        d //= ell
        v -= 1
    return v


def lunit_part(x, ell: int) -> Fraction:
    """u with x = l^val * u, u an l-unit. x must be nonzero."""
    v = lval(x, ell)
    return Fraction(x) / Fraction(ell) ** v


def reduce_mod_power(x, ell: int, e: int) -> Fraction:
    """Canonical representative of x modulo l^e * Z_(l).

    Representatives are l^v * c with c an integer in [0, l^(e-v)) prime to l
    (or 0). Two rationals are congruent mod l^e Z_l iff their representatives
    coincide; this is the normal form used by the coset canonicalizer.
    """
    x = Fraction(x)
    v = lval(x, ell)
    if v >= e:
        return Fraction(0)
    u = lunit_part(x, ell)
    m = ell ** (e - v)
    c = (u.numerator * pow(u.denominator, -1, m)) % m
    return Fraction(ell) ** v * c


def kronecker_minus_disc(disc_abs: int, ell: int) -> int:
    """Kronecker symbol (disc / ell) for the fundamental discriminant -disc_abs.

    +1 split, -1 inert, 0 ramified.
    """
    d = -disc_abs
    if ell == 2:
        r = d % 8
        if r == 1:
            return 1
        if r == 5:
            return -1
        return 0
    if d % ell == 0:
        return 0
    return pow(d % ell, (ell - 1) // 2, ell) == 1 and 1 or -1


def hensel_sqrt_minus(disc_abs: int, ell: int, k: int) -> int:
    """r with r^2 = -disc_abs mod ell^k, for split ell; canonical choice.

    This pins the place w: the w-adic embedding sends delta to the l-adic
    root congruent to these lifts. For odd ell the root with the smaller
    residue mod ell is chosen; at ell = 2 the branch with r = 1 mod 4.
    """
    if ell == 2:
        if (-disc_abs) % 8 != 1:
            raise ValueError(f"-{disc_abs} has no 2-adic square root")
        r = 1
        for j in range(3, k):
            if (r * r + disc_abs) % (1 << (j + 1)):
                r += 1 << (j - 1)
        return r % (1 << k)
    a = (-disc_abs) % ell
    r0 = None
    for r in range(ell):
        if (r * r - a) % ell == 0:
            r0 = r
            break
    if r0 is None or r0 == 0:
        raise ValueError(f"-{disc_abs} is not a unit square mod {ell}")
    r0 = min(r0, ell - r0)
    m = ell
    r = r0
    while m < ell**k:
        m_next = min(m * m, ell**k)
        # Newton: r <- r - (r^2 + disc)/ (2r) mod m_next
        inv = pow(2 * r % m_next, -1, m_next)
        r = (r - (r * r + disc_abs) * inv) % m_next
        m = m_next
    r %= ell**k
    if (r * r + disc_abs) % ell**k != 0:
        raise ArithmeticError("Hensel lift failed")
    return r


def val_w_split(x: Quad, ell: int):
    """Valuation of x at the pinned place w over a split odd l.

    Computed as val_l(a + b*r_N) for a Hensel root r_N of x^2 + disc with N
    beyond val_l(Norm x), which bounds the valuation.
    """
    if x.is_zero():
        return INF
    vn = lval(x.norm(), ell)
    N = max(vn + 2, 2)
    scale = -min(lval(x.a, ell) if x.a else 0, lval(x.b, ell) if x.b else 0, 0)
    N += 2 * scale
    r = hensel_sqrt_minus(x.disc, ell, N)
    v = lval(x.a + x.b * r, ell)
    if v >= N:
        # valuation saturated the precision: must be the conjugate place carrying it all
        v = vn - lval(x.a - x.b * r, ell)
    return v


def squarefree(n: int) -> bool:
    k = 2
    while k * k <= n:
        if n % (k * k) == 0:
            return False
        k += 1
    return True


def disc_from_radicand(d0: int) -> int:
    """|discriminant| of Q(sqrt(-d0)) for squarefree d0 > 0."""
    if d0 <= 0 or not squarefree(d0):
        raise ValueError(f"radicand must be a positive squarefree integer, got {d0}")
    return d0 if d0 % 4 == 3 else 4 * d0


@dataclass(frozen=True)
class Quad:
    """a + b*delta in Q(delta), delta^2 = -disc. Exact field arithmetic."""

    a: Fraction
    b: Fraction
    disc: int

    @staticmethod
    def of(x, disc: int) -> "Quad":
        if isinstance(x, Quad):
            if x.disc != disc:
                raise ValueError("mixed discriminants")
            return x
        return Quad(Fraction(x), Fraction(0), disc)

    def _chk(self, o: "Quad"):
        if self.disc != o.disc:
            raise ValueError("mixed discriminants")

    def __add__(self, o):
        o = Quad.of(o, self.disc)
        return Quad(self.a + o.a, self.b + o.b, self.disc)

    __radd__ = __add__

    def __neg__(self):
        return Quad(-self.a, -self.b, self.disc)

    def __sub__(self, o):
        return self + (-Quad.of(o, self.disc))

    def __rsub__(self, o):
        return Quad.of(o, self.disc) - self

    def __mul__(self, o):
        o = Quad.of(o, self.disc)
        return Quad(
            self.a * o.a - self.disc * self.b * o.b,
            self.a * o.b + self.b * o.a,
            self.disc,
        )

    __rmul__ = __mul__

    def conj(self) -> "Quad":
        return Quad(self.a, -self.b, self.disc)

    def norm(self) -> Fraction:
        return self.a * self.a + self.disc * self.b * self.b

    def inv(self) -> "Quad":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero Quad")
        return Quad(self.a / n, -self.b / n, self.disc)

    def __truediv__(self, o):
        return self * Quad.of(o, self.disc).inv()

    def __rtruediv__(self, o):
        return Quad.of(o, self.disc) / self

    def __eq__(self, o):
        if isinstance(o, Quad):
            return self.a == o.a and self.b == o.b and self.disc == o.disc
        if isinstance(o, (int, Fraction)):
            return self.b == 0 and self.a == o
        return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b, self.disc))

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_rational(self) -> bool:
        return self.b == 0

    def rational(self) -> Fraction:
        if self.b != 0:
            raise ValueError(f"{self} is not rational")
        return self.a

    def val_inert(self, ell: int):
        """Valuation at an inert l (l odd, l not dividing disc); val(l) = 1.

        Cross-checked against (1/2) val_l(Norm); a mismatch means the prime
        is not actually inert for this discriminant and raises.
        """
        if self.is_zero():
            return INF
        if ell == 2 or self.disc % ell == 0:
            raise ValueError(f"l={ell} not admissible for inert valuation (disc {self.disc})")
        v = min(lval(self.a, ell), lval(self.b, ell))
        vn = lval(self.norm(), ell)
        if 2 * v != vn:
            raise ConsistencyError(
                f"inert valuation check failed for {self}: min-coordinate val {v} "
                f"but val(Norm)/2 = {Fraction(vn, 2)}; l={ell} is not inert here"
            )
        return v

    def __repr__(self):
        if self.b == 0:
            return f"{self.a}"
        return f"({self.a}+{self.b}d)"


SPLIT = "split"
INERT = "inert"


@dataclass(frozen=True)
class EScalar:
    """Element of E (x) Q_l. place 'split': (x_w, x_wbar); 'inert': a + b*delta."""

    place: str
    u: Quad
    v: Quad | None  # second split coordinate; None when inert

    @staticmethod
    def split_pair(x, y, disc: int) -> "EScalar":
        return EScalar(SPLIT, Quad.of(Fraction(x) if not isinstance(x, Quad) else x, disc),
                       Quad.of(Fraction(y) if not isinstance(y, Quad) else y, disc))

    @staticmethod
    def inert_ab(a, b, disc: int) -> "EScalar":
        return EScalar(INERT, Quad(Fraction(a), Fraction(b), disc), None)

    @staticmethod
    def from_quad(q: Quad, place: str) -> "EScalar":
        """The image of q in E (x) Q_l: split -> (q, conj q), inert -> q."""
        if place == SPLIT:
            return EScalar(SPLIT, q, q.conj())
        return EScalar(INERT, q, None)

    @staticmethod
    def rational(x, place: str, disc: int) -> "EScalar":
        q = Quad.of(Fraction(x), disc)
        return EScalar(SPLIT, q, q) if place == SPLIT else EScalar(INERT, q, None)

    @property
    def disc(self) -> int:
        return self.u.disc

    def _chk(self, o: "EScalar"):
        if self.place != o.place or self.disc != o.disc:
            raise ValueError("mixed EScalar contexts")

    def __add__(self, o):
        if not isinstance(o, EScalar):
            o = EScalar.rational(o, self.place, self.disc)
        self._chk(o)
        if self.place == SPLIT:
            return EScalar(SPLIT, self.u + o.u, self.v + o.v)
        return EScalar(INERT, self.u + o.u, None)

    __radd__ = __add__

    def __neg__(self):
        return EScalar(self.place, -self.u, -self.v if self.v is not None else None)

    def __sub__(self, o):
        if not isinstance(o, EScalar):
            o = EScalar.rational(o, self.place, self.disc)
        return self + (-o)

    def __rsub__(self, o):
        return EScalar.rational(o, self.place, self.disc) - self

    def __mul__(self, o):
        if not isinstance(o, EScalar):
            o = EScalar.rational(o, self.place, self.disc)
        self._chk(o)
        if self.place == SPLIT:
            return EScalar(SPLIT, self.u * o.u, self.v * o.v)
        return EScalar(INERT, self.u * o.u, None)

    __rmul__ = __mul__

    def inv(self) -> "EScalar":
        if self.place == SPLIT:
            return EScalar(SPLIT, self.u.inv(), self.v.inv())
        return EScalar(INERT, self.u.inv(), None)

    def __truediv__(self, o):
        if not isinstance(o, EScalar):
            o = EScalar.rational(o, self.place, self.disc)
        return self * o.inv()

    def conj(self) -> "EScalar":
        if self.place == SPLIT:
            return EScalar(SPLIT, self.v, self.u)
        return EScalar(INERT, self.u.conj(), None)

    def norm_quad(self) -> Quad:
        if self.place == SPLIT:
            return self.u * self.v
        return Quad.of(self.u.norm(), self.disc)

    def norm(self) -> Fraction:
        """Norm to Q_l; requires the result to be rational."""
        return self.norm_quad().rational()

    def is_zero(self) -> bool:
        if self.place == SPLIT:
            return self.u.is_zero() and self.v.is_zero()
        return self.u.is_zero()

    def __eq__(self, o):
        if isinstance(o, EScalar):
            return (self.place == o.place and self.u == o.u and self.v == o.v)
        if isinstance(o, (int, Fraction)):
            return self == EScalar.rational(o, self.place, self.disc)
        return NotImplemented

    def __hash__(self):
        return hash((self.place, self.u, self.v))

    def vals(self, ell: int):
        """Place-wise valuations: split (v_w, v_wbar); inert a single value."""
        if self.place == SPLIT:
            return (lval(self.u.rational(), ell), lval(self.v.rational(), ell))
        return (self.u.val_inert(ell),)

    def __repr__(self):
        if self.place == SPLIT:
            return f"({self.u},{self.v})"
        return repr(self.u)


def delta_scalar(place: str, disc: int) -> EScalar:
    """The element delta = sqrt(-disc) of E (x) Q_l.

    Split coordinates of delta are the two square roots of -disc in Q_l,
    which are not rational; they are carried formally as Quad coordinates
    (d, -d). All group identities stay exact in this model.
    """
    d = Quad(Fraction(0), Fraction(1), disc)
    if place == SPLIT:
        return EScalar(SPLIT, d, -d)
    return EScalar(INERT, d, None)


def epsilon_scalar(place: str, disc: int) -> EScalar:
    """epsilon = (1+delta)/2 for odd disc, delta/2 for even disc."""
    d = delta_scalar(place, disc)
    if disc % 2 == 1:
        return (d + 1) * Fraction(1, 2)
    return d * Fraction(1, 2)


def e_norm_conj(x: EScalar, ell: int):
    """(conj, norm, place-wise valuations) of an EScalar.

    The inert branch re-runs the valuation/norm consistency oracle.
    """
    if x.place == INERT and (ell == 2 or x.disc % ell == 0):
        raise ValueError(f"inert scalars are not supported for l | 2*disc (l={ell}, disc={x.disc})")
    return x.conj(), x.norm(), x.vals(ell)
