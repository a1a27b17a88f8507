"""Multivariate polynomials over Q and their fraction field.

Polynomials are sparse dicts {exponent tuple: Fraction} over a declared
symbol tuple (the package uses ("a1","a2","a3","c","X") and small variants).
RatFn is a reduced fraction num/den with deterministic canonical form:
gcd-reduced (content + subresultant PRS), denominator content-normalized
with positive leading sign. Equality is exact, never probabilistic.

series_to_ratfn reconstructs a rational function from a truncated power
series given degree bounds, verifying by re-expansion; it raises NoFit if
no function within the bounds matches. Works over any exact field
(Fraction scalars or RatFn scalars).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd as int_gcd

from ._linalg import solve


class NoFit(ArithmeticError):
    """No rational function within the degree bounds matches the series."""


def _is_one(p) -> bool:
    return p.is_const() and p.const_value() == 1


class Poly:
    __slots__ = ("syms", "terms")

    def __init__(self, syms, terms=None, prune=True):
        self.syms = tuple(syms)
        if terms is None:
            terms = {}
        if prune:
            self.terms = {e: Fraction(c) for e, c in terms.items() if c != 0}
        else:
            self.terms = terms

    # -- constructors ------------------------------------------------------
    @staticmethod
    def const(c, syms):
        syms = tuple(syms)
        z = (0,) * len(syms)
        return Poly(syms, {z: Fraction(c)})

    @staticmethod
    def var(name, syms, power=1):
        syms = tuple(syms)
        i = syms.index(name)
        e = tuple(power if j == i else 0 for j in range(len(syms)))
        return Poly(syms, {e: Fraction(1)})

    def _chk(self, o):
        if self.syms != o.syms:
            raise ValueError(f"symbol mismatch {self.syms} vs {o.syms}")

    def _coerce(self, o):
        if isinstance(o, Poly):
            self._chk(o)
            return o
        return Poly.const(o, self.syms)

    # -- ring ops ----------------------------------------------------------
    def __add__(self, o):
        o = self._coerce(o)
        t = dict(self.terms)
        for e, c in o.terms.items():
            s = t.get(e, Fraction(0)) + c
            if s:
                t[e] = s
            else:
                t.pop(e, None)
        return Poly(self.syms, t, prune=False)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.syms, {e: -c for e, c in self.terms.items()}, prune=False)

    def __sub__(self, o):
        return self + (-self._coerce(o))

    def __rsub__(self, o):
        return self._coerce(o) - self

    def __mul__(self, o):
        o = self._coerce(o)
        t = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = t.get(e, Fraction(0)) + c1 * c2
                if s:
                    t[e] = s
                else:
                    t.pop(e, None)
        return Poly(self.syms, t, prune=False)

    __rmul__ = __mul__

    def __pow__(self, k):
        r = Poly.const(1, self.syms)
        b = self
        while k:
            if k & 1:
                r = r * b
            b = b * b
            k >>= 1
        return r

    def __eq__(self, o):
        if isinstance(o, Poly):
            return self.syms == o.syms and self.terms == o.terms
        if isinstance(o, (int, Fraction)):
            return self == Poly.const(o, self.syms)
        return NotImplemented

    def __hash__(self):
        return hash((self.syms, frozenset(self.terms.items())))

    def is_zero(self):
        return not self.terms

    def is_const(self):
        return all(all(x == 0 for x in e) for e in self.terms)

    def const_value(self):
        if self.is_zero():
            return Fraction(0)
        if not self.is_const():
            raise ValueError("not constant")
        return next(iter(self.terms.values()))

    def degree(self, name):
        i = self.syms.index(name)
        return max((e[i] for e in self.terms), default=-1)

    def total_degree(self):
        return max((sum(e) for e in self.terms), default=-1)

    def subs_frac(self, values: dict) -> "Poly":
        """Substitute exact scalars for symbols (fast path)."""
        idx = {self.syms.index(k): Fraction(v) for k, v in values.items()}
        t = {}
        for e, c in self.terms.items():
            f = c
            ne = list(e)
            for i, v in idx.items():
                k = e[i]
                if k:
                    f *= v ** k
                    ne[i] = 0
            if f == 0:
                continue
            key = tuple(ne)
            s = t.get(key, Fraction(0)) + f
            if s:
                t[key] = s
            else:
                t.pop(key, None)
        return Poly(self.syms, t, prune=False)

    def subs(self, values: dict):
        """Substitute Fractions (or Polys over the same syms) for symbols."""
        if all(isinstance(v, (int, Fraction)) for v in values.values()):
            return self.subs_frac(values)
        out = Poly.const(0, self.syms)
        for e, c in self.terms.items():
            t = Poly.const(c, self.syms)
            for i, k in enumerate(e):
                if k == 0:
                    continue
                nm = self.syms[i]
                if nm in values:
                    v = values[nm]
                    v = v if isinstance(v, Poly) else Poly.const(v, self.syms)
                    t = t * v ** k
                else:
                    t = t * Poly.var(nm, self.syms, k)
            out = out + t
        return out

    def eval(self, values: dict) -> Fraction:
        return self.subs_frac(values).const_value()

    # -- univariate views (main variable = index i) -------------------------
    def coeffs_in(self, name):
        """Dict degree -> Poly in remaining symbols (same symbol tuple)."""
        i = self.syms.index(name)
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            e0 = tuple(x if j != i else 0 for j, x in enumerate(e))
            p = out.setdefault(k, {})
            p[e0] = p.get(e0, Fraction(0)) + c
        return {k: Poly(self.syms, t) for k, t in out.items()}

    def content_int(self):
        """gcd of numerators / lcm of denominators over all coefficients."""
        if not self.terms:
            return Fraction(0)
        num = 0
        den = 1
        for c in self.terms.values():
            num = int_gcd(num, abs(c.numerator))
            den = den * c.denominator // int_gcd(den, c.denominator)
        return Fraction(num, den)

    def map_coeffs(self, f):
        return Poly(self.syms, {e: f(c) for e, c in self.terms.items()})

    def lead_key(self):
        return max(self.terms)  # lexicographic on exponent tuples

    def lead_coeff(self):
        return self.terms[self.lead_key()]

    def monic_normal(self):
        """Divide by content and make the lex-leading coefficient positive."""
        if self.is_zero():
            return self
        c = self.content_int()
        if self.lead_coeff() < 0:
            c = -c
        return self.map_coeffs(lambda x: x / c)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            mon = "*".join(
                f"{self.syms[i]}^{k}" if k > 1 else self.syms[i]
                for i, k in enumerate(e) if k
            )
            if mon:
                if c == 1:
                    parts.append(mon)
                elif c == -1:
                    parts.append(f"-{mon}")
                else:
                    parts.append(f"{c}*{mon}")
            else:
                parts.append(f"{c}")
        s = " + ".join(parts)
        return s.replace("+ -", "- ")


def _poly_divmod(f: Poly, g: Poly, name: str):
    """Pseudo-free exact division in the main variable when it succeeds.

    Returns (q, r) with f = q*g + r and deg_name(r) < deg_name(g), performed
    over the fraction field of the remaining variables. Raises
    ZeroDivisionError if a needed leading-coefficient division is inexact;
    callers use it only where exactness is guaranteed (univariate case) or
    fall back to pseudo-division.
    """
    if g.is_zero():
        raise ZeroDivisionError
    rest = [s for s in f.syms if s != name]
    if all(g.degree(s) <= 0 for s in rest):
        # leading coefficient of g in `name` is a rational: exact division works
        gc = g.coeffs_in(name)
        dg = max(gc)
        lc = gc[dg].const_value()
        q = Poly.const(0, f.syms)
        r = f
        x = Poly.var(name, f.syms)
        while not r.is_zero() and r.degree(name) >= dg:
            rc = r.coeffs_in(name)
            dr = max(rc)
            t = rc[dr].map_coeffs(lambda v: v / lc) * x ** (dr - dg)
            q = q + t
            r = r - t * g
        return q, r
    raise ZeroDivisionError("non-constant leading coefficient")


def _pseudo_rem(f: Poly, g: Poly, name: str) -> Poly:
    """Pseudo-remainder prem(f, g) wrt main variable `name`."""
    gc = g.coeffs_in(name)
    dg = max(gc)
    lc = gc[dg]
    r = f
    x = Poly.var(name, f.syms)
    dr = r.degree(name)
    while not r.is_zero() and dr >= dg:
        rc = r.coeffs_in(name)[dr]
        r = lc * r - rc * x ** (dr - dg) * g
        ndr = r.degree(name)
        if ndr == dr:  # cancellation failed numerically; can't happen
            raise ArithmeticError("pseudo-division did not reduce degree")
        dr = ndr
    return r


def _effective_vars(p: Poly):
    return tuple(s for s in p.syms if p.degree(s) > 0)


def _univ_list(p: Poly, name: str):
    """Dense coefficient list for an effectively univariate polynomial."""
    i = p.syms.index(name)
    out = [Fraction(0)] * (p.degree(name) + 1)
    for e, c in p.terms.items():
        out[e[i]] += c
    return out


def _trim(l):
    while l and l[-1] == 0:
        l.pop()
    return l


def _euclid_list(a, b):
    """Monic gcd of two dense Fraction coefficient lists."""
    a = _trim(list(a))
    b = _trim(list(b))
    while b:
        # a mod b
        inv = b[-1]
        db = len(b) - 1
        r = list(a)
        while len(r) - 1 >= db and r:
            f = r[-1] / inv
            off = len(r) - 1 - db
            for j in range(db + 1):
                r[off + j] -= f * b[j]
            _trim(r)
            if not r:
                break
        a, b = b, r
    if not a:
        return []
    lc = a[-1]
    return [x / lc for x in a]


def _gcd_univ(f: Poly, g: Poly, name: str) -> Poly:
    """Euclid over Q for polynomials effectively univariate in `name`."""
    gl = _euclid_list(_univ_list(f, name), _univ_list(g, name))
    p = Poly(f.syms, {_unit_exp(f.syms, name, k): c for k, c in enumerate(gl)})
    return p.monic_normal()


_EVAL_POINTS = (2, 3, 5, 7, 11, 13, -2, -3, 17, 19)


def _coprime_certificate(f: Poly, g: Poly, common) -> bool:
    """True if evaluation proves gcd(f, g) is constant.

    For each common variable v, substitute deterministic integers for the
    others; when the leading coefficients in v survive, deg_v gcd is bounded
    by the degree of the univariate image gcd. All-zero bounds force a
    constant gcd.
    """
    for v in common:
        others = [s for s in _effective_vars(f) + _effective_vars(g) if s != v]
        proved = False
        for base in _EVAL_POINTS:
            vals = {s: Fraction(base + 2 * i + 1) for i, s in enumerate(dict.fromkeys(others))}
            fv = f.subs_frac(vals)
            gv = g.subs_frac(vals)
            if fv.degree(v) != f.degree(v) or gv.degree(v) != g.degree(v):
                continue  # leading coefficient vanished; bound invalid
            gl = _euclid_list(_univ_list(fv, v), _univ_list(gv, v))
            if len(gl) == 1:
                proved = True
                break
        if not proved:
            return False
    return True


def poly_gcd(f: Poly, g: Poly, budget=600) -> Poly:
    """GCD over Q[syms].

    Exact fast paths: zero, constants, equal inputs, disjoint variables,
    effectively univariate pairs. Otherwise an evaluation certificate proves
    coprimality in the generic case; only genuinely sharing pairs enter the
    primitive PRS, with a shared work budget. On budget exhaustion returns
    1, which keeps fractions exact (merely unreduced); all acceptance paths
    are univariate and never hit the fallback.
    """
    if f.is_zero():
        return g.monic_normal()
    if g.is_zero():
        return f.monic_normal()
    fn = f.monic_normal()
    gn = g.monic_normal()
    if fn == gn:
        return fn
    ef, eg = _effective_vars(f), _effective_vars(g)
    common = tuple(s for s in ef if s in eg)
    if not ef or not eg or not common:
        return Poly.const(1, f.syms)
    if len(ef) == 1 and ef == eg:
        return _gcd_univ(f, g, ef[0])
    if _coprime_certificate(f, g, common):
        return Poly.const(1, f.syms)
    shared = budget if isinstance(budget, list) else [budget]
    try:
        out = _gcd_prs(f, g, common[0], shared)
    except _BudgetOut:
        return Poly.const(1, f.syms)
    # certify divisibility (contents may have been budget-truncated)
    if _exact_div(f, out)[1] and _exact_div(g, out)[1]:
        return out
    return Poly.const(1, f.syms)


def _gcd_prs(f: Poly, g: Poly, name: str, budget) -> Poly:
    """Primitive PRS in `name`; recursive contents share the work budget."""

    def spend(n=1):
        budget[0] -= n
        if budget[0] < 0:
            raise _BudgetOut()

    one = Poly.const(1, f.syms)

    def content_wrt(p):
        cs = list(p.coeffs_in(name).values())
        c = cs[0]
        for x in cs[1:]:
            spend()
            c = poly_gcd(c, x, budget=budget)
            if c.is_const():
                break
        return c if not c.is_const() else one

    def primitive(p):
        c = content_wrt(p)
        if c.is_const():
            return p, one
        q, ok = _exact_div(p, c)
        assert ok, "content division must be exact"
        return q, c

    a, ca = primitive(f)
    b, cb = primitive(g)
    cont = poly_gcd(ca, cb, budget=budget)
    if a.degree(name) < b.degree(name):
        a, b = b, a
    while not b.is_zero():
        spend(len(a.terms) + len(b.terms))
        r = _pseudo_rem(a, b, name)
        if r.is_zero():
            a = b
            break
        rp, _ = primitive(r)
        a, b = b, rp
    res, _ = primitive(a)
    return (cont * res).monic_normal()


class _BudgetOut(Exception):
    pass


def _exact_div(f: Poly, g: Poly):
    """(f/g, True) if g divides f exactly, else (None, False)."""
    if g.is_zero():
        return None, False
    if g.is_const():
        c = g.const_value()
        return f.map_coeffs(lambda x: x / c), True
    name = next(s for s in f.syms if g.degree(s) > 0)
    # long division in the fraction field of the remaining variables via PRS:
    # multiply by powers of lc(g), divide back at the end.
    gc = g.coeffs_in(name)
    dg = max(gc)
    lc = gc[dg]
    q = Poly.const(0, f.syms)
    r = f
    x = Poly.var(name, f.syms)
    scale = Poly.const(1, f.syms)
    while not r.is_zero() and r.degree(name) >= dg:
        rc = r.coeffs_in(name)
        dr = max(rc)
        q = lc * q + rc[dr] * x ** (dr - dg)
        r = lc * r - rc[dr] * x ** (dr - dg) * g
        scale = scale * lc
    if not r.is_zero():
        return None, False
    # now f * scale = q * g, so f/g = q / scale
    qq, ok = _exact_div(q, scale)
    if not ok:
        return None, False
    return qq, True


@dataclass(frozen=True)
class RatFn:
    """Reduced fraction of multivariate polynomials; exact identity tests."""

    num: Poly
    den: Poly

    @staticmethod
    def make(num: Poly, den: Poly) -> "RatFn":
        if den.is_zero():
            raise ZeroDivisionError("RatFn with zero denominator")
        if num.is_zero():
            return RatFn(Poly.const(0, num.syms), Poly.const(1, num.syms))
        if not den.is_const():
            g = poly_gcd(num, den)
            if not _is_one(g):
                num = _exact_div(num, g)[0]
                den = _exact_div(den, g)[0]
        return RatFn._normalized(num, den)

    @staticmethod
    def _normalized(num: Poly, den: Poly) -> "RatFn":
        """Sign/content normalization of an already gcd-reduced pair."""
        if num.is_zero():
            return RatFn(Poly.const(0, num.syms), Poly.const(1, num.syms))
        c = den.content_int()
        if den.lead_coeff() < 0:
            c = -c
        den = den.map_coeffs(lambda x: x / c)
        num = num.map_coeffs(lambda x: x / c)
        return RatFn(num, den)

    @staticmethod
    def const(c, syms):
        return RatFn(Poly.const(c, syms), Poly.const(1, syms))

    @staticmethod
    def var(name, syms):
        return RatFn(Poly.var(name, syms), Poly.const(1, syms))

    @staticmethod
    def of_poly(p: Poly):
        return RatFn.make(p, Poly.const(1, p.syms))

    @property
    def syms(self):
        return self.num.syms

    def _coerce(self, o):
        if isinstance(o, RatFn):
            return o
        if isinstance(o, Poly):
            return RatFn.of_poly(o)
        return RatFn.const(o, self.syms)

    def __add__(self, o):
        o = self._coerce(o)
        return RatFn.make(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFn(-self.num, self.den)

    def __sub__(self, o):
        return self + (-self._coerce(o))

    def __rsub__(self, o):
        return self._coerce(o) - self

    def __mul__(self, o):
        o = self._coerce(o)
        # cross-reduce so gcd only ever sees already-reduced operands
        g1 = poly_gcd(self.num, o.den)
        g2 = poly_gcd(o.num, self.den)
        n1 = _exact_div(self.num, g1)[0] if not _is_one(g1) else self.num
        d2 = _exact_div(o.den, g1)[0] if not _is_one(g1) else o.den
        n2 = _exact_div(o.num, g2)[0] if not _is_one(g2) else o.num
        d1 = _exact_div(self.den, g2)[0] if not _is_one(g2) else self.den
        return RatFn._normalized(n1 * n2, d1 * d2)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = self._coerce(o)
        if o.num.is_zero():
            raise ZeroDivisionError
        return self * RatFn._normalized(o.den, o.num)

    def __rtruediv__(self, o):
        return self._coerce(o) / self

    def __pow__(self, k):
        if k < 0:
            return (RatFn.const(1, self.syms) / self) ** (-k)
        r = RatFn.const(1, self.syms)
        b = self
        while k:
            if k & 1:
                r = r * b
            b = b * b
            k >>= 1
        return r

    def __eq__(self, o):
        if isinstance(o, (RatFn, Poly, int, Fraction)):
            o = self._coerce(o)
            # cross-multiplied equality: exact regardless of normal forms
            return self.num * o.den == o.num * self.den
        return NotImplemented

    def __hash__(self):
        return hash((self.num, self.den))

    def is_zero(self):
        return self.num.is_zero()

    def is_const(self):
        return self.num.is_const() and self.den.is_const()

    def const_value(self):
        return self.num.const_value() / self.den.const_value()

    def subs(self, values):
        n = self.num.subs(values)
        d = self.den.subs(values)
        return RatFn.make(n, d)

    def eval(self, values) -> Fraction:
        n = self.num.eval(values)
        d = self.den.eval(values)
        if d == 0:
            raise ZeroDivisionError("pole at evaluation point")
        return n / d

    def series(self, name: str, length: int):
        """Power-series coefficients in `name` (den must be a unit at 0)."""
        nc = self.num.coeffs_in(name)
        dc = self.den.coeffs_in(name)
        if 0 not in dc or dc[0].is_zero():
            raise ZeroDivisionError(f"denominator vanishes at {name}=0")
        zero = Poly.const(0, self.syms)
        n = [nc.get(k, zero) for k in range(length)]
        d = [dc.get(k, zero) for k in range(length)]
        d0 = d[0]
        if d0.is_const():
            inv0 = Fraction(1) / d0.const_value()
            out = []
            for k in range(length):
                acc = n[k]
                for j in range(1, k + 1):
                    acc = acc - d[j] * out[k - j]
                out.append(acc.map_coeffs(lambda x: x * inv0))
            return out
        raise ZeroDivisionError("non-constant denominator unit; series over poly coefficients unsupported")

    def __repr__(self):
        if self.den == Poly.const(1, self.syms):
            return repr(self.num)
        return f"({self.num})/({self.den})"


def series_to_ratfn(coeffs, bounds, syms=("X",), name="X") -> RatFn:
    """Reconstruct num/den in `name` from series coefficients.

    coeffs: Fractions (or anything Fraction() accepts). bounds = (dn, dd).
    Requires len(coeffs) >= dn + dd + 1; every supplied coefficient is
    re-checked by expansion. Raises NoFit when no function fits the bounds.
    """
    dn, dd = bounds
    L = len(coeffs)
    if L < dn + dd + 1:
        raise ValueError(f"need at least {dn+dd+1} coefficients, got {L}")
    c = [Fraction(x) for x in coeffs]
    # b_0 = 1; unknowns b_1..b_dd from sum_j b_j c_{k-j} = 0, k = dn+1..dn+dd
    if dd > 0:
        rows = []
        rhs = []
        for k in range(dn + 1, dn + dd + 1):
            rows.append([c[k - j] if 0 <= k - j < L else Fraction(0) for j in range(1, dd + 1)])
            rhs.append(-c[k])
        sol = solve(rows, rhs)
        if sol is None:
            raise NoFit(f"no denominator of degree <= {dd} fits")
        b = [Fraction(1)] + [Fraction(x) for x in sol]
    else:
        b = [Fraction(1)]
    a = []
    for k in range(dn + 1):
        s = Fraction(0)
        for j in range(min(k, dd) + 1):
            s += b[j] * c[k - j]
        a.append(s)
    num = Poly(syms, {_unit_exp(syms, name, k): v for k, v in enumerate(a)})
    den = Poly(syms, {_unit_exp(syms, name, k): v for k, v in enumerate(b)})
    f = RatFn.make(num, den)
    exp = f.series(name, L)
    for k in range(L):
        got = exp[k].const_value() if exp[k].is_const() else None
        if got != c[k]:
            raise NoFit(f"re-expansion mismatch at order {k}")
    return f


def _unit_exp(syms, name, k):
    i = tuple(syms).index(name)
    return tuple(k if j == i else 0 for j in range(len(syms)))
