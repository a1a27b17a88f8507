"""Algebraic representations of the similitude group and the branching
vector br^{[a,b,r,s]}, in exact rational/quadratic-field arithmetic.

Model: over E the group splits as GL3 x GL1, and D^{a,b}{r,s} is the Cartan
component of highest weight (b, 0, -a) inside std^b (x) dual^a, twisted by
det^(r-s) nu^(2s-b-r) (worked out from the four torus characters; the
twists act by rational scalars and never change lattices). The invariant
vector is cut out by the mirabolic conditions (one nilpotent, two torus
directions, and one integral unipotent group element as a guard), the
normalization divides by the highest-weight projection of u^{-1} br with
u = n(1,0), and integrality is tested in the basis of the maximal
admissible lattice, realized as the pairing-dual of the minimal
(divided-power) lattice of the contragredient model.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iproduct

from ._linalg import SpanChecker, nullspace, solve
from .exactnum import Quad, lval, val_w_split
from .grouptheory import LocalContext
from .matrices import Mat


class NoInvariant(ArithmeticError):
    pass


class NormalizationDegenerate(ArithmeticError):
    pass


# ---------------------------------------------------------------------------
# tensor model
# ---------------------------------------------------------------------------

def _tensor_keys(p: int, q: int):
    """Index tuples (std^p | dual^q), each slot in {0,1,2}."""
    return [
        (si, di)
        for si in iproduct(range(3), repeat=p)
        for di in iproduct(range(3), repeat=q)
    ]


def _e_matrix_action(vec: dict, pq, entry_fn) -> dict:
    """Generic one-parameter action on a tensor dict.

    entry_fn(p_idx, k) gives the (p, k) matrix entry of the gl3 element; the
    action is the Leibniz sum over std slots (+E) and dual slots (-t E).
    """
    p_mat = [[entry_fn(i, j) for j in range(3)] for i in range(3)]
    out: dict = {}
    for (si, di), c in vec.items():
        for t in range(len(si)):
            for newi in range(3):
                coeff = p_mat[newi][si[t]]
                if coeff == 0:
                    continue
                key = (si[:t] + (newi,) + si[t + 1:], di)
                out[key] = out.get(key, Fraction(0)) + c * coeff
        for t in range(len(di)):
            for newj in range(3):
                coeff = p_mat[di[t]][newj]
                if coeff == 0:
                    continue
                key = (si, di[:t] + (newj,) + di[t + 1:])
                out[key] = out.get(key, Fraction(0)) - c * coeff
    return {k: v for k, v in out.items() if v != 0}


def lie_action(vec: dict, M) -> dict:
    """Action of a gl3 matrix M (list of rows) on a tensor dict."""
    return _e_matrix_action(vec, None, lambda i, j: M[i][j])


def group_action(vec: dict, g: Mat) -> dict:
    """Action of an invertible matrix: std by g, dual by contragredient."""
    gi = g.inv()
    out: dict = {}
    for (si, di), c in vec.items():
        # expand each slot
        terms = [((), (), c)]
        for t in si:
            nxt = []
            for (s_acc, d_acc, coeff) in terms:
                for newi in range(3):
                    val = g[newi, t]
                    if _iszero(val):
                        continue
                    nxt.append((s_acc + (newi,), d_acc, coeff * val))
            terms = nxt
        for t in di:
            nxt = []
            for (s_acc, d_acc, coeff) in terms:
                for newj in range(3):
                    val = gi[t, newj]
                    if _iszero(val):
                        continue
                    nxt.append((s_acc, d_acc + (newj,), coeff * val))
            terms = nxt
        for (s_acc, d_acc, coeff) in terms:
            key = (s_acc, d_acc)
            cur = out.get(key)
            out[key] = coeff if cur is None else cur + coeff
    return {k: v for k, v in out.items() if not _iszero(v)}


def _iszero(x):
    return x == 0 or (hasattr(x, "is_zero") and x.is_zero())


def weight_of(key):
    """GL3 weight (w0, w1, w2) of a pure tensor index."""
    w = [0, 0, 0]
    si, di = key
    for t in si:
        w[t] += 1
    for t in di:
        w[t] -= 1
    return tuple(w)


E = lambda i, j: [[Fraction(1) if (a, b) == (i, j) else Fraction(0) for b in range(3)] for a in range(3)]
DIAG = lambda d: [[Fraction(d[a]) if a == b else Fraction(0) for b in range(3)] for a in range(3)]


@dataclass
class AlgRep:
    """Cartan component of std^p (x) dual^q with twist data.

    basis: list of tensor dicts (index 0 is the highest-weight vector);
    rho, kappa: exponents of det and nu in the twist. For D^{a,b}{r,s}:
    p = b, q = a, rho = r - s, kappa = 2s - b - r.
    """

    p: int
    q: int
    rho: int
    kappa: int
    basis: list
    weights: list

    @property
    def dim(self):
        return len(self.basis)

    def coords(self, vec: dict, field_promote=None):
        """Coordinates of a tensor dict in the basis (exact solve)."""
        keys = sorted({k for b in self.basis for k in b} | set(vec))
        A = [[b.get(k, Fraction(0)) for b in self.basis] for k in keys]
        rhs = [vec.get(k, Fraction(0)) for k in keys]
        if field_promote is not None:
            A = [[field_promote(x) for x in row] for row in A]
            rhs = [field_promote(x) for x in rhs]
        sol = solve(A, rhs)
        if sol is None:
            raise ArithmeticError("vector not in the Cartan component")
        return sol

    def lie_matrix(self, M):
        """Matrix of a gl3 element in the basis (columns = images)."""
        cols = [self.coords(lie_action(b, M)) for b in self.basis]
        return [[cols[j][i] for j in range(self.dim)] for i in range(self.dim)]


def weyl_dim(lam) -> int:
    l1, l2, l3 = lam
    return (l1 - l2 + 1) * (l2 - l3 + 1) * (l1 - l3 + 2) // 2


def build_core(p: int, q: int) -> AlgRep:
    """Cartan component of hw (p, 0, -q): lowering closure of the extreme
    vector e0^p (x) (e2*)^q, with the dimension checked against the Weyl
    formula."""
    hw = ((0,) * p, (2,) * q)
    v0 = {hw: Fraction(1)}
    # verify highest-weight property
    for M in (E(0, 1), E(1, 2)):
        assert not lie_action(v0, M), "extreme vector is not highest weight"
    basis = [v0]
    checker = None
    frontier = [v0]
    keyset = sorted(_tensor_keys(p, q))
    kindex = {k: i for i, k in enumerate(keyset)}

    def to_coords(vec):
        out = [Fraction(0)] * len(keyset)
        for k, c in vec.items():
            out[kindex[k]] = c
        return out

    checker = SpanChecker([to_coords(v0)])
    lowers = [E(1, 0), E(2, 1), E(2, 0)]
    while frontier:
        nxt = []
        for v in frontier:
            for M in lowers:
                w = lie_action(v, M)
                if not w:
                    continue
                if checker.add(to_coords(w)):
                    basis.append(w)
                    nxt.append(w)
        frontier = nxt
    expect = weyl_dim((p, 0, -q))
    if len(basis) != expect:
        raise ArithmeticError(f"core dimension {len(basis)} != Weyl value {expect}")
    return AlgRep(p, q, 0, 0, basis, [weight_tuple(b) for b in basis])


def weight_tuple(vec: dict):
    ws = {weight_of(k) for k in vec}
    if len(ws) != 1:
        return None  # mixed-weight combination
    return ws.pop()


_REP_CACHE: dict = {}


def build_rep(a: int, b: int, r: int = 0, s: int = 0) -> AlgRep:
    """D^{a,b}{r,s} in the tensor model (twists recorded as exponents)."""
    key = (a, b, r, s)
    if key in _REP_CACHE:
        return _REP_CACHE[key]
    core = build_core(b, a)
    rep = AlgRep(core.p, core.q, r - s, 2 * s - b - r, core.basis, core.weights)
    _REP_CACHE[key] = rep
    return rep


def gl3_relations_hold(rep: AlgRep) -> bool:
    """[e_i, f_i] = h_i on every basis vector, exactly."""
    pairs = [
        (E(0, 1), E(1, 0), DIAG((1, -1, 0))),
        (E(1, 2), E(2, 1), DIAG((0, 1, -1))),
    ]
    for e, f, h in pairs:
        for v in rep.basis:
            lhs1 = lie_action(lie_action(v, f), e)
            lhs2 = lie_action(lie_action(v, e), f)
            rhs = lie_action(v, h)
            diff = dict(lhs1)
            for k, c in lhs2.items():
                diff[k] = diff.get(k, Fraction(0)) - c
            for k, c in rhs.items():
                diff[k] = diff.get(k, Fraction(0)) - c
            if any(c != 0 for c in diff.values()):
                return False
    return True


# ---------------------------------------------------------------------------
# the branching vector
# ---------------------------------------------------------------------------

@dataclass
class BranchVector:
    a: int
    b: int
    r: int
    s: int
    rep: AlgRep
    coords: list  # Quad coordinates in rep.basis after normalization
    hw_projection: object  # the (pre-normalization) highest-weight coefficient


def _invariant_conditions(rep: AlgRep):
    """Stack of rational matrices whose joint kernel is the Q_H^0-invariants."""
    dim = rep.dim
    rows = []
    # X_y = E_{02}: pure gl3 nilpotent
    My = rep.lie_matrix(E(0, 2))
    rows.extend(My)
    # X_u = diag(1,1,0) + (2 rho + kappa)
    Mu = rep.lie_matrix(DIAG((1, 1, 0)))
    cu = Fraction(2 * rep.rho + rep.kappa)
    rows.extend([[Mu[i][j] + (cu if i == j else 0) for j in range(dim)] for i in range(dim)])
    # X_v = diag(1,0,0) + (rho + kappa)
    Mv = rep.lie_matrix(DIAG((1, 0, 0)))
    cv = Fraction(rep.rho + rep.kappa)
    rows.extend([[Mv[i][j] + (cv if i == j else 0) for j in range(dim)] for i in range(dim)])
    return rows


def _unipotent_guard(rep: AlgRep, coords) -> bool:
    """The group element [[1,0,1],[0,1,0],[0,0,1]] (nu = 1) fixes the vector."""
    g0 = Mat([[Fraction(1), Fraction(0), Fraction(1)], [Fraction(0), Fraction(1), Fraction(0)], [Fraction(0), Fraction(0), Fraction(1)]])
    vec: dict = {}
    for c, b in zip(coords, rep.basis):
        for k, v in b.items():
            vec[k] = vec.get(k, Fraction(0)) + c * v
    moved = group_action(vec, g0)  # det = 1, nu-twist = 1
    back = rep.coords(moved)
    return back == list(coords)


def u_matrix_over_e(ctx_disc: int) -> Mat:
    """n(1,0) in the E-split GL3 coordinates (entries in Q(delta))."""
    d = Quad(Fraction(0), Fraction(1), ctx_disc)
    one = Quad.of(1, ctx_disc)
    zero = Quad.of(0, ctx_disc)
    eps = (one + d) * Fraction(1, 2) if ctx_disc % 2 else d * Fraction(1, 2)
    return Mat([[one, d, eps], [zero, one, one], [zero, zero, one]])


def branching_vector(a: int, b: int, r: int, s: int, disc: int = 3) -> BranchVector:
    """The normalized invariant vector br^{[a,b,r,s]}.

    Solves the mirabolic invariance conditions (asserting a 1-dimensional
    solution space inside the box 0 <= r <= a, 0 <= s <= b, and none
    outside), then scales so the highest-weight projection of u^{-1} br is
    the standard monomial vector.
    """
    rep = build_rep(a, b, r, s)
    rows = _invariant_conditions(rep)
    ker = nullspace(rows)
    if not (0 <= r <= a and 0 <= s <= b):
        if ker:
            raise ArithmeticError(f"unexpected invariant outside the box at {(a,b,r,s)}")
        raise NoInvariant(f"(r,s)=({r},{s}) outside the box for (a,b)=({a},{b})")
    if len(ker) == 0:
        raise NoInvariant(f"no invariant vector at {(a,b,r,s)} (inside the box?)")
    if len(ker) > 1:
        raise ArithmeticError(f"invariant space has dimension {len(ker)} > 1")
    coords = ker[0]
    if not _unipotent_guard(rep, coords):
        raise ArithmeticError("integral unipotent guard failed on the invariant vector")
    # normalize: the hw projection of u^{-1} br must be the standard monomial
    u = u_matrix_over_e(disc)
    vec: dict = {}
    for c, bvec in zip(coords, rep.basis):
        for k, v in bvec.items():
            vec[k] = vec.get(k, Fraction(0)) + c * v
    moved = group_action({k: Quad.of(v, disc) for k, v in vec.items()}, u.inv())
    qc = rep.coords(moved, field_promote=lambda x: Quad.of(x, disc) if not isinstance(x, Quad) else x)
    hw_coeff = qc[0]
    if hw_coeff.is_zero():
        raise NormalizationDegenerate("highest-weight projection of u^{-1} br vanishes")
    inv = hw_coeff.inv()
    norm_coords = [Quad.of(c, disc) * inv for c in coords]
    return BranchVector(a, b, r, s, rep, norm_coords, hw_coeff)


# ---------------------------------------------------------------------------
# the H-submodule generated by br
# ---------------------------------------------------------------------------

def h_subrep_check(bv: BranchVector) -> dict:
    """Span of br under the embedded-H Lie action: dimension n+1 and the
    character of W^n{-n,-n}."""
    rep = bv.rep
    n = bv.a + bv.b - bv.r - bv.s
    gens = [E(0, 2), E(2, 0), DIAG((1, 0, 0)), DIAG((0, 0, 1)), DIAG((0, 1, 0))]
    dim = rep.dim
    vec = [q for q in bv.coords]
    mats = [rep.lie_matrix(M) for M in gens]
    span = SpanChecker([vec])
    frontier = [vec]
    while frontier:
        nxt = []
        for v in frontier:
            for M in mats:
                w = [sum((Quad.of(M[i][j], bv.coords[0].disc) * v[j] for j in range(dim)), Quad.of(0, bv.coords[0].disc)) for i in range(dim)]
                if span.add(w):
                    nxt.append(w)
        frontier = nxt
    ok_dim = span.rank == n + 1
    # H-character: exponents of x (index-0 torus direction) with the twist
    # shifts; expected multiset {-j : j = 0..n} with the z-exponent vanishing
    disc = bv.coords[0].disc
    xexps = []
    ok_z = True
    for row in span.rows:
        vecd: dict = {}
        for c, bvec in zip(row, rep.basis):
            for k, v in bvec.items():
                vecd[k] = vecd.get(k, Quad.of(0, disc)) + c * Quad.of(v, disc)
        ws = {weight_of(k) for k, c in vecd.items() if not c.is_zero()}
        for w in ws:
            zexp = w[1] + bv.rep.rho
            if zexp != 0:
                ok_z = False
        if len({(w[0], w[2]) for w in ws}) == 1:
            w = ws.pop()
            xexps.append(w[0] + rep.rho + rep.kappa)
        else:
            xexps.append(None)
    expected = sorted(-j for j in range(n + 1))
    ok_char = ok_z and None not in xexps and sorted(xexps) == expected
    return {"n": n, "dim": span.rank, "dim_ok": ok_dim, "char_ok": ok_char}


def branching_multiplicity(a: int, b: int, r: int, s: int) -> int:
    """dim Hom_H(W^n{-n,-n}, D^{a,b}{r,s}) by character counting alone."""
    rep = build_rep(a, b, r, s)
    n = a + b - r - s
    counts: dict = {}
    for basisvec in rep.basis:
        w = weight_tuple(basisvec)
        counts[w] = counts.get(w, 0) + 1
    # H-weight of a GL3 weight (w0,w1,w2): x-exp w0+rho+kappa, z-exp w1+rho,
    # y-exp w2+rho+kappa; W^n{-n,-n} has weights x^{-j} y^{j-n} with z-exp 0.
    def count(xe, ye):
        tot = 0
        for (w0, w1, w2), c in counts.items():
            if w1 + rep.rho != 0:
                continue
            if w0 + rep.rho + rep.kappa == xe and w2 + rep.rho + rep.kappa == ye:
                tot += c
        return tot

    # multiplicity of the GL2-irrep with top weight (0, -n) in the z-exp-0 block:
    # count(top) - count(top raised once)
    return count(0, -n) - count(1, -n - 1)


# ---------------------------------------------------------------------------
# maximal admissible lattice and integrality
# ---------------------------------------------------------------------------

def _divided_power_lattice(p: int, q: int) -> list:
    """Z-basis (coordinate rows) of the minimal admissible lattice of the
    core of std^p (x) dual^q: divided powers of the lowerings applied to the
    extreme vector, Z-spanned."""
    core = build_core(p, q)
    lows = [E(1, 0), E(2, 1), E(2, 0)]
    v0 = core.basis[0]
    depth = 2 * (p + q) + 1

    def divided_powers(vec, M):
        out = [vec]
        cur = vec
        k = 1
        while True:
            cur = lie_action(cur, M)
            if not cur:
                break
            cur = {key: c / k for key, c in cur.items()}
            out.append(cur)
            k += 1
        return out

    gens = [v0]
    frontier = [v0]
    for _ in range(depth):
        nxt = []
        for v in frontier:
            for M in lows:
                for w in divided_powers(v, M)[1:]:
                    nxt.append(w)
        if not nxt:
            break
        gens.extend(nxt)
        frontier = nxt
        if len(gens) > 4000:
            break
    rows = [core.coords(g) for g in gens]
    return core, _z_span(rows)


def _z_span(rows) -> list:
    """Hermite basis over Z of the lattice spanned by rational rows."""
    from math import gcd

    rows = [r for r in rows if any(x != 0 for x in r)]
    den = 1
    for r in rows:
        for x in r:
            den = den * x.denominator // gcd(den, x.denominator)
    int_rows = [[int(x * den) for x in r] for r in rows]
    n = len(int_rows[0])
    basis = []
    for col in range(n):
        pivots = [r for r in int_rows if r[col] != 0 and all(x == 0 for x in r[:col])]
        if not pivots:
            continue
        while len(pivots) > 1:
            pivots.sort(key=lambda r: abs(r[col]))
            p0 = pivots[0]
            rest = []
            for r in pivots[1:]:
                f = r[col] // p0[col]
                nr = [x - f * y for x, y in zip(r, p0)]
                if nr[col] != 0:
                    rest.append(nr)
                elif any(x != 0 for x in nr):
                    int_rows.append(nr)
            pivots = [p0] + rest
        piv = pivots[0]
        basis.append(piv)
        int_rows = [
            r if r[col] == 0 or r is piv else [x - (r[col] // piv[col]) * y for x, y in zip(r, piv)]
            for r in int_rows
        ]
        int_rows = [r for r in int_rows if any(x != 0 for x in r) and r is not piv]
    return [[Fraction(x, den) for x in row] for row in basis]


_LATTICE_CACHE: dict = {}


def maximal_lattice_basis(a: int, b: int) -> list:
    """Basis (rows of coordinates in the D-core basis) of the maximal
    admissible lattice of D^{a,b}, as the pairing-dual of the minimal
    lattice of the contragredient core."""
    key = (a, b)
    if key in _LATTICE_CACHE:
        return _LATTICE_CACHE[key]
    d_core = build_core(b, a)
    v_core, v_min = _divided_power_lattice(a, b)
    # pairing matrix between the core bases
    P = [[_pair(db, vb) for vb in v_core.basis] for db in d_core.basis]
    m = len(v_min)
    dim = d_core.dim
    if m != dim:
        raise ArithmeticError("minimal lattice basis has wrong rank")
    # Gram matrix: Gm[i][j] = <d-basis_i, j-th minimal-lattice generator>
    Gm = [
        [sum(P[i][k] * v_min[j][k] for k in range(dim)) for j in range(m)]
        for i in range(dim)
    ]
    # x (coords in the d-core basis) lies in the maximal lattice iff
    # x * Gm is integral, i.e. x in Z^dim * Gm^{-1}: basis = rows of Gm^{-1}
    A = [[Fraction(Gm[i][j]) for j in range(dim)] for i in range(dim)]
    out = _mat_inv(A)
    _LATTICE_CACHE[key] = out
    return out


def _pair(dvec: dict, vvec: dict) -> Fraction:
    """Natural pairing std^b dual^a x std^a dual^b."""
    tot = Fraction(0)
    for (si, di), c in dvec.items():
        for (sj, dj), e in vvec.items():
            if si == dj and di == sj:
                tot += c * e
    return tot


def _mat_inv(A):
    n = len(A)
    M = [list(r) + [Fraction(1) if i == j else Fraction(0) for j in range(n)] for i, r in enumerate(A)]
    for col in range(n):
        piv = next(r for r in range(col, n) if M[r][col] != 0)
        M[col], M[piv] = M[piv], M[col]
        inv = M[col][col]
        M[col] = [x / inv for x in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return [row[n:] for row in M]


def integrality_at(bv: BranchVector, ell: int, disc: int = None) -> dict:
    """Valuations of br in the maximal-lattice basis at the places over ell.

    Verdict 'integral' iff every coordinate has non-negative valuation at
    every place over ell; denominators at ramified ell are reported, not
    judged.
    """
    disc = disc if disc is not None else bv.coords[0].disc
    basis = maximal_lattice_basis(bv.a, bv.b)
    n = bv.rep.dim
    # solve coordinates of br in the lattice basis (columns = basis rows)
    A = [[Quad.of(basis[j][i], disc) for j in range(n)] for i in range(n)]
    sol = solve(A, list(bv.coords))
    assert sol is not None
    from .exactnum import kronecker_minus_disc

    kr = kronecker_minus_disc(disc, ell)
    vals = []
    for c in sol:
        if c.is_zero():
            continue
        if kr == 1:
            vals.append(min(val_w_split(c, ell), val_w_split(c.conj(), ell)))
        elif kr == -1:
            vals.append(c.val_inert(ell))
        else:
            # ramified: report the norm valuation halves
            vals.append(Fraction(lval(c.norm(), ell), 2))
    worst = min(vals) if vals else 0
    return {
        "ell": ell,
        "ramified": kr == 0,
        "min_valuation": worst,
        "integral": (kr != 0 and worst >= 0),
        "coords_in_lattice_basis": sol,
    }


def tensor_intersection_contains(bv: BranchVector) -> bool:
    """Cross-check: br (normalized) against the lattice of integral tensors
    intersected with the Cartan component; containment implies containment
    in the maximal lattice."""
    disc = bv.coords[0].disc
    vecd: dict = {}
    for c, bvec in zip(bv.coords, bv.rep.basis):
        for k, v in bvec.items():
            vecd[k] = vecd.get(k, Quad.of(0, disc)) + c * Quad.of(v, disc)
    # integral tensor coordinates at every finite place away from disc:
    # denominators of both Quad coordinates supported on disc only
    for c in vecd.values():
        for part in (c.a, c.b):
            d = part.denominator
            k = 2
            while k * k <= d:
                if d % k == 0 and disc % k != 0 and (disc * 4) % k != 0:
                    return False
                while d % k == 0:
                    d //= k
                k += 1
            if d > 1 and disc % d != 0 and (disc * 4) % d != 0:
                return False
    return True
