"""Constructive cyclicity of the (H, G)-bimodule of U\\G/K functions.

Split case: G0 = GL3(Q_l) with U the block subgroup {diag(A, x)}; cells
U t(mu) n0 t(lam) K (and their n1-form duals) with n0 = I + E13 + E23 and
n1 its transpose-inverse. Inert case: the unitary group with U = iota(H(Z_l))
and n0 = n(1, 0). Canonicalization follows the Iwasawa route with the two
reduction moves; an exact witness factorization g = u * cell * k is produced
on request and asserted. Support scans verify the valuation inequalities of
the key lemma; decomposition is a well-founded recursion in the
lexicographic order on s(mu, lambda) = (lambda1, mu~ + lam~, mu~); every
certificate replays pointwise through the same exact coset machinery.

Cell disjointness is never assumed: label injectivity (the canon of each
cell point returns its label) is asserted on the working range and reported
as empirical, matching the source's remark.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .cosetlab import (
    cartan_label_inert,
    decompose_gl,
    decompose_inert,
    divisor_label,
    g_is_integral,
    is_integral_mat,
)
from .exactnum import lval
from .grouptheory import GElement, HElement, LocalContext, iota
from .matrices import Mat


class NonTermination(RuntimeError):
    pass


def _f(x):
    return Fraction(x)


def _diag3(ell, m):
    return Mat(
        [
            [_f(ell) ** m[0], _f(0), _f(0)],
            [_f(0), _f(ell) ** m[1], _f(0)],
            [_f(0), _f(0), _f(ell) ** m[2]],
        ]
    )


N0_SPLIT = Mat([[_f(1), _f(0), _f(1)], [_f(0), _f(1), _f(1)], [_f(0), _f(0), _f(1)]])
N1_SPLIT = N0_SPLIT.inv().transpose()


@dataclass(frozen=True)
class SplitLabel:
    mu: tuple  # (mu1 >= mu2, mu3 free)
    lam: tuple  # (l1 >= l2 >= 0, 0)

    def __post_init__(self):
        if self.mu[0] < self.mu[1]:
            raise ValueError(f"mu not dominant: {self.mu}")
        if not (self.lam[0] >= self.lam[1] >= 0 and self.lam[2] == 0):
            raise ValueError(f"lambda not admissible: {self.lam}")

    def s_order(self):
        mt = self.mu[0] - self.mu[1]
        lt = self.lam[0] - self.lam[1]
        return (self.lam[0], mt + lt, mt)


@dataclass(frozen=True)
class InertLabel:
    mu: tuple  # (mu1 >= mu2)
    lam: tuple  # (l1 >= 0, 0)

    def __post_init__(self):
        if self.mu[0] < self.mu[1]:
            raise ValueError(f"mu not dominant: {self.mu}")
        if not (self.lam[0] >= 0 and self.lam[1] == 0):
            raise ValueError(f"lambda not admissible: {self.lam}")

    def s_order(self):
        return (self.lam[0], self.mu[0] - self.mu[1])


# ---------------------------------------------------------------------------
# split canonicalization
# ---------------------------------------------------------------------------

def _u_block(A: Mat, x) -> Mat:
    return Mat(
        [
            [A[0, 0], A[0, 1], _f(0)],
            [A[1, 0], A[1, 1], _f(0)],
            [_f(0), _f(0), _f(x)],
        ]
    )


def _n_vec(v) -> Mat:
    return Mat([[_f(1), _f(0), v[0]], [_f(0), _f(1), v[1]], [_f(0), _f(0), _f(1)]])


def _gl2_cartan_witness(A: Mat, ell: int):
    """A = u1 * diag(l^a, l^b) * u2 with a >= b, u_i in GL2(Z_(l)); exact."""
    rows = [list(A.rows[0]), list(A.rows[1])]
    L = [[_f(1), _f(0)], [_f(0), _f(1)]]
    R = [[_f(1), _f(0)], [_f(0), _f(1)]]

    def rowop(i, j, c):
        for k in range(2):
            rows[i][k] += c * rows[j][k]
            L[i][k] += c * L[j][k]

    def colop(j, i, c):
        for k in range(2):
            rows[k][j] += c * rows[k][i]
            R[k][j] += c * R[k][i]

    def rowswap():
        rows[0], rows[1] = rows[1], rows[0]
        L[0], L[1] = L[1], L[0]

    def colswap():
        for k in range(2):
            rows[k][0], rows[k][1] = rows[k][1], rows[k][0]
            R[k][0], R[k][1] = R[k][1], R[k][0]

    vals = {(i, j): lval(rows[i][j], ell) for i in range(2) for j in range(2)}
    (pi, pj) = min(vals, key=lambda t: (vals[t], t))
    if pi == 1:
        rowswap()
    if pj == 1:
        colswap()
    p = rows[0][0]
    if rows[1][0] != 0:
        rowop(1, 0, -rows[1][0] / p)
    if rows[0][1] != 0:
        colop(1, 0, -rows[0][1] / p)
    a = lval(rows[0][0], ell)
    b = lval(rows[1][1], ell)
    u0 = rows[0][0] / _f(ell) ** a
    u1v = rows[1][1] / _f(ell) ** b
    # fold unit scalings into L (rows = L * A * R form bookkeeping below)
    for k in range(2):
        L[0][k] /= u0
        L[1][k] /= u1v
    rows[0][0] = _f(ell) ** a
    rows[1][1] = _f(ell) ** b
    if a < b:
        rowswap()
        colswap()
        a, b = b, a
    Lm, Rm, D = Mat(L), Mat(R), Mat(rows)
    u1m = Lm.inv()
    u2m = Rm.inv()
    assert u1m * D * u2m == A
    assert is_integral_mat(u1m, ell) and lval(u1m.det(), ell) == 0
    assert is_integral_mat(u2m, ell) and lval(u2m.det(), ell) == 0
    return u1m, (a, b), u2m


def canonicalize_split(g: Mat, ell: int, witness: bool = False):
    """Label (mu, lam) with g in U t(mu) n0 t(lam) K (the n0 form).

    Iwasawa route: clear the bottom row by column operations, Cartan-split
    the H block, unit-normalize the corner vector, then iterate the two
    reduction moves into the admissible cone. With witness=True the exact
    factorization g = u * t(mu) n0 t(lam) * k is built and asserted.
    """
    uL = Mat([[_f(1), _f(0), _f(0)], [_f(0), _f(1), _f(0)], [_f(0), _f(0), _f(1)]])
    kR = uL
    M = g

    def push_right(kmat):
        nonlocal M, kR
        M = M * kmat.inv()
        kR = kmat * kR

    def push_left(umat):
        nonlocal M, uL
        uL = uL * umat
        M = umat.inv() * M

    # 1. bottom row -> (0, 0, x) by column operations
    row = M.rows[2]
    piv, pv = None, None
    for j in range(3):
        v = lval(row[j], ell)
        if pv is None or v < pv:
            piv, pv = j, v
    if piv != 2:
        E = [[_f(1) if i == j else _f(0) for j in range(3)] for i in range(3)]
        E[piv][piv] = E[2][2] = _f(0)
        E[piv][2] = E[2][piv] = _f(1)
        push_right(Mat(E).inv())
    for j in range(2):
        if M[2, j] != 0:
            c = -M[2, j] / M[2, 2]
            E = [[_f(1) if a == b else _f(0) for b in range(3)] for a in range(3)]
            E[2][j] = c
            push_right(Mat(E).inv())
    # 2. H-block Cartan
    A = Mat([[M[0, 0], M[0, 1]], [M[1, 0], M[1, 1]]])
    bvec = (M[0, 2], M[1, 2])
    x = M[2, 2]
    u1, (m1, m2), u2 = _gl2_cartan_witness(A, ell)
    m3 = lval(x, ell)
    ux = x / _f(ell) ** m3
    push_left(_u_block(u1, ux))
    # now M = diag(D, l^m3) * n(v0') with the u2-part still inside; move it out
    push_right(_u_block(u2, 1))
    m = [m1, m2, m3]
    # M should now be t(m) * n(w)
    w = [M[0, 2] / M[0, 0], M[1, 2] / M[1, 1]]

    def renormalize():
        """w -> (l^-a, l^-b) via integral shifts and unit torus factors."""
        nonlocal w
        shift = [_f(0), _f(0)]
        for i in (0, 1):
            vv = lval(w[i], ell)
            if vv >= 0:
                shift[i] = _f(1) - w[i]
        if shift[0] or shift[1]:
            push_right(_n_vec(shift).inv())
            w = [w[0] + shift[0], w[1] + shift[1]]
        units = [w[i] * _f(ell) ** (-lval(w[i], ell)) for i in (0, 1)]
        if units[0] != 1 or units[1] != 1:
            T = _u_block(Mat([[units[0], _f(0)], [_f(0), units[1]]]), 1)
            push_left(T)
            push_right(T.inv())
            w = [w[0] / units[0], w[1] / units[1]]

    renormalize()
    guard = 0
    while True:
        guard += 1
        if guard > 8:
            raise NonTermination("reduction moves did not stabilize")
        lam1, lam2 = -lval(w[0], ell), -lval(w[1], ell)
        if lam2 > lam1:
            # w1 += w2 through u = I + l^{m1-m2} E12-block, k = I - E12
            u = _u_block(Mat([[_f(1), _f(ell) ** (m[0] - m[1])], [_f(0), _f(1)]]), 1)
            kf = Mat([[_f(1), _f(-1), _f(0)], [_f(0), _f(1), _f(0)], [_f(0), _f(0), _f(1)]])
            push_left(u.inv())
            push_right(kf)
            w = [w[0] + w[1], w[1]]
            renormalize()
            continue
        if (m[0] - lam1) < (m[1] - lam2):
            n2p = lam1 - m[0] + m[1]
            u = _u_block(Mat([[_f(1), _f(0)], [_f(1), _f(1)]]), 1)
            kf = Mat(
                [
                    [_f(1), _f(0), _f(0)],
                    [_f(-(ell ** (m[0] - m[1]))), _f(1), _f(0)],
                    [_f(0), _f(0), _f(1)],
                ]
            )
            push_left(u.inv())
            push_right(kf)
            w = [w[0], w[1] + _f(ell) ** (-n2p)]
            renormalize()
            continue
        break
    lam = (lam1, lam2, 0)
    mu = (m[0] - lam1, m[1] - lam2, m[2])
    lab = SplitLabel(mu, lam)
    if not witness:
        return lab
    cell = _diag3(ell, mu) * N0_SPLIT * _diag3(ell, lam)
    k = cell.inv() * M * kR
    u = uL
    assert _in_block_u(u, ell), "witness u is not in the block subgroup"
    assert is_integral_mat(k, ell) and lval(k.det(), ell) == 0, "witness k not in K"
    assert u * cell * k == g
    return lab, u, k


def _in_block_u(u: Mat, ell: int) -> bool:
    if not is_integral_mat(u, ell):
        return False
    if not (u[2, 0] == 0 and u[2, 1] == 0 and u[0, 2] == 0 and u[1, 2] == 0):
        return False
    return (
        lval(u[2, 2], ell) == 0
        and lval(u[0, 0] * u[1, 1] - u[0, 1] * u[1, 0], ell) == 0
    )


def canon_n1_split(g: Mat, ell: int) -> SplitLabel:
    """Label with g in U t(mu)^{-1} n1 t(lam)^{-1} K (transpose-inverse trick)."""
    return canonicalize_split(g.inv().transpose(), ell)


def cell_point_n1_split(ell: int, lab: SplitLabel) -> Mat:
    return _diag3(ell, [-x for x in lab.mu]) * N1_SPLIT * _diag3(ell, [-x for x in lab.lam])


# ---------------------------------------------------------------------------
# inert canonicalization
# ---------------------------------------------------------------------------

def _n0_inert(ctx: LocalContext) -> GElement:
    from .grouptheory import open_orbit_u

    return open_orbit_u(ctx)


def t_m2_inert(ctx: LocalContext, m) -> GElement:
    from .cosetlab import t_m_inert

    return t_m_inert(ctx, m)


def dual_mu_inert(m):
    """Dominant representative of -m (the label of t(m)^{-1})."""
    m1, m2 = m
    if -m1 >= -m2:
        return (-m1, -m2)
    return (m1 - 2 * m2, -m2)


def cell_point_inert(ctx: LocalContext, lab: InertLabel) -> GElement:
    """t(mu) n0 t(lam): the inert cells are kept in the n0 form.

    (The transpose-inverse trick of the split side has no unitary analog:
    no naive duality map preserves the group on unipotents. The support
    scan below verifies directly that the convolution supports expand in
    n0-form cells with strict descent, which is all the recursion needs.)
    """
    return t_m2_inert(ctx, lab.mu) * _n0_inert(ctx) * t_m2_inert(ctx, lab.lam)


def canonicalize_inert(g: GElement) -> InertLabel:
    """Label with g in U t(mu) n0 t(lam) K, from three exact invariants.

    val nu fixes mu2; the minimal valuation of the middle row (U mixes rows
    1,3 and scales row 2 by units, K acts by integral column moves) fixes
    lam1 through mu2 - minval(row 2); the minimal entry valuation fixes mu1
    via d1 = 2 mu2 - mu1 - lam1. Totality is the covering statement;
    correctness is verified against constructed u * cell * k samples and
    label idempotence in the test suite.
    """
    ctx = g.ctx
    ell = ctx.ell
    vn = lval(g.nu, ell)
    if vn % 2:
        raise ValueError("odd similitude valuation")
    mu2 = vn // 2
    row2 = [x.u for x in g.mat.rows[1]]
    vrow = min(min(lval(q.a, ell), lval(q.b, ell)) for q in row2 if not q.is_zero())
    lam1 = mu2 - vrow
    d1 = min(
        min(lval(q.u.a, ell), lval(q.u.b, ell))
        for r in g.mat.rows
        for q in r
        if not q.is_zero()
    )
    mu1 = 2 * mu2 - lam1 - d1
    return InertLabel((mu1, mu2), (lam1, 0))


# ---------------------------------------------------------------------------
# H-side left cosets and bimodule evaluation
# ---------------------------------------------------------------------------

_LC_CACHE: dict = {}


def left_cosets_split(ell: int, mu) -> list:
    """Left-coset representatives of U t(mu) U in the block picture."""
    key = ("ls", ell, tuple(mu))
    if key in _LC_CACHE:
        return _LC_CACHE[key]
    inv2 = tuple(sorted((-mu[0], -mu[1]), reverse=True))
    reps = [r.inv() for r in decompose_gl(inv2, ell)]
    out = [_u_block(r, _f(ell) ** mu[2]) for r in reps]
    _LC_CACHE[key] = out
    return out


def left_cosets_inert(ctx: LocalContext, mu) -> list:
    """Left cosets of U t(mu) U in G (through iota; z-part carried along)."""
    key = ("li", ctx.ell, ctx.d0, tuple(mu))
    if key in _LC_CACHE:
        return _LC_CACHE[key]
    from .grouptheory import esc

    ell = ctx.ell
    g2 = tuple(sorted((mu[0], 2 * mu[1] - mu[0]), reverse=True))
    inv2 = tuple(sorted((-g2[0], -g2[1]), reverse=True))
    out = []
    z = esc(ctx, _f(ell) ** mu[1])
    for r in decompose_gl(inv2, ell):
        gamma = r.inv()
        # Hermite reps have determinant exactly l^(sum of divisors), so
        # det(gamma) = Norm(z) on the nose
        h = HElement(ctx, gamma, z)
        out.append(iota(h))
    _LC_CACHE[key] = out
    return out


# ---------------------------------------------------------------------------
# bimodule evaluation: ((chi (x) xi) * ch K)(x) = sum_a [h_a x in K t K]
# ---------------------------------------------------------------------------

def eval_pair_split(ell: int, mu, lam, x: Mat) -> int:
    """Value of (ch(U t(mu) U) (x) ch(K t(lam)^{-1} K)) * ch(K) at x."""
    tgt = tuple(sorted((-lam[0], -lam[1], -lam[2]), reverse=True))
    total = 0
    for h in left_cosets_split(ell, mu):
        y = h * x
        if divisor_label(y, ell) == tgt:
            total += 1
    return total


_RAW_CACHE: dict = {}


def _raw_reps_inert(ctx: LocalContext, label):
    """Raw pair-matrix forms of the single-coset representatives, cached."""
    key = (ctx.ell, ctx.d0, tuple(label))
    if key not in _RAW_CACHE:
        ell = ctx.ell
        _RAW_CACHE[key] = [
            (tuple(tuple((q.u.a, q.u.b) for q in row) for row in g.mat.rows), lval(g.nu, ell))
            for g in decompose_inert(ctx, label)
        ]
    return _RAW_CACHE[key]


def _raw_left_cosets_inert(ctx: LocalContext, mu):
    key = ("lc", ctx.ell, ctx.d0, tuple(mu))
    if key not in _RAW_CACHE:
        ell = ctx.ell
        _RAW_CACHE[key] = [
            (tuple(tuple((q.u.a, q.u.b) for q in row) for row in g.mat.rows), lval(g.nu, ell))
            for g in left_cosets_inert(ctx, mu)
        ]
    return _RAW_CACHE[key]


def _raw_canon_inert(A, vnu, ell):
    """(mu, lam) of the n0-form cell from the raw invariants."""
    if vnu % 2:
        raise ValueError("odd similitude valuation")
    mu2 = vnu // 2
    vrow = None
    for (a, b) in A[1]:
        if a:
            v = lval(a, ell)
            if vrow is None or v < vrow:
                vrow = v
        if b:
            v = lval(b, ell)
            if vrow is None or v < vrow:
                vrow = v
    d1 = vrow
    for row in (A[0], A[2]):
        for (a, b) in row:
            if a:
                v = lval(a, ell)
                if v < d1:
                    d1 = v
            if b:
                v = lval(b, ell)
                if v < d1:
                    d1 = v
    lam1 = mu2 - vrow
    mu1 = 2 * mu2 - lam1 - d1
    return ((mu1, mu2), (lam1, 0))


def cartan_label_inert_fast(g: GElement):
    """(m1, m2) from the similitude and the minimal entry valuation alone.

    The divisor multiset of any double-coset member is {m1, m2, 2m2-m1}, so
    the smallest entry valuation is 2 m2 - m1; no minors are needed. The
    slow path cartan_label_inert keeps the full consistency assertion.
    """
    ell = g.ctx.ell
    vn = lval(g.nu, ell)
    if vn % 2:
        raise ValueError("odd similitude valuation")
    m2 = vn // 2
    d1 = min(
        min(lval(q.u.a, ell), lval(q.u.b, ell))
        for r in g.mat.rows
        for q in r
        if not q.is_zero()
    )
    return (2 * m2 - d1, m2)


def eval_pair_inert(ctx: LocalContext, mu, lam, x: GElement) -> int:
    ell = ctx.ell
    disc = ctx.disc
    t_inv = t_m2_inert(ctx, (-lam[0], -lam[1]))
    tgt = cartan_label_inert(t_inv)
    xraw = tuple(tuple((q.u.a, q.u.b) for q in row) for row in x.mat.rows)
    vx = lval(x.nu, ell)
    total = 0
    for hr, hv in _raw_left_cosets_inert(ctx, mu):
        vn = hv + vx
        if vn % 2:
            continue
        lab = _raw_label_inert(_raw_mul_inert(hr, xraw, disc), vn // 2, ell)
        if lab == tgt:
            total += 1
    return total


def eval_certificate_split(ell: int, terms, x: Mat) -> Fraction:
    out = Fraction(0)
    for (mu, lam), coeff in terms.items():
        if coeff:
            out += coeff * eval_pair_split(ell, mu, lam, x)
    return out


def eval_certificate_inert(ctx: LocalContext, terms, x: GElement) -> Fraction:
    out = Fraction(0)
    for (mu, lam), coeff in terms.items():
        if coeff:
            out += coeff * eval_pair_inert(ctx, mu, lam, x)
    return out


# ---------------------------------------------------------------------------
# support scan (the key support lemma, verified by exhaustion)
# ---------------------------------------------------------------------------

def support_scan_split(ell: int, mu, lam) -> list:
    """Labels (mu', lam') whose n1-cell meets U t(mu)^{-1} K t(lam)^{-1} K.

    Computed by canonicalizing t(mu)^{-1} g_j over single cosets g_j K of
    K t(lam)^{-1} K. Asserts the support inequalities on every hit:
    lam1' <= lam1, and at equality the strict refinement.
    """
    tmu_inv = _diag3(ell, [-x for x in mu])
    tgt = tuple(sorted((-lam[0], -lam[1], -lam[2]), reverse=True))
    hits = {}
    for r in decompose_gl(tgt, ell):
        p = tmu_inv * r
        lab = canon_n1_split(p, ell)
        hits[(lab.mu, lab.lam)] = lab
    me = SplitLabel(tuple(mu), tuple(lam))
    for lab in hits.values():
        if (lab.mu, lab.lam) == (me.mu, me.lam):
            continue
        assert lab.lam[0] <= me.lam[0], f"support violation {lab} from {me}"
        if lab.lam[0] == me.lam[0]:
            lhs = (lab.mu[0] - lab.mu[1]) + (lab.lam[0] - lab.lam[1])
            rhs = (me.mu[0] - me.mu[1]) + (me.lam[0] - me.lam[1])
            assert lhs <= rhs, f"refinement violation {lab} from {me}"
            if lhs == rhs:
                assert lab.mu[0] - lab.mu[1] < me.mu[0] - me.mu[1], (
                    f"strictness violation {lab} from {me}"
                )
        assert lab.s_order() < me.s_order(), f"descent violation {lab} from {me}"
    return sorted(hits.values(), key=lambda l: (l.mu, l.lam))


def support_scan_inert(ctx: LocalContext, mu, lam) -> list:
    """n0-labels met by supp((ch(U t(mu*) U) (x) ch(K t(lam)^{-1} K)) * chK)
    for mu* = dual_mu_inert(mu); asserts similitude constancy and strict
    lexicographic descent off the target label (mu, lam)."""
    ell = ctx.ell
    disc = ctx.disc
    mu_star = dual_mu_inert(mu)
    t_inv = t_m2_inert(ctx, (-mu_star[0], -mu_star[1]))
    t_raw = tuple(tuple((q.u.a, q.u.b) for q in row) for row in t_inv.mat.rows)
    t_nu = lval(t_inv.nu, ell)
    lam_inv_label = cartan_label_inert(t_m2_inert(ctx, (-lam[0], -lam[1])))
    hits = {}
    for rr, rv in _raw_reps_inert(ctx, lam_inv_label):
        key = _raw_canon_inert(_raw_mul_inert(t_raw, rr, disc), t_nu + rv, ell)
        if key not in hits:
            hits[key] = InertLabel(*key)
    me = InertLabel(tuple(mu), tuple(lam))
    for lab in hits.values():
        if (lab.mu, lab.lam) == (me.mu, me.lam):
            continue
        assert lab.mu[1] == me.mu[1], f"similitude violation {lab} from {me}"
        assert lab.lam[0] <= me.lam[0], f"support violation {lab} from {me}"
        if lab.lam[0] == me.lam[0]:
            assert lab.mu[0] - lab.mu[1] < me.mu[0] - me.mu[1], (
                f"strictness violation {lab} from {me}"
            )
        assert lab.s_order() < me.s_order(), f"descent violation {lab} from {me}"
    return sorted(hits.values(), key=lambda l: (l.mu, l.lam))


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------

@dataclass
class CyclicityCertificate:
    place: str
    ell: int
    label: tuple  # (mu, lam)
    terms: dict  # (mu_alpha, lam_beta) -> Fraction
    descent_trace: list
    replay: dict | None = None
    term_support: dict | None = None  # term key -> {cell label: pair value}

    def to_json(self) -> str:
        return json.dumps(
            {
                "schema": "cyclicity-certificate/1",
                "place": self.place,
                "ell": self.ell,
                "label": [list(self.label[0]), list(self.label[1])],
                "terms": [
                    {
                        "alpha": list(mu),
                        "beta": list(lam),
                        "coeff": str(c),
                    }
                    for (mu, lam), c in sorted(self.terms.items())
                    if c
                ],
                "replay": self.replay,
            },
            indent=1,
            sort_keys=True,
        )


class SplitCyclicity:
    """Decomposition engine for the split bimodule at a fixed prime."""

    def __init__(self, ell: int, bound: int = 2):
        self.ell = ell
        self.bound = bound
        self.memo: dict = {}
        self.expansions: dict = {}
        self._injectivity_checked = set()

    def _check_injectivity(self, lab: SplitLabel):
        key = (lab.mu, lab.lam)
        if key in self._injectivity_checked:
            return
        p = cell_point_n1_split(self.ell, lab)
        got = canon_n1_split(p, self.ell)
        if (got.mu, got.lam) != key:
            raise ArithmeticError(f"label collision: {key} canonicalizes to {got}")
        self._injectivity_checked.add(key)

    def decompose(self, mu, lam, _depth=0) -> dict:
        """Certificate terms for the cell U t(mu)^{-1} n1 t(lam)^{-1} K."""
        key = (tuple(mu), tuple(lam))
        if key in self.memo:
            return self.memo[key]
        if _depth > 200:
            raise NonTermination("recursion depth exceeded; canonicalization bug?")
        ell = self.ell
        me = SplitLabel(*key)
        self._check_injectivity(me)
        if me.lam[0] == 0:
            # base case: ch(U t(mu)^{-1} K) = ch(U t(mu) U) * ch(K)
            terms = {(key[0], (0, 0, 0)): Fraction(1)}
            self.expansions[(key[0], (0, 0, 0))] = {key: Fraction(1)}
            self.memo[key] = terms
            return terms
        hits = support_scan_split(ell, mu, lam)
        point_of = {
            (l.mu, l.lam): cell_point_n1_split(ell, l) for l in hits
        }
        c_self = eval_pair_split(ell, mu, lam, point_of[key])
        if c_self == 0:
            raise ArithmeticError(f"target cell has zero coefficient at {key}")
        terms = {key: Fraction(1, c_self)}
        expansion = {key: Fraction(c_self)}
        for l in hits:
            lkey = (l.mu, l.lam)
            if lkey == key:
                continue
            self._check_injectivity(l)
            c = eval_pair_split(ell, mu, lam, point_of[lkey])
            if c == 0:
                continue
            expansion[lkey] = Fraction(c)
            assert l.s_order() < me.s_order(), "descent failure"
            sub = self.decompose(l.mu, l.lam, _depth + 1)
            for skey, sc in sub.items():
                terms[skey] = terms.get(skey, Fraction(0)) - Fraction(c, c_self) * sc
        self.expansions[key] = expansion
        self.memo[key] = terms
        return terms

    def certificate(self, mu, lam) -> CyclicityCertificate:
        terms = self.decompose(mu, lam)
        support = {k: dict(self.expansions[k]) for k in terms if k in self.expansions}
        return CyclicityCertificate(
            "split", self.ell, (tuple(mu), tuple(lam)), dict(terms), [], term_support=support
        )


class InertCyclicity:
    def __init__(self, ctx: LocalContext, bound: int = 2):
        self.ctx = ctx
        self.bound = bound
        self.memo: dict = {}
        self.expansions: dict = {}
        self._injectivity_checked = set()

    def _check_injectivity(self, lab: InertLabel):
        key = (lab.mu, lab.lam)
        if key in self._injectivity_checked:
            return
        p = cell_point_inert(self.ctx, lab)
        got = canonicalize_inert(p)
        if (got.mu, got.lam) != key:
            raise ArithmeticError(f"label collision: {key} canonicalizes to {got}")
        self._injectivity_checked.add(key)

    def decompose(self, mu, lam, _depth=0) -> dict:
        """Certificate terms for the cell U t(mu) n0 t(lam) K."""
        key = (tuple(mu), tuple(lam))
        if key in self.memo:
            return self.memo[key]
        if _depth > 200:
            raise NonTermination("recursion depth exceeded")
        me = InertLabel(*key)
        self._check_injectivity(me)
        mu_star = dual_mu_inert(me.mu)
        if me.lam[0] == 0:
            # U t(mu) n0 K = U t(mu) K = supp of (ch(U t(mu*) U) (x) ch(K)) * chK
            terms = {(mu_star, (0, 0)): Fraction(1)}
            self.expansions[(mu_star, (0, 0))] = {key: Fraction(1)}
            self.memo[key] = terms
            return terms
        hits = support_scan_inert(self.ctx, mu, lam)
        point_of = {(l.mu, l.lam): cell_point_inert(self.ctx, l) for l in hits}
        c_self = eval_pair_inert(self.ctx, mu_star, lam, point_of[key])
        if c_self == 0:
            raise ArithmeticError(f"target cell has zero coefficient at {key}")
        terms = {(mu_star, tuple(lam)): Fraction(1, c_self)}
        expansion = {key: Fraction(c_self)}
        for l in hits:
            lkey = (l.mu, l.lam)
            if lkey == key:
                continue
            self._check_injectivity(l)
            c = eval_pair_inert(self.ctx, mu_star, lam, point_of[lkey])
            if c == 0:
                continue
            expansion[lkey] = Fraction(c)
            assert l.s_order() < me.s_order(), "descent failure"
            sub = self.decompose(l.mu, l.lam, _depth + 1)
            for skey, sc in sub.items():
                terms[skey] = terms.get(skey, Fraction(0)) - Fraction(c, c_self) * sc
        self.expansions[(mu_star, tuple(lam))] = expansion
        self.memo[key] = terms
        return terms

    def certificate(self, mu, lam) -> CyclicityCertificate:
        terms = self.decompose(mu, lam)
        support = {k: dict(self.expansions[k]) for k in terms if k in self.expansions}
        return CyclicityCertificate(
            "inert", self.ctx.ell, (tuple(mu), tuple(lam)), dict(terms), [], term_support=support
        )


# ---------------------------------------------------------------------------
# replay
# ---------------------------------------------------------------------------

def replay_grid_split(ell: int, bound: int, n_points: int, seed: int = 7):
    """Sample points: random u * cell * k products across labels + noise."""
    import random

    rng = random.Random(seed)
    pts = []
    labels = all_labels_split(bound)
    while len(pts) < n_points:
        mu, lam = labels[rng.randrange(len(labels))]
        p = cell_point_n1_split(ell, SplitLabel(mu, lam))
        u = _random_u_split(ell, rng)
        k = _random_k_gl3(ell, rng)
        pts.append(u * p * k)
    return pts


def _random_u_split(ell, rng) -> Mat:
    while True:
        A = Mat([[_f(rng.randint(-4, 4)) for _ in range(2)] for _ in range(2)])
        d = A.det()
        if d != 0 and lval(d, ell) == 0:
            return _u_block(A, rng.choice([1, 1 + ell, -1]))


def _random_k_gl3(ell, rng) -> Mat:
    while True:
        k = Mat([[_f(rng.randint(-4, 4)) for _ in range(3)] for _ in range(3)])
        d = k.det()
        if d != 0 and lval(d, ell) == 0:
            return k


def all_labels_split(bound: int):
    out = []
    for m1 in range(-bound, bound + 1):
        for m2 in range(-bound, m1 + 1):
            for m3 in range(-bound, bound + 1):
                for l1 in range(0, bound + 1):
                    for l2 in range(0, l1 + 1):
                        out.append(((m1, m2, m3), (l1, l2, 0)))
    return out


def all_labels_inert(bound: int):
    out = []
    for m1 in range(-bound, bound + 1):
        for m2 in range(-bound, m1 + 1):
            for l1 in range(0, bound + 1):
                out.append(((m1, m2), (l1, 0)))
    return out


def replay_certificate_split(cert: CyclicityCertificate, points, ell: int) -> dict:
    """Pointwise residual of the certificate on the sample grid."""
    target = SplitLabel(*cert.label)
    bad = 0
    for x in points:
        want = Fraction(1) if _point_in_cell_split(x, target, ell) else Fraction(0)
        got = eval_certificate_split(ell, cert.terms, x)
        if got != want:
            bad += 1
    return {"grid_size": len(points), "residual_max": bad}


def _point_in_cell_split(x: Mat, lab: SplitLabel, ell: int) -> bool:
    got = canon_n1_split(x, ell)
    return (got.mu, got.lam) == (lab.mu, lab.lam)


def replay_certificate_inert(cert: CyclicityCertificate, points, ctx: LocalContext) -> dict:
    target = InertLabel(*cert.label)
    bad = 0
    for x in points:
        got_lab = canonicalize_inert(x)
        want = Fraction(1) if (got_lab.mu, got_lab.lam) == (target.mu, target.lam) else Fraction(0)
        got = eval_certificate_inert(ctx, cert.terms, x)
        if got != want:
            bad += 1
    return {"grid_size": len(points), "residual_max": bad}


def _fast_label3(rows, ell: int):
    """Divisor label of an invertible 3x3 rational matrix, minimal overhead."""
    d1 = None
    for r in rows:
        for x in r:
            if x:
                v = lval(x, ell)
                if d1 is None or v < d1:
                    d1 = v
    r0, r1, r2 = rows
    minors = (
        r0[0] * r1[1] - r0[1] * r1[0],
        r0[0] * r1[2] - r0[2] * r1[0],
        r0[1] * r1[2] - r0[2] * r1[1],
        r0[0] * r2[1] - r0[1] * r2[0],
        r0[0] * r2[2] - r0[2] * r2[0],
        r0[1] * r2[2] - r0[2] * r2[1],
        r1[0] * r2[1] - r1[1] * r2[0],
        r1[0] * r2[2] - r1[2] * r2[0],
        r1[1] * r2[2] - r1[2] * r2[1],
    )
    d2 = None
    for m in minors:
        if m:
            v = lval(m, ell)
            if d2 is None or v < d2:
                d2 = v
    det = r0[0] * minors[8] - r0[1] * minors[7] + r0[2] * minors[6]
    d3 = lval(det, ell)
    return tuple(sorted((d1, d2 - d1, d3 - d2), reverse=True))


def _mat_rows_mul(A, B):
    return tuple(
        tuple(A[i][0] * B[0][j] + A[i][1] * B[1][j] + A[i][2] * B[2][j] for j in range(3))
        for i in range(3)
    )


def batch_replay_split(certs: list, points, ell: int) -> list:
    """Replay certificates on a shared grid.

    The pair functions are U-left-K-right invariant by construction, so the
    value at x equals the value at the cell point of canon(x); points are
    canonicalized (exercising the reduction on arbitrary grid elements) and
    term values are memoized per (term, label). Base terms (lam = 0) have
    supp = one cell, evaluated by label equality after a sampled
    cross-check against the coset sum.
    """
    canon_pts = [canon_n1_split(x, ell) for x in points]
    memo: dict = {}
    spot = [2]

    def term_value(c, mu, lam, lab):
        if c.term_support is not None and (mu, lam) in c.term_support:
            val = c.term_support[(mu, lam)].get(lab, Fraction(0))
            # spot-check the recorded expansion against the direct coset sum
            if spot[0] > 0:
                pt = cell_point_n1_split(ell, SplitLabel(*lab))
                assert val == eval_pair_split(ell, mu, lam, pt)
                spot[0] -= 1
            return val
        key = (mu, lam, lab)
        if key in memo:
            return memo[key]
        pt = cell_point_n1_split(ell, SplitLabel(*lab))
        val = Fraction(eval_pair_split(ell, mu, lam, pt))
        memo[key] = val
        return val

    out = []
    for c in certs:
        target = tuple(c.label)
        bad = 0
        for l in canon_pts:
            lab = (l.mu, l.lam)
            want = Fraction(1) if lab == (target[0], target[1]) else Fraction(0)
            got = Fraction(0)
            for (mu, lam), coeff in c.terms.items():
                if coeff:
                    got += coeff * term_value(c, mu, lam, lab)
            if got != want:
                bad += 1
        out.append({"grid_size": len(points), "residual_max": bad})
    return out


def _raw_inert(g: GElement):
    """((a,b) pairs) x 3x3 + nu: bypasses the EScalar wrappers in hot loops."""
    return (
        tuple(tuple((q.u.a, q.u.b) for q in row) for row in g.mat.rows),
        g.nu,
    )


def _raw_mul_inert(A, B, disc):
    out = []
    for i in range(3):
        row = []
        for j in range(3):
            a = b = Fraction(0)
            for k in range(3):
                xa, xb = A[i][k]
                ya, yb = B[k][j]
                a += xa * ya - disc * xb * yb
                b += xa * yb + xb * ya
            row.append((a, b))
        out.append(tuple(row))
    return tuple(out)


def _raw_label_inert(A, vnu_half, ell):
    d1 = None
    for row in A:
        for (a, b) in row:
            if a:
                v = lval(a, ell)
                if d1 is None or v < d1:
                    d1 = v
            if b:
                v = lval(b, ell)
                if d1 is None or v < d1:
                    d1 = v
    return (2 * vnu_half - d1, vnu_half)


def batch_replay_inert(certs: list, points, ctx: LocalContext) -> list:
    """Inert analog of batch_replay_split (label-memoized, exact)."""
    canon_pts = [canonicalize_inert(x) for x in points]
    memo: dict = {}
    spot = [2]

    def term_value(c, mu, lam, lab):
        if c.term_support is not None and (mu, lam) in c.term_support:
            val = c.term_support[(mu, lam)].get(lab, Fraction(0))
            if spot[0] > 0:
                pt = cell_point_inert(ctx, InertLabel(*lab))
                assert val == eval_pair_inert(ctx, mu, lam, pt)
                spot[0] -= 1
            return val
        key = (mu, lam, lab)
        if key in memo:
            return memo[key]
        pt = cell_point_inert(ctx, InertLabel(*lab))
        val = Fraction(eval_pair_inert(ctx, mu, lam, pt))
        memo[key] = val
        return val

    out = []
    for c in certs:
        target = tuple(c.label)
        bad = 0
        for l in canon_pts:
            lab = (l.mu, l.lam)
            want = Fraction(1) if lab == (target[0], target[1]) else Fraction(0)
            got = Fraction(0)
            for (mu, lam), coeff in c.terms.items():
                if coeff:
                    got += coeff * term_value(c, mu, lam, lab)
            if got != want:
                bad += 1
        out.append({"grid_size": len(points), "residual_max": bad})
    return out


def replay_grid_inert(ctx: LocalContext, bound: int, n_points: int, seed: int = 7):
    import random

    from .grouptheory import n_st, random_escalar, random_h_element

    rng = random.Random(seed)
    labels = all_labels_inert(bound)
    pts = []
    while len(pts) < n_points:
        mu, lam = labels[rng.randrange(len(labels))]
        p = cell_point_inert(ctx, InertLabel(mu, lam))
        u = iota(random_h_element(ctx, rng, integral=True))
        k = u
        k2 = n_st(ctx, random_escalar(ctx, rng, integral=True), rng.randint(-2, 2))
        pts.append(u * p * (k2 * iota(random_h_element(ctx, rng, integral=True))))
    return pts