import pytest
from fractions import Fraction

from ulocal.branching import (
    NoInvariant,
    branching_multiplicity,
    branching_vector,
    build_rep,
    gl3_relations_hold,
    h_subrep_check,
    integrality_at,
    maximal_lattice_basis,
    tensor_intersection_contains,
    weyl_dim,
)


def test_dimensions():
    assert build_rep(1, 0).dim == 3
    assert build_rep(0, 1).dim == 3
    assert build_rep(1, 1).dim == 8
    assert build_rep(2, 1).dim == weyl_dim((1, 0, -2))
    # twist leaves dimension unchanged
    assert build_rep(1, 1, 1, 0).dim == 8


def test_gl3_relations():
    for (a, b) in [(1, 0), (1, 1), (2, 0), (2, 1)]:
        assert gl3_relations_hold(build_rep(a, b))


def test_dual_character_relation():
    # character of D^{a,b} = character of V^{a,b} dual with the det/nu shift:
    # weights of D^{a,b} core (hw (b,0,-a)) = negatives of V-core weights
    from ulocal.branching import build_core, weight_tuple

    a, b = 2, 1
    d = build_core(b, a)
    v = build_core(a, b)
    dw = sorted(weight_tuple(x) for x in d.basis)
    vw = sorted(tuple(-t for t in reversed(weight_tuple(x))) for x in v.basis)
    assert dw == vw


def test_trivial_and_small_branching():
    bv = branching_vector(0, 0, 0, 0)
    assert [str(c) for c in bv.coords] == ["1"]
    bv = branching_vector(1, 0, 1, 0)
    assert len(bv.coords) == 3
    r = h_subrep_check(bv)
    assert r["n"] == 0 and r["dim_ok"] and r["char_ok"]


def test_box_condition():
    with pytest.raises(NoInvariant):
        branching_vector(1, 0, -1, 0)
    with pytest.raises(NoInvariant):
        branching_vector(1, 1, 0, 2)


def test_subrep_examples():
    r = h_subrep_check(branching_vector(1, 1, 0, 0))
    assert r["n"] == 2 and r["dim"] == 3 and r["dim_ok"] and r["char_ok"]
    r = h_subrep_check(branching_vector(2, 1, 1, 0))
    assert r["n"] == 2 and r["dim"] == 3 and r["dim_ok"] and r["char_ok"]


def test_multiplicity_oracle():
    assert branching_multiplicity(1, 1, 0, 0) == 1
    assert branching_multiplicity(2, 1, 1, 1) == 1
    assert branching_multiplicity(2, 2, 0, 2) == 1


def test_integrality_examples():
    bv = branching_vector(0, 0, 0, 0)
    assert integrality_at(bv, 5)["integral"]
    bv = branching_vector(1, 0, 0, 0)
    for ell in (5, 7):
        assert integrality_at(bv, ell)["integral"]
    # ramified place reported, not judged
    rr = integrality_at(bv, 3)
    assert rr["ramified"] and not rr["integral"]
    assert tensor_intersection_contains(bv)


def test_normalization_recorded():
    bv = branching_vector(2, 0, 1, 0)
    assert not bv.hw_projection.is_zero()
    # re-normalized: the hw projection of u^{-1} br equals 1 now
    from ulocal.branching import group_action, u_matrix_over_e
    from ulocal.exactnum import Quad

    disc = bv.coords[0].disc
    vec = {}
    for c, bb in zip(bv.coords, bv.rep.basis):
        for k, v in bb.items():
            vec[k] = vec.get(k, Quad.of(0, disc)) + c * Quad.of(v, disc)
    moved = group_action(vec, u_matrix_over_e(disc).inv())
    qc = bv.rep.coords(moved, field_promote=lambda x: Quad.of(x, disc) if not isinstance(x, Quad) else x)
    assert qc[0] == Quad.of(1, disc)
