import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nillab.fixedpoint import FixedReal
from nillab.heisenberg import (
    HEISENBERG,
    GroupElement,
    GroupLaw,
    JoiningPair,
    LatticeElement,
    LawMismatch,
    canonical_rep,
    identity,
    inv,
    joining_membership,
    lattice_floor,
    mul,
    nil_point,
    project_pi,
)

STAR5 = GroupLaw.star(3, 2)

fixed_vals = st.integers(min_value=-(4 << 64), max_value=4 << 64).map(FixedReal.from_q64)
laws = st.sampled_from([HEISENBERG, STAR5, GroupLaw.star(7, 5)])


@st.composite
def elements(draw, law=None):
    lw = law if law is not None else draw(laws)
    return GroupElement(draw(fixed_vals), draw(fixed_vals), draw(fixed_vals), lw)


# -- law construction ---------------------------------------------------------


def test_star_law_twist():
    assert STAR5.twist == 5
    assert GroupLaw.star(7, 5).twist == 24
    with pytest.raises(ValueError):
        GroupLaw.star(4, 2)
    with pytest.raises(ValueError):
        GroupLaw.star(2, 3)
    with pytest.raises(ValueError):
        GroupLaw("heisenberg", 2)
    with pytest.raises(ValueError):
        GroupLaw("star", 0)


# -- multiplication examples --------------------------------------------------


def test_mul_heisenberg_unit_example():
    out = mul(GroupElement.fixed(1, 0, 0), GroupElement.fixed(0, 1, 0))
    assert out.coords() == (FixedReal(1), FixedReal(1), FixedReal(1))


def test_mul_star_unit_example():
    out = mul(GroupElement.fixed(1, 0, 0, STAR5), GroupElement.fixed(0, 1, 0, STAR5))
    assert out.coords() == (FixedReal(1), FixedReal(1), FixedReal(5))


def test_mul_half_example():
    out = mul(GroupElement.fixed(0.5, 0, 0), GroupElement.fixed(0, 0.5, 0))
    assert out.coords() == (FixedReal(0.5), FixedReal(0.5), FixedReal(0.25))


def test_mul_law_mismatch():
    with pytest.raises(LawMismatch):
        mul(GroupElement.fixed(0, 0, 0), GroupElement.fixed(0, 0, 0, STAR5))
    with pytest.raises(LawMismatch):
        mul(GroupElement.fixed(0, 0, 0), GroupElement.floating(0, 0, 0))


def test_inv_examples():
    g = GroupElement.fixed(1, 2, 3)
    assert inv(g).coords() == (FixedReal(-1), FixedReal(-2), FixedReal(-3))
    assert mul(g, inv(g)).coords() == identity().coords()
    assert inv(identity()).coords() == identity().coords()
    s = GroupElement.fixed(0.5, 0.5, 0.75, STAR5)
    assert inv(s).coords() == (FixedReal(-0.5), FixedReal(-0.5), FixedReal(-0.75))
    assert mul(s, inv(s)).coords() == identity(STAR5).coords()


# -- algebraic properties (exact) ---------------------------------------------


@given(st.data(), laws)
def test_associativity(data, law):
    a = data.draw(elements(law))
    b = data.draw(elements(law))
    c = data.draw(elements(law))
    assert mul(mul(a, b), c).coords() == mul(a, mul(b, c)).coords()


@given(st.data(), laws)
def test_inverse_property(data, law):
    g = data.draw(elements(law))
    assert mul(g, inv(g)).coords() == identity(law).coords()
    assert mul(inv(g), g).coords() == identity(law).coords()


@given(st.integers(-9, 9), st.integers(-9, 9), st.integers(-9, 9),
       st.integers(-9, 9), st.integers(-9, 9), st.integers(-9, 9), laws)
def test_lattice_closure(a1, b1, m1, a2, b2, m2, law):
    g = mul(LatticeElement(a1, b1, m1).to_group(law), LatticeElement(a2, b2, m2).to_group(law))
    assert all(v.frac().scaled == 0 for v in g.coords())


@given(st.data(), laws, st.integers(-5, 5), st.integers(-5, 5), st.integers(-5, 5))
def test_reduction_coset_invariance(data, law, a, b, m):
    g = data.draw(elements(law))
    gamma = LatticeElement(a, b, m).to_group(law)
    assert canonical_rep(mul(g, gamma)).coords() == canonical_rep(g).coords()


@given(st.data(), laws)
def test_canonical_fast_path_equals_composition(data, law):
    g = data.draw(elements(law))
    fast = canonical_rep(g)
    gamma = lattice_floor(g).to_group(law)
    assert fast.coords() == mul(g, inv(gamma)).coords()


@given(st.data(), laws)
def test_reduction_idempotent_and_in_box(data, law):
    g = data.draw(elements(law))
    pt = canonical_rep(g)
    for v in pt.coords():
        assert 0 <= v < 1
    assert canonical_rep(pt.rep).coords() == pt.coords()


@given(st.data(), laws, st.integers(-7, 7))
def test_centrality(data, law, m):
    g = data.draw(elements(law))
    z = GroupElement.fixed(0, 0, m, law)
    assert mul(g, z).coords() == mul(z, g).coords()


# -- reduction examples -------------------------------------------------------


def test_lattice_floor_examples():
    assert lattice_floor(GroupElement.fixed(1.5, 0.5, 0.25, STAR5)) == LatticeElement(1, 0, 2)
    assert lattice_floor(GroupElement.fixed(0.3, 0.7, 0.9)) == LatticeElement(0, 0, 0)
    assert lattice_floor(GroupElement.fixed(0.3, 0.7, 0.9, STAR5)) == LatticeElement(0, 0, 0)
    assert lattice_floor(GroupElement.fixed(1.5, 0.5, 0.25)) == LatticeElement(1, 0, 0)


def test_lattice_floor_reduces_into_box():
    g = GroupElement.fixed(1.5, 0.5, 0.25, STAR5)
    gamma = lattice_floor(g).to_group(STAR5)
    red = mul(g, inv(gamma))
    assert all(0 <= v < 1 for v in red.coords())


def test_canonical_rep_examples():
    pt = canonical_rep(GroupElement.fixed(1.5, 0.5, 0.25, STAR5))
    assert pt.coords() == (FixedReal(0.5), FixedReal(0.5), FixedReal(0.75))
    assert canonical_rep(identity()).coords() == identity().coords()
    pt2 = canonical_rep(GroupElement.fixed(1.5, 0.5, 0.25))
    assert pt2.coords() == (FixedReal(0.5), FixedReal(0.5), FixedReal(0.75))


def test_float_path_mirrors_fixed(rng):
    for _ in range(300):
        x, y, z = (float(v) for v in rng.uniform(-3, 3, size=3))
        for law in (HEISENBERG, STAR5):
            pf = canonical_rep(GroupElement.floating(x, y, z, law))
            pe = canonical_rep(GroupElement.fixed(x, y, z, law)).to_float()
            for a, b in zip(pf.coords(), pe.coords()):
                d = abs(a - b)
                assert min(d, 1 - d) <= 1e-12


# -- projection and the joining constraint ------------------------------------


def test_project_pi_example():
    out = project_pi((0.6, 0.3, 0.7, 0.4, 0.2, 0.3), 3, 2)
    assert out.law == STAR5
    assert math.isclose(float(out.x), 0.2)
    assert math.isclose(float(out.y), 0.1)
    assert math.isclose(float(out.z), 0.4)


def test_project_pi_identity():
    out = project_pi(tuple(FixedReal(0) for _ in range(6)), 3, 2)
    assert out.coords() == identity(STAR5).coords()


def test_project_pi_exact_constraint_violation():
    bad = (FixedReal(0.5), FixedReal(0), FixedReal(0),
           FixedReal(0.2), FixedReal(0), FixedReal(0))
    with pytest.raises(ValueError):
        project_pi(bad, 3, 2)
    with pytest.raises(ValueError):
        project_pi((0.5, 0.0, 0.0, 0.2, 0.0, 0.0), 3, 2)


@given(fixed_vals, fixed_vals, fixed_vals, fixed_vals, fixed_vals, fixed_vals)
def test_project_pi_morphism(x, y, z1, x2, y2, z2):
    """pi(g g') = pi(g) * pi(g') on exactly-constrained G_1 elements."""
    p, q = 3, 2
    g = (x * p, y * p, z1, x * q, y * q, z2)
    g2 = (x2 * p, y2 * p, z2, x2 * q, y2 * q, z1)

    def g1_mul(a, b):
        ax1, ay1, az1, ax2, ay2, az2 = a
        bx1, by1, bz1, bx2, by2, bz2 = b
        return (
            ax1 + bx1, ay1 + by1, az1 + bz1 + (ax1 * by1 - bx1 * ay1),
            ax2 + bx2, ay2 + by2, az2 + bz2 + (ax2 * by2 - bx2 * ay2),
        )

    lhs = project_pi(g1_mul(g, g2), p, q)
    rhs = mul(project_pi(g, p, q), project_pi(g2, p, q))
    assert lhs.coords() == rhs.coords()


@given(st.integers(-9, 9), st.integers(-9, 9), st.integers(-9, 9),
       st.integers(-9, 9), st.integers(-9, 9), st.integers(-9, 9))
def test_project_pi_maps_lattice_onto_integers(a, b, m1, c, d, m2):
    """Gamma_star = pi(Gamma_1): integer pair points project to integer points."""
    p, q = 3, 2
    g = (FixedReal(p * a), FixedReal(p * b), FixedReal(m1),
         FixedReal(q * a), FixedReal(q * b), FixedReal(m2))
    out = project_pi(g, p, q)
    assert all(v.frac().scaled == 0 for v in out.coords())


def test_joining_membership_examples():
    p, q = 3, 2
    first = GroupElement.fixed(0.3, 0.0, 0.0)
    second = GroupElement.fixed(0.0, 0.0, 0.0)
    assert not joining_membership(JoiningPair(first, second, p, q))
    half = GroupElement.fixed(0.5, 0.0, 0.0)
    assert joining_membership(JoiningPair(half, second, p, q))


def test_joining_membership_base_rotation():
    # (p alpha, p beta) vs (q alpha, q beta): q p alpha - p q alpha = 0
    alpha, beta = FixedReal(0.123), FixedReal(0.456)
    first = GroupElement(alpha * 3, beta * 3, FixedReal(0), HEISENBERG)
    second = GroupElement(alpha * 2, beta * 2, FixedReal(0), HEISENBERG)
    assert joining_membership(JoiningPair(first, second, 3, 2))


def test_nil_point_validation():
    with pytest.raises(ValueError):
        from nillab.heisenberg import NilPoint

        NilPoint(GroupElement.fixed(1.5, 0, 0))
    assert nil_point(1.5, 0.5, 0.25, STAR5).coords() == (
        FixedReal(0.5), FixedReal(0.5), FixedReal(0.75),
    )
