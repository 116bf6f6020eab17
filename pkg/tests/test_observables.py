import cmath
import math

import numpy as np
import pytest

from nillab.dynamics import rho
from nillab.heisenberg import GroupElement, canonical_rep, mul, nil_point
from nillab.observables import (
    BumpProfile,
    JoiningObservable,
    Observable,
    eval_joining_observable,
    eval_observable,
    fiber_average,
)


def test_bump_geometry_validation():
    BumpProfile((0.5, 0.5), 0.25)
    with pytest.raises(ValueError):
        BumpProfile((0.5, 0.5), 0.45)  # support leaks into the margin
    with pytest.raises(ValueError):
        BumpProfile((0.2, 0.5), 0.125)
    with pytest.raises(ValueError):
        BumpProfile((0.5, 0.5), -0.1)


def test_bump_peak_and_support():
    bump = BumpProfile((0.5, 0.5), 0.25)
    assert bump(0.5, 0.5) == 1.0
    assert bump(0.24, 0.5) == 0.0
    assert bump(0.5, 0.76) == 0.0
    assert 0.0 < bump(0.4, 0.55) < 1.0


def test_observable_validation():
    with pytest.raises(ValueError):
        Observable(xi=1)  # missing bump
    with pytest.raises(ValueError):
        Observable(xi=0)  # missing base mode
    with pytest.raises(ValueError):
        Observable(xi=0, bump=BumpProfile(), base_mode=(0, 0))


def test_eval_at_bump_center():
    obs = Observable(xi=1, bump=BumpProfile())
    pt = nil_point(0.5, 0.5, 0.25)
    val = eval_observable(obs, pt)
    assert abs(val - cmath.exp(2j * math.pi * 0.25)) < 1e-15


def test_vertical_equivariance_exact():
    obs = Observable(xi=3, bump=BumpProfile())
    for s in (0.5, 0.125, 0.8304):
        for coords in [(0.5, 0.5, 0.25), (0.41, 0.6, 0.9)]:
            pt = nil_point(*coords)
            shifted = canonical_rep(
                mul(GroupElement.fixed(0, 0, s), pt.rep)
            )
            lhs = eval_observable(obs, shifted)
            rhs = cmath.exp(2j * math.pi * obs.xi * s) * eval_observable(obs, pt)
            assert abs(lhs - rhs) < 1e-12


def test_half_turn_flips_sign():
    obs = Observable(xi=1, bump=BumpProfile())
    pt = nil_point(0.5, 0.5, 0.1)
    shifted = nil_point(0.5, 0.5, 0.6)
    assert abs(eval_observable(obs, shifted) + eval_observable(obs, pt)) < 1e-14


def test_outside_support_is_zero():
    obs = Observable(xi=1, bump=BumpProfile())
    assert eval_observable(obs, nil_point(0.1, 0.5, 0.3)) == 0.0


def test_continuity_across_gluing():
    """Approaching the fundamental-domain boundary, F -> 0: the jump of the
    z chart is killed by the vanishing bump."""
    obs = Observable(xi=1, bump=BumpProfile())
    eps = 1e-9
    for y in np.linspace(0.05, 0.95, 7):
        left = eval_observable(obs, nil_point(eps, float(y), 0.37))
        right = eval_observable(obs, nil_point(1 - eps, float(y), 0.37))
        assert abs(left) < 1e-8 and abs(right) < 1e-8


def test_fiber_average_orthogonality():
    for xi, m in ((1, 16), (2, 8), (3, 32)):
        obs = Observable(xi=xi, bump=BumpProfile())
        assert abs(fiber_average(obs, (0.5, 0.5), m)) <= 1e-12


def test_fiber_average_constant_mode():
    obs = Observable(xi=0, base_mode=(0, 0))
    assert fiber_average(obs, (0.3, 0.9), 4) == 1.0


def test_fiber_average_quadrature_precondition():
    obs = Observable(xi=3, bump=BumpProfile())
    with pytest.raises(ValueError):
        fiber_average(obs, (0.5, 0.5), 7)


def test_base_mode_values():
    obs = Observable(xi=0, base_mode=(2, -1))
    val = complex(obs.eval_arrays(0.25, 0.5, 0.9))
    assert abs(val - cmath.exp(2j * math.pi * (2 * 0.25 - 0.5))) < 1e-15


# -- the descended pair observable ----------------------------------------------


def test_joining_observable_requires_nonzero_xi():
    with pytest.raises(ValueError):
        JoiningObservable(Observable(xi=0, base_mode=(0, 0)), 3, 2)


def test_pair_value_at_identity():
    obs = Observable(xi=1, bump=BumpProfile())
    jobs = JoiningObservable(obs, 3, 2)
    pt = nil_point(0.5, 0.5, 0.0)
    assert abs(jobs.eval_pair(pt, pt) - abs(eval_observable(obs, pt)) ** 2) < 1e-15


def test_diagonal_central_invariance():
    obs = Observable(xi=2, bump=BumpProfile())
    jobs = JoiningObservable(obs, 3, 2)
    a = nil_point(0.5, 0.5, 0.2)
    b = nil_point(0.45, 0.55, 0.7)
    base = jobs.eval_pair(a, b)
    for s in (0.3, 0.77):
        sa = canonical_rep(mul(GroupElement.fixed(0, 0, s), a.rep))
        sb = canonical_rep(mul(GroupElement.fixed(0, 0, s), b.rep))
        assert abs(jobs.eval_pair(sa, sb) - base) < 1e-12


def test_descent_agrees_with_pair_route(std_sys, std_js, rng):
    """f1 on the lifted pair equals f_star at the projected star point."""
    from nillab.dynamics import pair_orbit_element
    from nillab.heisenberg import project_pi

    obs = Observable(xi=1, bump=BumpProfile())
    jobs = JoiningObservable(obs, 3, 2)
    for n in rng.integers(1, 400, size=12):
        n = int(n)
        first, second = pair_orbit_element(std_sys, 3, 2, n)
        f1 = jobs.eval_pair(canonical_rep(first), canonical_rep(second))
        star = canonical_rep(project_pi(
            (first.x, first.y, first.z, second.x, second.y, second.z), 3, 2
        ))
        fstar = eval_joining_observable(jobs, rho(star))
        assert abs(f1 - fstar) <= 1e-9


def test_descent_well_defined_under_star_lattice(std_js, rng):
    """f_star must not depend on the star-coset representative."""
    obs = Observable(xi=1, bump=BumpProfile())
    jobs = JoiningObservable(obs, 3, 2)
    for _ in range(20):
        x, y, z = (float(v) for v in rng.random(3))
        v1 = eval_joining_observable(jobs, (x, y, z))
        ge = GroupElement.floating(x, y, z, std_js.law)
        gamma = GroupElement.floating(
            int(rng.integers(-3, 4)), int(rng.integers(-3, 4)), int(rng.integers(-3, 4)),
            std_js.law,
        )
        moved = canonical_rep(mul(ge, gamma))
        v2 = eval_joining_observable(jobs, tuple(float(c) for c in moved.coords()))
        assert abs(v1 - v2) < 1e-9
