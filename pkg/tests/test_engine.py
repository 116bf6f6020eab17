import numpy as np
import pytest

from nillab.dynamics import BaseFunctionSpec, SkewSystem, TrigTerm, build_joining, iterate_T
from nillab.engine import (
    MASK64,
    OrbitSegmentPlan,
    StarDescentSink,
    _frac_int_parts,
    _n_times_q128,
    checkpoint_sums,
    mulhi_u64,
    orbit_points,
    orbit_stream,
    orbit_stream_multi,
    orbit_stream_naive,
    pair_factor_values,
    u64c,
)
from nillab.fixedpoint import FixedReal, sqrt_q64
from nillab.heisenberg import GroupElement, canonical_rep, identity
from nillab.observables import BumpProfile, Observable

ALPHA = sqrt_q64(2) - 1
BETA = sqrt_q64(3) - 1


def make_sys(terms=(TrigTerm(1, 0, 0.1, 0.0),), d1=1, d2=0):
    return SkewSystem(ALPHA, BETA, BaseFunctionSpec(d1, d2, terms))


# -- lane primitives vs big-int oracles ----------------------------------------


def test_mulhi_oracle(rng):
    a = rng.integers(0, 2**64 - 1, size=500, dtype=np.uint64, endpoint=True)
    b = rng.integers(0, 2**64 - 1, size=500, dtype=np.uint64, endpoint=True)
    hi = mulhi_u64(a, b)
    for i in range(500):
        assert int(hi[i]) == (int(a[i]) * int(b[i])) >> 64


def test_frac_int_parts_oracle(rng):
    base = int(rng.integers(0, 2**64 - 1, dtype=np.uint64, endpoint=True))
    step = int(rng.integers(0, 2**64 - 1, dtype=np.uint64, endpoint=True))
    n = rng.integers(0, 10**7, size=300, dtype=np.uint64)
    frac, ip = _frac_int_parts(u64c(base), u64c(step), n)
    for i in range(300):
        full = base + int(n[i]) * step
        assert int(frac[i]) == full & MASK64
        assert int(ip[i]) == full >> 64


def test_n_times_q128_oracle(rng):
    c = int(rng.integers(0, 2**63, dtype=np.uint64)) * int(
        rng.integers(0, 2**63, dtype=np.uint64)
    )
    c %= 1 << 128
    n = rng.integers(0, 10**7, size=200, dtype=np.uint64)
    hi, lo = _n_times_q128(c, n)
    for i in range(200):
        full = (int(n[i]) * c) % (1 << 128)
        assert int(lo[i]) == full & MASK64
        assert int(hi[i]) == full >> 64


# -- engine contracts -----------------------------------------------------------


def test_plan_validation():
    with pytest.raises(ValueError):
        OrbitSegmentPlan(0)
    with pytest.raises(ValueError):
        OrbitSegmentPlan(10, segment_size=100)
    with pytest.raises(ValueError):
        OrbitSegmentPlan(10, worker_count=0)
    with pytest.raises(ValueError):
        OrbitSegmentPlan(1 << 63)


def test_constant_sink_counts_steps():
    sys = make_sys()
    plan = OrbitSegmentPlan(1000, segment_size=128)
    out = orbit_stream(sys, None, plan, lambda x, y, z, n: np.ones_like(x), checkpoints=[1000])
    assert out[0] == (1000, complex(1000.0, 0.0))


def test_worker_count_invariance():
    sys = make_sys()
    obs = Observable(xi=1, bump=BumpProfile())
    cps = [100, 1000, 4096]
    runs = [
        orbit_stream(sys, None, OrbitSegmentPlan(4096, 512, w), obs, checkpoints=cps)
        for w in (1, 2, 8)
    ]
    assert runs[0] == runs[1] == runs[2]


def test_engine_equals_naive_loop():
    sys = make_sys(terms=(TrigTerm(1, 0, 0.1, 0.0), TrigTerm(1, 1, 0.05, 0.3)), d2=1)
    obs = Observable(xi=2, bump=BumpProfile((0.4, 0.55), 0.2))
    start = canonical_rep(GroupElement.fixed(0.3, 0.8, 0.45))
    cps = [100, 777, 1000]
    fast = orbit_stream(sys, start, OrbitSegmentPlan(1000, 128, 4), obs, checkpoints=cps)
    slow = orbit_stream_naive(sys, start, 1000, obs, checkpoints=cps)
    assert fast == slow


def test_engine_equals_naive_loop_joining():
    js = build_joining(make_sys(), 5, 3)
    start = (FixedReal(0.25), FixedReal(0.5), FixedReal(0.125))

    def wave(x, y, z, n):
        return np.exp(2j * np.pi * (x - y + 3 * z))

    fast = orbit_stream(js, start, OrbitSegmentPlan(600, 64, 3), wave, checkpoints=[600])
    slow = orbit_stream_naive(js, start, 600, wave, checkpoints=[600])
    assert fast == slow


def test_weighted_stream_matches_naive():
    sys = make_sys()
    obs = Observable(xi=1, bump=BumpProfile())
    weights = np.where(np.arange(2001) % 3 == 0, -1, 1).astype(np.int8)

    def wfn(lo, hi):
        return weights[lo:hi]

    fast = orbit_stream(sys, None, OrbitSegmentPlan(2000, 256, 2), obs, wfn, [2000])
    slow = orbit_stream_naive(sys, None, 2000, obs, wfn, [2000])
    assert fast == slow


def test_lanes_match_scalar_iterate():
    """Engine float coordinates equal the scalar closed-form iterate exactly."""
    sys = make_sys(terms=(TrigTerm(2, -1, 0.08, 0.15),), d1=2, d2=1)
    start = canonical_rep(GroupElement.fixed(0.1, 0.35, 0.7))
    pts = orbit_points(sys, start, [1, 17, 400, 1000])
    for n, x, y, z in pts:
        ref = iterate_T(sys, start, n)
        rx, ry, rz = (float(v) for v in ref.coords())
        assert (x, y, z) == (rx, ry, rz)


def test_multi_stream_consistency():
    js = build_joining(make_sys(), 3, 2)
    fns = [
        lambda x, y, z, n: np.exp(2j * np.pi * x),
        lambda x, y, z, n: np.exp(2j * np.pi * (y + z)),
    ]
    multi = orbit_stream_multi(js, None, OrbitSegmentPlan(500, 64), fns, checkpoints=[250, 500])
    for fn, got in zip(fns, multi):
        alone = orbit_stream(js, None, OrbitSegmentPlan(500, 64), fn, checkpoints=[250, 500])
        assert got == alone


def test_checkpoint_validation():
    sys = make_sys()
    with pytest.raises(ValueError):
        orbit_stream(sys, None, OrbitSegmentPlan(100), lambda x, y, z, n: x, checkpoints=[50, 200])
    with pytest.raises(ValueError):
        orbit_stream(sys, None, OrbitSegmentPlan(100), lambda x, y, z, n: x, checkpoints=[70, 30])


def test_value_bound_enforced():
    sys = make_sys()
    with pytest.raises(ValueError):
        orbit_stream(sys, None, OrbitSegmentPlan(64), lambda x, y, z, n: 100.0 * np.ones_like(x))


def test_engine_requires_unit_interval_rotation():
    sys = SkewSystem(FixedReal(1.5), BETA, BaseFunctionSpec(1, 0))
    with pytest.raises(ValueError):
        orbit_stream(sys, None, OrbitSegmentPlan(10), lambda x, y, z, n: np.ones_like(x))


# -- pair streams ----------------------------------------------------------------


def test_pair_factor_values_match_iterates():
    sys = make_sys()
    obs = Observable(xi=1, bump=BumpProfile())
    start = canonical_rep(identity())
    fp, fq = pair_factor_values(sys, start, 3, 2, 50, OrbitSegmentPlan(150, 32, 2), obs)
    from nillab.observables import eval_observable

    for n in (1, 7, 50):
        assert fp[n - 1] == eval_observable(obs, iterate_T(sys, start, 3 * n))
        assert fq[n - 1] == eval_observable(obs, iterate_T(sys, start, 2 * n))


def test_star_descent_exact_z_difference():
    """The descent factors differ from the direct pair factors by a common
    central shift: the z difference agrees exactly, lane for lane."""
    sys = make_sys()
    js = build_joining(sys, 3, 2)
    obs = Observable(xi=1, bump=BumpProfile())
    sink = StarDescentSink(obs, 3, 2)
    direct = orbit_stream(
        sys, None, OrbitSegmentPlan(300, 64),
        lambda x, y, z, n: np.ones_like(x), checkpoints=[300],
    )
    # product route vs pair route, value-level comparison
    fp, fq = pair_factor_values(sys, None, 3, 2, 300, OrbitSegmentPlan(900, 64), obs)
    via_pairs = checkpoint_sums(fp * np.conj(fq), [300])
    via_star = orbit_stream(js, None, OrbitSegmentPlan(300, 64), sink, checkpoints=[300])
    assert abs(via_pairs[0][1] - via_star[0][1]) <= 1e-9 * 300


def test_checkpoint_sums_helper():
    vals = np.array([1.0 + 0j, 0.5j, -1.0, 0.25])
    out = checkpoint_sums(vals, [2, 4])
    assert out[0] == (2, 1.0 + 0.5j)
    assert out[1] == (4, 0.25 + 0.5j)
    with pytest.raises(ValueError):
        checkpoint_sums(vals, [5])
