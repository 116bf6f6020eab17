"""Skew-product orbits: closed-form iterates and the deterministic engine.

The map T(x, y, z) = (alpha, beta, h(x, y)) . (x, y, z) extends the torus
rotation by fiber rotations.  Its n-th iterate is a single group translation
by (n alpha, n beta, h_n) with h_n the Birkhoff sum of h -- which the orbit
engine exploits to stream millions of exact orbit points per second, with
output bit-identical for any worker count.
"""

import time

import numpy as np

from nillab import OrbitSegmentPlan, iterate_T, orbit_stream, orbit_stream_naive, step_T
from nillab.config import standard_config
from nillab.engine import orbit_points
from nillab.heisenberg import canonical_rep, identity
from nillab.observables import BumpProfile, Observable

cfg = standard_config()
sys_ = cfg.system()
print(f"alpha = {float(cfg.alpha):.15f} (nearest dyadic to sqrt(2) - 1)")
print(f"beta  = {float(cfg.beta):.15f} (nearest dyadic to sqrt(3) - 1)")
print(f"h = x + 0.1 sin(2 pi x); Lipschitz bound L = {sys_.h.L:.6f}")

pt = canonical_rep(identity())
stepped = pt
for _ in range(1000):
    stepped = step_T(sys_, stepped)
closed = iterate_T(sys_, pt, 1000)
print(f"\n1000 single steps == closed-form iterate (bit-exact): "
      f"{stepped.coords() == closed.coords()}")

print("\norbit samples (exact uint64 circle lanes):")
for n, x, y, z in orbit_points(sys_, None, [1, 10, 100, 10**6]):
    print(f"  T^{n:>7} id = ({x:.12f}, {y:.12f}, {z:.12f})")

obs = Observable(xi=1, bump=BumpProfile())
print("\nBirkhoff averages of a frequency-1 observable (no weights):")
plan = OrbitSegmentPlan(10**6, worker_count=4)
t0 = time.time()
sums = orbit_stream(sys_, None, plan, obs, checkpoints=[10**3, 10**5, 10**6])
dt = time.time() - t0
for n, s in sums:
    print(f"  N = {n:>8}: |avg| = {abs(s) / n:.3e}")
print(f"  (10^6 steps in {dt:.2f}s; the space average of F vanishes by fiber")
print("   orthogonality, so this decay is unique-ergodicity behavior)")

print("\ndeterminism: worker counts and the naive loop agree bit for bit:")
small = [10**3]
a = orbit_stream(sys_, None, OrbitSegmentPlan(10**3, 128, 1), obs, checkpoints=small)
b = orbit_stream(sys_, None, OrbitSegmentPlan(10**3, 128, 8), obs, checkpoints=small)
c = orbit_stream_naive(sys_, None, 10**3, obs, checkpoints=small)
print(f"  1 worker == 8 workers == naive loop: {a == b == c}")
