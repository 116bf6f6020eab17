"""Mobius orthogonality experiments: sieve, correlations, bilinear averages.

The segmented sieve packs mu two bits per integer; Mertens sums certify it.
Along the skew-product orbit, correlations against mu decay; the classical
exponential-sum baseline decays faster; and the prime-pair bilinear average
computed two structurally independent ways (direct pair orbit vs the reduced
twisted system) agrees to ~1e-18, which is the whole reduction in one line.
"""

import time

from nillab import (
    OrbitSegmentPlan,
    bilinear_sum,
    bilinear_sum_reduced,
    correlation_sum,
    davenport_baseline,
    sieve_mobius,
)
from nillab.config import standard_config
from nillab.fixedpoint import sqrt_q64

cfg = standard_config()
N = 10**6

t0 = time.time()
table = sieve_mobius(N)
print(f"sieved mu up to {N} in {time.time() - t0:.2f}s "
      f"({table.packed.nbytes / 1e6:.1f} MB packed)")
print("mu(1..12) =", [table.mu(n) for n in range(1, 13)])
for n in (10**3, 10**4, 10**5, 10**6):
    print(f"  Mertens M({n:>7}) = {table.mertens(n):>5}")

sys_ = cfg.system()
obs = cfg.observable()
cps = [10**3, 10**4, 10**5, 10**6]
plan = OrbitSegmentPlan(N, worker_count=4)

print("\nMobius correlation along the orbit, (1/N) sum F(T^n id) mu(n):")
rep = correlation_sum(sys_, obs, None, cps, table, plan)
for c in rep.checkpoints:
    print(f"  N = {c.n:>8}: |sum| = {c.modulus:.3e}")

print("\nexponential-sum baseline, (1/N) sum mu(n) e(n alpha), golden-ratio alpha:")
golden = (sqrt_q64(5) - 1).exact_div(2)
dav = davenport_baseline(golden, cps, table, plan)
for c in dav.checkpoints:
    print(f"  N = {c.n:>8}: |sum| = {c.modulus:.3e}")

print("\nprime-pair bilinear average, two routes (p, q) = (3, 2):")
bcps = [10**3, 10**4]
direct = bilinear_sum(sys_, obs, None, 3, 2, bcps)
reduced = bilinear_sum_reduced(sys_, obs, 3, 2, bcps)
for a, b in zip(direct.checkpoints, reduced.checkpoints):
    print(f"  N = {a.n:>6}: pair orbit {a.value:+.12f}")
    print(f"            reduced    {b.value:+.12f}   |diff| = {abs(a.value - b.value):.2e}")
print("\n(no Mobius weight appears in the bilinear average: its decay is the")
print(" unique-ergodicity mechanism that forces the correlation above to vanish)")
