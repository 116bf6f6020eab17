"""Equidistribution diagnostics: Weyl sums and the coboundary obstruction.

Unique ergodicity of the reduced system is equivalent to the twisted
cohomological equation R(x+a, y+b) = R(x, y) + k H'(x, y) having no
measurable solution.  Numerically we attack the solvable Fourier modes by
small-divisor division and measure the residual defect: synthesized true
coboundaries are recovered to machine precision, while the joining cocycle
leaves a large residual -- evidence (never proof) of the obstruction.  Weyl
sums along the reduced orbit supply the complementary equidistribution
evidence.
"""

import numpy as np

from nillab import OrbitSegmentPlan, build_joining, weyl_sums
from nillab.config import standard_config
from nillab.diagnostics import coboundary_residual, coboundary_search

cfg = standard_config()
js = cfg.joining()
af, bf = float(cfg.alpha), float(cfg.beta)

print("control: a synthesized coboundary g = R0 o T0 - R0 is fully recovered")


def r0(x, y):
    return 0.3 * np.sin(2 * np.pi * (x + 0.2)) + 0.11 * np.cos(2 * np.pi * (2 * x - 3 * y))


rep = coboundary_residual(lambda x, y: r0(x + af, y + bf) - r0(x, y), af, bf, 1, 16)
print(f"  residual = {rep.residual:.2e} over {rep.solved_modes} solved modes")

print("\nthe joining cocycle k H' (k = 1, 2, 3): residual stays far from zero")
for k in (1, 2, 3):
    rep = coboundary_search(js, k, 16)
    print(f"  k = {k}: residual = {rep.residual:.4f} "
          f"({len(rep.skipped_modes)} near-resonant modes skipped)")
print("  (winding n (p^2-q^2) d1 in the iterated cocycle is what obstructs solvability)")

print("\nWeyl sums along the reduced orbit, |1/N sum e(k . orbit)|:")
freqs = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1), (2, -1, 2)]
reports = weyl_sums(js, None, freqs, [10**4, 10**5, 10**6],
                    OrbitSegmentPlan(10**6, worker_count=4))
header = "  k        " + "".join(f"N=10^{e}      " for e in (4, 5, 6))
print(header)
for rep in reports:
    row = f"  {str(rep.freq):<9}"
    for cp in rep.checkpoints:
        row += f" {cp.modulus:.3e}  "
    print(row)
print("\n(decay at every nonzero frequency is the equidistribution signature of")
print(" unique ergodicity; the fiber frequencies k3 != 0 are the twisted ones)")
