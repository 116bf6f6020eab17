"""Skew products on the nilmanifold, their iterates, and the prime-pair joining.

The map under study is T(x, y, z) = (alpha, beta, h(x, y)) . (x, y, z) on
X = G/Gamma: an isometric circle extension of the torus rotation by
(alpha, beta).  Its n-th iterate is the left translation by
(n alpha, n beta, h_n(x, y)) with the Birkhoff cocycle

    h_n(x, y) = sum_{i<n} h(x + i alpha, y + i beta).

For a prime pair p > q the pair orbit (T^{pn} x0, T^{qn} x0) descends to a
skew product T_star with fiber function H(x, y) = h_p(px, py) - h_q(qx, qy)
over the twisted group with twist p^2 - q^2, and T_star is conjugate (by
fundamental-domain coordinates) to an explicit torus map

    (x, y, z) -> (x + alpha, y + beta, z + H'(x, y))

whose corrected cocycle H' carries the floor terms written out below.

Numeric paths.  Every scalar operation is duck-typed over FixedReal (exact)
and float (mirrored, ~1e-12/op).  On the exact path the periodic part of h is
quantized once to 2**-53 at evaluation time -- the circle dynamics downstream
is then pure integer arithmetic, so closed-form iterates, stepping, and the
orbit engine agree bit for bit.  Real-valued lifts used by the growth diagnostics
stay in plain floating point (compensated where it matters).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .fixedpoint import FixedReal
from .heisenberg import (
    HEISENBERG,
    GroupElement,
    GroupLaw,
    NilPoint,
    canonical_rep,
    identity,
    is_prime,
    mul,
)

TWO_PI = 2.0 * math.pi
Q53 = 2.0**53
_Q53_SHIFT = 128 - 53  # lift a 2**-53 quantum into the 2**-128 scale


def _frac(v):
    """Fractional part in [0, 1), duck-typed over FixedReal and float."""
    return v - math.floor(v)


# ---------------------------------------------------------------------------
# fiber functions h : T^2 -> T^1
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TrigTerm:
    """One oscillation amplitude * sin(2 pi (k1 x + k2 y + phase))."""

    k1: int
    k2: int
    amplitude: float
    phase: float = 0.0


@dataclass(frozen=True, eq=False)
class PiecewiseLinearTable:
    """Z^2-periodic bilinear interpolation of node values on a uniform grid.

    ``values[i, j]`` is the value at (i/m, j/m); the table wraps periodically.
    Lipschitz in each axis with constant ``max |node difference| * m``.
    """

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] != v.shape[1] or v.shape[0] < 2:
            raise ValueError("table must be square with at least 2 nodes per axis")
        if not np.all(np.isfinite(v)):
            raise ValueError("table values must be finite")
        object.__setattr__(self, "values", v)

    @property
    def size(self) -> int:
        return self.values.shape[0]

    def slopes(self) -> tuple[float, float]:
        m = self.size
        dx = np.abs(np.roll(self.values, -1, axis=0) - self.values).max() * m
        dy = np.abs(np.roll(self.values, -1, axis=1) - self.values).max() * m
        return float(dx), float(dy)

    def interp(self, xf, yf):
        """Bilinear value at fractional coordinates (arrays or scalars)."""
        m = self.size
        tx = np.asarray(xf, dtype=np.float64) * m
        ty = np.asarray(yf, dtype=np.float64) * m
        i = np.floor(tx).astype(np.int64)
        j = np.floor(ty).astype(np.int64)
        fx = tx - i
        fy = ty - j
        i %= m
        j %= m
        i1 = (i + 1) % m
        j1 = (j + 1) % m
        v = self.values
        out = (
            v[i, j] * (1 - fx) * (1 - fy)
            + v[i1, j] * fx * (1 - fy)
            + v[i, j1] * (1 - fx) * fy
            + v[i1, j1] * fx * fy
        )
        return out


@dataclass(frozen=True)
class BaseFunctionSpec:
    """The fiber function h: winding numbers plus a Z^2-periodic part.

    ``d1``/``d2`` are the integer degrees of h in x and y; the periodic part
    is a finite trigonometric sum and/or a piecewise-linear table.  ``L``
    bounds the Lipschitz constant of the lift for the sup metric on T^2.
    """

    d1: int
    d2: int
    terms: tuple[TrigTerm, ...] = ()
    table: PiecewiseLinearTable | None = None

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))

    @property
    def L(self) -> float:
        lx = abs(self.d1) + sum(TWO_PI * abs(t.amplitude) * abs(t.k1) for t in self.terms)
        ly = abs(self.d2) + sum(TWO_PI * abs(t.amplitude) * abs(t.k2) for t in self.terms)
        if self.table is not None:
            sx, sy = self.table.slopes()
            lx += sx
            ly += sy
        return lx + ly

    # -- float path ---------------------------------------------------------

    def periodic_value(self, x, y):
        """Periodic part at real arguments (vectorized; trig terms are
        automatically periodic, the table is evaluated at fractional parts)."""
        out = 0.0
        for t in self.terms:
            out = out + t.amplitude * np.sin(TWO_PI * (t.k1 * x + t.k2 * y + t.phase))
        if self.table is not None:
            xf = x - np.floor(x)
            yf = y - np.floor(y)
            out = out + self.table.interp(xf, yf)
        return out

    # -- canonical circle quantization (shared by scalar path and engine) ----

    def periodic_q53(self, xu: np.ndarray, yu: np.ndarray) -> np.ndarray:
        """Quantized periodic part at u64 torus coordinates (units 2**-53).

        This single function defines the circle value used by the exact
        dynamics; the scalar path calls it on length-1 arrays.
        """
        xf = xu.astype(np.float64) * 2.0**-64
        yf = yu.astype(np.float64) * 2.0**-64
        raw = np.broadcast_to(
            np.asarray(self.periodic_value(xf, yf), dtype=np.float64), xf.shape
        )
        return np.rint(raw * Q53).astype(np.int64)

    def as_lift(self) -> "AffineTrigLift":
        if self.table is not None:
            raise ValueError("tables have no closed trigonometric lift")
        return AffineTrigLift(float(self.d1), float(self.d2), 0.0, self.terms)


def eval_h_lift(h: BaseFunctionSpec, x, y):
    """Real lift d1 x + d2 y + periodic(x, y) at real arguments (vectorized)."""
    return h.d1 * x + h.d2 * y + h.periodic_value(x, y)


def lift_fixed(h: BaseFunctionSpec, x: FixedReal, y: FixedReal) -> FixedReal:
    """Exact-path lift: winding part exact, periodic part 2**-53 quantized."""
    xu = np.array([x.frac().frac_u64()], dtype=np.uint64)
    yu = np.array([y.frac().frac_u64()], dtype=np.uint64)
    q = int(h.periodic_q53(xu, yu)[0])
    return x * h.d1 + y * h.d2 + FixedReal.from_scaled(q << _Q53_SHIFT)


def _lift(h: BaseFunctionSpec, x, y):
    if isinstance(x, FixedReal):
        return lift_fixed(h, x, y)
    return float(eval_h_lift(h, x, y))


def cocycle_sum(h: BaseFunctionSpec, x: float, y: float, n: int, alpha: float, beta: float) -> float:
    """Float lift of the Birkhoff sum h_n(x, y), compensated; h_0 = 0."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return math.fsum(float(eval_h_lift(h, x + i * alpha, y + i * beta)) for i in range(n))


# ---------------------------------------------------------------------------
# collapsed lifts (trig Birkhoff sums as single sinusoids per frequency)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AffineTrigLift:
    """A lift cx*x + cy*y + const + sum of trig terms, vectorized callable.

    Birkhoff sums of such lifts along a rotation collapse exactly: all shifts
    of one term share its frequency, so the sum is a single sinusoid with a
    geometric-series coefficient.  This keeps deep-iterate lift evaluation
    O(#terms) instead of O(n) per point.
    """

    cx: float
    cy: float
    const: float
    terms: tuple[TrigTerm, ...] = ()

    def __call__(self, x, y):
        out = self.cx * x + self.cy * y + self.const
        for t in self.terms:
            out = out + t.amplitude * np.sin(TWO_PI * (t.k1 * x + t.k2 * y + t.phase))
        return out

    def scale_args(self, s: int) -> "AffineTrigLift":
        """The lift of (x, y) -> f(s x, s y)."""
        terms = tuple(TrigTerm(t.k1 * s, t.k2 * s, t.amplitude, t.phase) for t in self.terms)
        return AffineTrigLift(self.cx * s, self.cy * s, self.const, terms)

    def shift_args(self, dx: float, dy: float) -> "AffineTrigLift":
        terms = tuple(
            TrigTerm(t.k1, t.k2, t.amplitude, t.phase + t.k1 * dx + t.k2 * dy)
            for t in self.terms
        )
        return AffineTrigLift(self.cx, self.cy, self.const + self.cx * dx + self.cy * dy, terms)

    def plus(self, other: "AffineTrigLift", sign: int = 1) -> "AffineTrigLift":
        terms = tuple(
            TrigTerm(t.k1, t.k2, sign * t.amplitude, t.phase) for t in other.terms
        )
        return AffineTrigLift(
            self.cx + sign * other.cx,
            self.cy + sign * other.cy,
            self.const + sign * other.const,
            self.terms + terms,
        )


def collapse_birkhoff(lift: AffineTrigLift, alpha: float, beta: float, n: int) -> AffineTrigLift:
    """The lift of sum_{i<n} f(x + i alpha, y + i beta), collapsed per term."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    tri = n * (n - 1) // 2
    const = n * lift.const + (lift.cx * alpha + lift.cy * beta) * tri
    terms = []
    for t in lift.terms:
        theta = t.k1 * alpha + t.k2 * beta
        c = np.exp(2j * math.pi * theta * np.arange(n)).sum() if n else 0.0
        amp = t.amplitude * abs(c)
        if amp != 0.0:
            terms.append(TrigTerm(t.k1, t.k2, amp, t.phase + cmath.phase(c) / TWO_PI))
    return AffineTrigLift(lift.cx * n, lift.cy * n, const, tuple(terms))


def _direct_birkhoff(fn, alpha: float, beta: float, n: int):
    def lifted(x, y):
        return sum(fn(x + i * alpha, y + i * beta) for i in range(n)) if n else np.zeros_like(
            np.asarray(x, dtype=np.float64)
        )

    return lifted


# ---------------------------------------------------------------------------
# the skew system T and the joining system T_star
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SkewSystem:
    """T(x, y, z) = (alpha, beta, h(x, y)) . (x, y, z) on X = G/Gamma."""

    alpha: FixedReal
    beta: FixedReal
    h: BaseFunctionSpec

    def __post_init__(self):
        object.__setattr__(self, "alpha", FixedReal(self.alpha))
        object.__setattr__(self, "beta", FixedReal(self.beta))

    @property
    def alpha_f(self) -> float:
        return float(self.alpha)

    @property
    def beta_f(self) -> float:
        return float(self.beta)

    def hn_lift(self, n: int):
        """Vectorized float lift of the cocycle h_n."""
        if self.h.table is None:
            return collapse_birkhoff(self.h.as_lift(), self.alpha_f, self.beta_f, n)
        return _direct_birkhoff(
            lambda u, v: eval_h_lift(self.h, u, v), self.alpha_f, self.beta_f, n
        )


def step_T(sys: SkewSystem, pt: NilPoint) -> NilPoint:
    """One application of T; exact on the fixed-point path."""
    if pt.law != HEISENBERG:
        raise ValueError("step_T acts on Heisenberg points")
    x, y, _ = pt.coords()
    if pt.is_fixed:
        g = GroupElement(sys.alpha, sys.beta, lift_fixed(sys.h, x, y), HEISENBERG)
    else:
        g = GroupElement(sys.alpha_f, sys.beta_f, float(eval_h_lift(sys.h, x, y)), HEISENBERG)
    return canonical_rep(mul(g, pt.rep))


def iterate_T(sys: SkewSystem, pt: NilPoint, n: int) -> NilPoint:
    """Closed-form n-th iterate via the Birkhoff cocycle; agrees with stepping."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if pt.law != HEISENBERG:
        raise ValueError("iterate_T acts on Heisenberg points")
    x, y, _ = pt.coords()
    if pt.is_fixed:
        total = FixedReal(0)
        u, v = x, y
        for _ in range(n):
            total = total + lift_fixed(sys.h, u, v)
            u = u + sys.alpha
            v = v + sys.beta
        g = GroupElement(sys.alpha * n, sys.beta * n, total, HEISENBERG)
    else:
        total = cocycle_sum(sys.h, x, y, n, sys.alpha_f, sys.beta_f)
        g = GroupElement(n * sys.alpha_f, n * sys.beta_f, total, HEISENBERG)
    return canonical_rep(mul(g, pt.rep))


@dataclass(frozen=True)
class JoiningSystem:
    """The reduced prime-pair dynamics T_star and its torus trivialization.

    The fiber function is H(x, y) = h_p(px, py) - h_q(qx, qy); the group
    twist is p^2 - q^2, and the degree of H in x is (p^2 - q^2) d1.
    """

    base: SkewSystem
    p: int
    q: int

    def __post_init__(self):
        if not (is_prime(self.p) and is_prime(self.q) and self.p > self.q):
            raise ValueError(f"need primes p > q, got p={self.p}, q={self.q}")

    @property
    def twist(self) -> int:
        return self.p * self.p - self.q * self.q

    @property
    def law(self) -> GroupLaw:
        return GroupLaw.star(self.p, self.q)

    @property
    def lipschitz_H(self) -> float:
        return (self.p * self.p + self.q * self.q) * self.base.h.L

    # -- scalar evaluation (duck-typed over FixedReal / float) --------------

    def H_value(self, x, y):
        """Lift of H at (x, y): sums of shifted h lifts, p-side minus q-side."""
        sys = self.base
        if isinstance(x, FixedReal):
            alpha, beta = sys.alpha, sys.beta
        else:
            alpha, beta = sys.alpha_f, sys.beta_f
        pos = x * self.p
        vps = y * self.p
        total = _lift(sys.h, pos, vps)
        for _ in range(self.p - 1):
            pos = pos + alpha
            vps = vps + beta
            total = total + _lift(sys.h, pos, vps)
        pos = x * self.q
        vps = y * self.q
        for _ in range(self.q):
            total = total - _lift(sys.h, pos, vps)
            pos = pos + alpha
            vps = vps + beta
        return total

    def H_n_value(self, x, y, n: int):
        """Lift of the cocycle H_n(x, y) = sum_{i<n} H(x + i alpha, y + i beta)."""
        if n < 0:
            raise ValueError("n must be nonnegative")
        sys = self.base
        if isinstance(x, FixedReal):
            alpha, beta, total = sys.alpha, sys.beta, FixedReal(0)
        else:
            alpha, beta, total = sys.alpha_f, sys.beta_f, 0.0
        u, v = x, y
        for _ in range(n):
            total = total + self.H_value(u, v)
            u = u + alpha
            v = v + beta
        return total

    def H_prime(self, x, y):
        """The trivialized cocycle H'(x, y) on representatives in [0, 1)^2:

        H + (p^2-q^2) ((alpha y - beta x) - (x+alpha) floor(y+beta)
                        + floor(x+alpha) (y+beta)).
        """
        if isinstance(x, FixedReal):
            alpha, beta = self.base.alpha, self.base.beta
        else:
            alpha, beta = self.base.alpha_f, self.base.beta_f
        corr = (
            (alpha * y - beta * x)
            - (x + alpha) * math.floor(y + beta)
            + math.floor(x + alpha) * (y + beta)
        )
        return self.H_value(x, y) + corr * self.twist

    def Hn_prime(self, x, y, n: int):
        """Lift of the n-step trivialized cocycle H'_n(x, y):

        H_n + (p^2-q^2) ((n alpha y - n beta x) - (x + n alpha) floor(y + n beta)
                          + floor(x + n alpha) (y + n beta)).
        """
        if isinstance(x, FixedReal):
            alpha, beta = self.base.alpha * n, self.base.beta * n
        else:
            alpha, beta = n * self.base.alpha_f, n * self.base.beta_f
        corr = (
            (alpha * y - beta * x)
            - (x + alpha) * math.floor(y + beta)
            + math.floor(x + alpha) * (y + beta)
        )
        return self.H_n_value(x, y, n) + corr * self.twist

    def step_trivialized(self, pt3):
        """One step of the torus model: (x, y, z) -> (x+a, y+b, z+H'(x, y)) mod 1."""
        x, y, z = pt3
        for v in (x, y, z):
            if not (0 <= v and v < 1):
                raise ValueError("trivialized point must lie in [0, 1)^3")
        if isinstance(x, FixedReal):
            alpha, beta = self.base.alpha, self.base.beta
        else:
            alpha, beta = self.base.alpha_f, self.base.beta_f
        return (
            _frac(x + alpha),
            _frac(y + beta),
            _frac(z + self.H_prime(x, y)),
        )

    def step_star(self, pt: NilPoint) -> NilPoint:
        """One step of T_star on X_star via the group action."""
        if pt.law != self.law:
            raise ValueError("point does not carry this joining's star law")
        x, y, _ = pt.coords()
        if pt.is_fixed:
            g = GroupElement(self.base.alpha, self.base.beta, self.H_value(x, y), self.law)
        else:
            g = GroupElement(
                self.base.alpha_f, self.base.beta_f, float(self.H_value(x, y)), self.law
            )
        return canonical_rep(mul(g, pt.rep))

    # -- vectorized float lifts for the growth diagnostics ------------------

    def H_lift(self):
        """Vectorized float lift of H (collapsed when h is trigonometric)."""
        sys = self.base
        if sys.h.table is None:
            hp = collapse_birkhoff(sys.h.as_lift(), sys.alpha_f, sys.beta_f, self.p)
            hq = collapse_birkhoff(sys.h.as_lift(), sys.alpha_f, sys.beta_f, self.q)
            return hp.scale_args(self.p).plus(hq.scale_args(self.q), sign=-1)

        def lifted(x, y):
            af, bf = sys.alpha_f, sys.beta_f
            out = 0.0
            for j in range(self.p):
                out = out + eval_h_lift(sys.h, self.p * x + j * af, self.p * y + j * bf)
            for j in range(self.q):
                out = out - eval_h_lift(sys.h, self.q * x + j * af, self.q * y + j * bf)
            return out

        return lifted

    def Hn_lift(self, n: int):
        """Vectorized float lift of H_n."""
        sys = self.base
        base = self.H_lift()
        if isinstance(base, AffineTrigLift):
            return collapse_birkhoff(base, sys.alpha_f, sys.beta_f, n)
        return _direct_birkhoff(base, sys.alpha_f, sys.beta_f, n)

    def H_prime_arrays(self, x, y):
        """Float H' on arrays of representatives in [0, 1)^2."""
        af, bf = self.base.alpha_f, self.base.beta_f
        lift = self.H_lift()
        corr = (
            (af * y - bf * x)
            - (x + af) * np.floor(y + bf)
            + np.floor(x + af) * (y + bf)
        )
        return lift(x, y) + self.twist * corr


def build_joining(sys: SkewSystem, p: int, q: int) -> JoiningSystem:
    """The joining system for the prime pair p > q (twist p^2 - q^2)."""
    return JoiningSystem(sys, p, q)


def step_Tstar_trivialized(js: JoiningSystem, pt3):
    return js.step_trivialized(pt3)


def cocycle_Hn_prime(js: JoiningSystem, x, y, n: int):
    if n < 1:
        raise ValueError("n must be positive")
    return js.Hn_prime(x, y, n)


def rho(pt: NilPoint):
    """Fundamental-domain coordinates of a star point (the torus chart)."""
    return pt.coords()


def star_point(js: JoiningSystem, x, y, z, fixed: bool = True) -> NilPoint:
    ge = (
        GroupElement.fixed(x, y, z, js.law)
        if fixed
        else GroupElement.floating(x, y, z, js.law)
    )
    return canonical_rep(ge)


def pair_orbit_element(sys: SkewSystem, p: int, q: int, n: int) -> tuple[GroupElement, GroupElement]:
    """Group-level representatives of (T^{pn} x0, T^{qn} x0) from the identity.

    Returned without reduction so the pair satisfies the joining constraint
    q (x1, y1) = p (x2, y2) exactly, as needed by the projection.
    """
    first = _orbit_group_element(sys, p * n)
    second = _orbit_group_element(sys, q * n)
    return first, second


def pair_orbit(sys: SkewSystem, p: int, q: int, n_max: int):
    """Yield the group-level pair (T^{pn} id, T^{qn} id) for n = 1..n_max.

    Incremental: each step left-multiplies by the p- (resp. q-) step
    translation element evaluated at the current base coordinates, costing
    p + q lift evaluations per n instead of n (p + q).
    """

    def advance(g: GroupElement, m: int) -> GroupElement:
        total = FixedReal(0)
        u, v = g.x, g.y
        for _ in range(m):
            total = total + lift_fixed(sys.h, u, v)
            u = u + sys.alpha
            v = v + sys.beta
        return mul(GroupElement(sys.alpha * m, sys.beta * m, total, HEISENBERG), g)

    first = identity()
    second = identity()
    for _ in range(n_max):
        first = advance(first, p)
        second = advance(second, q)
        yield first, second


def _orbit_group_element(sys: SkewSystem, m: int) -> GroupElement:
    total = FixedReal(0)
    u = FixedReal(0)
    v = FixedReal(0)
    for _ in range(m):
        total = total + lift_fixed(sys.h, u, v)
        u = u + sys.alpha
        v = v + sys.beta
    return GroupElement(sys.alpha * m, sys.beta * m, total, HEISENBERG)
