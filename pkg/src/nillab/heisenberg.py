"""Exact arithmetic for the Heisenberg group, its prime-pair twist and lattices.

The group is R^3 with multiplication

    (x, y, z) . (x', y', z') = (x + x', y + y', z + z' + c (x y' - x' y)),

where the twist c is 1 for the Heisenberg group G and c = p^2 - q^2 for the
quotient group carrying the joining of a prime pair p > q.  All operations are
duck-typed over two numeric paths: exact :class:`~nillab.fixedpoint.FixedReal`
coordinates (drift-free, used by every identity test) and plain floats (the
mirrored evaluation path, tolerance ~1e-12 per operation).

The box [0, 1)^3 is used as a fundamental domain for both lattices; for the
twisted law that is the construction the reduction formula was designed for,
for c = 1 it is the identical derivation and is verified by the
coset-invariance tests rather than assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .fixedpoint import SCALE as _SCALE
from .fixedpoint import FRAC_BITS as _FRAC_BITS
from .fixedpoint import FixedPointInexact, FixedReal

Coord = FixedReal | float


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


class LawMismatch(ValueError):
    """Operands carry different group laws or mixed numeric paths."""


@dataclass(frozen=True)
class GroupLaw:
    """Tag selecting the multiplication twist."""

    kind: str  # "heisenberg" | "star"
    twist: int

    def __post_init__(self):
        if self.kind not in ("heisenberg", "star"):
            raise ValueError(f"unknown group law kind {self.kind!r}")
        if self.twist == 0:
            raise ValueError("twist must be nonzero")
        if self.kind == "heisenberg" and self.twist != 1:
            raise ValueError("heisenberg law has twist 1")

    @staticmethod
    def star(p: int, q: int) -> "GroupLaw":
        """The twisted law of the prime-pair quotient, twist p^2 - q^2."""
        if not (is_prime(p) and is_prime(q) and p > q):
            raise ValueError(f"need primes p > q, got p={p}, q={q}")
        return GroupLaw("star", p * p - q * q)


HEISENBERG = GroupLaw("heisenberg", 1)


def _coerce(v) -> Coord:
    if isinstance(v, (FixedReal, float)):
        return v
    if isinstance(v, int):
        return float(v)
    raise TypeError(f"coordinate must be FixedReal or float, got {type(v).__name__}")


@dataclass(frozen=True)
class GroupElement:
    """A point of G or G_star; coordinates all-FixedReal or all-float."""

    x: Coord
    y: Coord
    z: Coord
    law: GroupLaw

    @property
    def is_fixed(self) -> bool:
        return isinstance(self.x, FixedReal)

    @staticmethod
    def fixed(x, y, z, law: GroupLaw = HEISENBERG) -> "GroupElement":
        return GroupElement(FixedReal(x), FixedReal(y), FixedReal(z), law)

    @staticmethod
    def floating(x, y, z, law: GroupLaw = HEISENBERG) -> "GroupElement":
        return GroupElement(float(x), float(y), float(z), law)

    def to_float(self) -> "GroupElement":
        return GroupElement(float(self.x), float(self.y), float(self.z), self.law)

    def coords(self) -> tuple[Coord, Coord, Coord]:
        return (self.x, self.y, self.z)


def identity(law: GroupLaw = HEISENBERG, fixed: bool = True) -> GroupElement:
    return GroupElement.fixed(0, 0, 0, law) if fixed else GroupElement.floating(0.0, 0.0, 0.0, law)


def _check_pair(a: GroupElement, b: GroupElement):
    if a.law != b.law:
        raise LawMismatch(f"law mismatch: {a.law} vs {b.law}")
    if a.is_fixed != b.is_fixed:
        raise LawMismatch("cannot mix fixed-point and float elements")


def mul(a: GroupElement, b: GroupElement) -> GroupElement:
    """Group product under the common law of ``a`` and ``b``."""
    _check_pair(a, b)
    c = a.law.twist
    ax = a.x
    if type(ax) is FixedReal:
        # inlined scaled-integer path (hot in the bulk identity suites)
        comm = ax.scaled * b.y.scaled - b.x.scaled * a.y.scaled
        q, r = divmod(comm, _SCALE)
        if r:
            raise FixedPointInexact(
                "group commutator has more than 128 fractional bits; "
                "base coordinates must lie on the 2**-64 grid"
            )
        return GroupElement(
            FixedReal.from_scaled(ax.scaled + b.x.scaled),
            FixedReal.from_scaled(a.y.scaled + b.y.scaled),
            FixedReal.from_scaled(a.z.scaled + b.z.scaled + q * c),
            a.law,
        )
    return GroupElement(
        a.x + b.x,
        a.y + b.y,
        a.z + b.z + (a.x * b.y - b.x * a.y) * c,
        a.law,
    )


def inv(a: GroupElement) -> GroupElement:
    """Group inverse; (x, y, z)^-1 = (-x, -y, -z) under either law."""
    return GroupElement(-a.x, -a.y, -a.z, a.law)


@dataclass(frozen=True)
class LatticeElement:
    """Integer point of Gamma (or Gamma_star)."""

    a: int
    b: int
    m: int

    def to_group(self, law: GroupLaw, fixed: bool = True) -> GroupElement:
        if fixed:
            return GroupElement.fixed(self.a, self.b, self.m, law)
        return GroupElement.floating(self.a, self.b, self.m, law)


def lattice_floor(g: GroupElement) -> LatticeElement:
    """The unique lattice gamma with g . gamma^-1 in [0, 1)^3.

    Formula: (floor x, floor y, floor(z - c (x floor(y) - floor(x) y))).
    """
    c = g.law.twist
    if type(g.x) is FixedReal:
        fx = g.x.scaled >> _FRAC_BITS
        fy = g.y.scaled >> _FRAC_BITS
        m = (g.z.scaled - (g.x.scaled * fy - g.y.scaled * fx) * c) >> _FRAC_BITS
        return LatticeElement(fx, fy, m)
    fx = math.floor(g.x)
    fy = math.floor(g.y)
    m = math.floor(g.z - (g.x * fy - g.y * fx) * c)
    return LatticeElement(fx, fy, m)


@dataclass(frozen=True)
class NilPoint:
    """Canonical fundamental-domain representative of a point of X or X_star."""

    rep: GroupElement

    def __post_init__(self):
        r = self.rep
        if type(r.x) is FixedReal:
            for v in (r.x, r.y, r.z):
                if not 0 <= v.scaled < _SCALE:
                    raise ValueError(f"NilPoint coordinate {v!r} outside [0, 1)")
        else:
            for v in (r.x, r.y, r.z):
                if not (0 <= v < 1):
                    raise ValueError(f"NilPoint coordinate {v!r} outside [0, 1)")

    @property
    def law(self) -> GroupLaw:
        return self.rep.law

    @property
    def is_fixed(self) -> bool:
        return self.rep.is_fixed

    def coords(self):
        return self.rep.coords()

    def to_float(self) -> "NilPoint":
        # Exact canonical coords stay in [0, 1) under correct rounding.
        return NilPoint(self.rep.to_float())


def canonical_rep(g: GroupElement) -> NilPoint:
    """Reduce to the canonical representative g . floor(g)^-1 in [0, 1)^3."""
    if type(g.x) is FixedReal:
        # same composition as below, collapsed to scaled-integer arithmetic:
        # z' = frac(z - c (x floor(y) - floor(x) y)), no grid constraint needed
        a = g.x.scaled >> _FRAC_BITS
        b = g.y.scaled >> _FRAC_BITS
        w = g.z.scaled - (g.x.scaled * b - g.y.scaled * a) * g.law.twist
        return NilPoint(
            GroupElement(
                FixedReal.from_scaled(g.x.scaled - (a << _FRAC_BITS)),
                FixedReal.from_scaled(g.y.scaled - (b << _FRAC_BITS)),
                FixedReal.from_scaled(w % _SCALE),
                g.law,
            )
        )
    gamma = lattice_floor(g).to_group(g.law, fixed=False)
    return NilPoint(mul(g, inv(gamma)))


def nil_point(x, y, z, law: GroupLaw = HEISENBERG, fixed: bool = True) -> NilPoint:
    """Canonical point of the nilmanifold through the given group coordinates."""
    ge = GroupElement.fixed(x, y, z, law) if fixed else GroupElement.floating(x, y, z, law)
    return canonical_rep(ge)


# -- prime-pair joining ------------------------------------------------------


@dataclass(frozen=True)
class JoiningPair:
    """A pair of Heisenberg points subject to the q(x1,y1) = p(x2,y2) constraint."""

    first: GroupElement
    second: GroupElement
    p: int
    q: int

    def __post_init__(self):
        if not (is_prime(self.p) and is_prime(self.q) and self.p > self.q):
            raise ValueError(f"need primes p > q, got p={self.p}, q={self.q}")
        _check_pair(self.first, self.second)


def _is_integer(v: Coord, tol: float) -> bool:
    if isinstance(v, FixedReal):
        return v.frac().scaled == 0
    return abs(v - round(v)) <= tol


def joining_membership(pair: JoiningPair, tol: float = 1e-9) -> bool:
    """True iff q (x1, y1) - p (x2, y2) is integral (mod 1 membership in X_1)."""
    dx = pair.first.x * pair.q - pair.second.x * pair.p
    dy = pair.first.y * pair.q - pair.second.y * pair.p
    return _is_integer(dx, tol) and _is_integer(dy, tol)


def project_pi(
    g6: tuple[Coord, Coord, Coord, Coord, Coord, Coord],
    p: int,
    q: int,
    tol: float = 1e-9,
) -> GroupElement:
    """Project a G_1 point (p x, p y, z1, q x, q y, z2) to (x, y, z1 - z2).

    The result carries the star law with twist p^2 - q^2.  The input must
    satisfy the pair constraint exactly on the fixed-point path, or within
    ``tol`` on the float path.
    """
    if not (is_prime(p) and is_prime(q) and p > q):
        raise ValueError(f"need primes p > q, got p={p}, q={q}")
    x1, y1, z1, x2, y2, z2 = (_coerce(v) for v in g6)
    law = GroupLaw.star(p, q)
    if isinstance(x1, FixedReal):
        if x1 * q != x2 * p or y1 * q != y2 * p:
            raise ValueError("input does not satisfy q(x1,y1) = p(x2,y2) exactly")
        return GroupElement(x1.exact_div(p), y1.exact_div(p), z1 - z2, law)
    if abs(q * x1 - p * x2) > tol or abs(q * y1 - p * y2) > tol:
        raise ValueError("input violates q(x1,y1) = p(x2,y2) beyond tolerance")
    return GroupElement(x1 / p, y1 / p, z1 - z2, law)
