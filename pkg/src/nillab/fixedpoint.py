"""Exact dyadic fixed-point reals.

A :class:`FixedReal` stores a real number as an integer multiple of 2**-128.
Constructors snap external values (floats, decimal strings, fractions) to the
coarser 2**-64 grid, so base coordinates carry at most 64 fractional bits and
the product of two such values is exactly representable in the 128 fractional
bits of storage.  This is what makes the group identities bit-testable:

* ``+``, ``-``, negation, multiplication by ``int`` and ``floor`` never round;
* ``FixedReal * FixedReal`` is exact whenever both factors live on the 2**-64
  grid, and raises :class:`FixedPointInexact` otherwise (there is no silent
  rounding path).

Integer parts are unbounded (Python ints), so long orbits never overflow.
"""

from __future__ import annotations

import math
from fractions import Fraction

FRAC_BITS = 128
INPUT_BITS = 64
SCALE = 1 << FRAC_BITS
INPUT_SCALE = 1 << INPUT_BITS
_U64 = (1 << 64) - 1


class FixedPointInexact(ArithmeticError):
    """A fixed-point operation would have required rounding."""


def _snap(fr: Fraction) -> int:
    """Scaled integer of the nearest 2**-64 multiple of ``fr`` (ties to even)."""
    return round(fr * INPUT_SCALE) << (FRAC_BITS - INPUT_BITS)


class FixedReal:
    """An exact dyadic real: ``value = scaled / 2**128``."""

    __slots__ = ("scaled",)

    def __init__(self, value: "FixedReal | int | float | str | Fraction" = 0):
        if isinstance(value, FixedReal):
            self.scaled = value.scaled
        elif isinstance(value, int):
            self.scaled = value << FRAC_BITS
        elif isinstance(value, float):
            if not math.isfinite(value):
                raise ValueError(f"cannot represent {value!r} as FixedReal")
            self.scaled = _snap(Fraction(value))
        elif isinstance(value, (str, Fraction)):
            self.scaled = _snap(Fraction(value))
        else:
            raise TypeError(f"cannot build FixedReal from {type(value).__name__}")

    @classmethod
    def from_scaled(cls, scaled: int) -> "FixedReal":
        out = cls.__new__(cls)
        out.scaled = scaled
        return out

    @classmethod
    def from_q64(cls, q: int) -> "FixedReal":
        """Exact value ``q / 2**64``."""
        return cls.from_scaled(q << (FRAC_BITS - INPUT_BITS))

    # -- arithmetic (all exact or raising) ---------------------------------

    def __add__(self, other):
        if isinstance(other, FixedReal):
            return FixedReal.from_scaled(self.scaled + other.scaled)
        if isinstance(other, int):
            return FixedReal.from_scaled(self.scaled + (other << FRAC_BITS))
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, FixedReal):
            return FixedReal.from_scaled(self.scaled - other.scaled)
        if isinstance(other, int):
            return FixedReal.from_scaled(self.scaled - (other << FRAC_BITS))
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, int):
            return FixedReal.from_scaled((other << FRAC_BITS) - self.scaled)
        return NotImplemented

    def __neg__(self):
        return FixedReal.from_scaled(-self.scaled)

    def __mul__(self, other):
        if isinstance(other, int):
            return FixedReal.from_scaled(self.scaled * other)
        if isinstance(other, FixedReal):
            q, r = divmod(self.scaled * other.scaled, SCALE)
            if r:
                raise FixedPointInexact(
                    "product has more than 128 fractional bits; "
                    "operands must lie on the 2**-64 grid"
                )
            return FixedReal.from_scaled(q)
        return NotImplemented

    __rmul__ = __mul__

    def exact_div(self, n: int) -> "FixedReal":
        """Division by a nonzero integer, required to be exact."""
        q, r = divmod(self.scaled, n)
        if r:
            raise FixedPointInexact(f"value not divisible by {n}")
        return FixedReal.from_scaled(q)

    def __floor__(self) -> int:
        return self.scaled >> FRAC_BITS

    def frac(self) -> "FixedReal":
        """Fractional part in [0, 1)."""
        return FixedReal.from_scaled(self.scaled % SCALE)

    # -- conversions --------------------------------------------------------

    def __float__(self) -> float:
        return self.scaled / SCALE

    def as_fraction(self) -> Fraction:
        return Fraction(self.scaled, SCALE)

    @property
    def is_q64(self) -> bool:
        """True when the value lies on the 2**-64 grid."""
        return (self.scaled & _U64) == 0

    def frac_u64(self) -> int:
        """Fractional part as an integer multiple of 2**-64 (requires Q64)."""
        f = self.scaled % SCALE
        hi, lo = divmod(f, 1 << 64)
        if lo:
            raise FixedPointInexact("fractional part is finer than 2**-64")
        return hi

    def frac_lanes(self) -> tuple[int, int]:
        """Fractional part as (hi, lo) 64-bit lanes: frac = hi/2**64 + lo/2**128."""
        f = self.scaled % SCALE
        return f >> 64, f & _U64

    def dyadic_str(self) -> str:
        """Shortest exact representation ``n/2^k`` (or a plain integer)."""
        t, k = self.scaled, FRAC_BITS
        while k > 0 and t % 2 == 0:
            t //= 2
            k -= 1
        return str(t) if k == 0 else f"{t}/2^{k}"

    # -- comparisons --------------------------------------------------------

    def _key(self, other):
        if isinstance(other, FixedReal):
            return other.scaled
        if isinstance(other, int):
            return other << FRAC_BITS
        return None

    def __eq__(self, other):
        k = self._key(other)
        return NotImplemented if k is None else self.scaled == k

    def __lt__(self, other):
        k = self._key(other)
        return NotImplemented if k is None else self.scaled < k

    def __le__(self, other):
        k = self._key(other)
        return NotImplemented if k is None else self.scaled <= k

    def __gt__(self, other):
        k = self._key(other)
        return NotImplemented if k is None else self.scaled > k

    def __ge__(self, other):
        k = self._key(other)
        return NotImplemented if k is None else self.scaled >= k

    def __hash__(self):
        return hash(self.as_fraction())

    def __repr__(self):
        return f"FixedReal('{self.dyadic_str()}')"

    def __abs__(self):
        return FixedReal.from_scaled(abs(self.scaled))


def parse_real(text: str) -> FixedReal:
    """Parse a decimal or dyadic string.

    Accepts decimal literals (``0.25``, ``-3``), plain fractions (``1/4``) and
    the exact dyadic form ``n/2^k``; everything is snapped to the 2**-64 grid
    (exact for dyadics with k <= 64).
    """
    text = text.strip()
    if "/2^" in text:
        num, _, exp = text.partition("/2^")
        return FixedReal(Fraction(int(num), 1 << int(exp)))
    return FixedReal(text)


def sqrt_q64(n: int) -> FixedReal:
    """Nearest 2**-64 multiple of sqrt(n), computed with integer arithmetic."""
    if n < 0:
        raise ValueError("sqrt of negative integer")
    target = n << (2 * INPUT_BITS)
    s = math.isqrt(target)
    if target - s * s > s:  # nearest rounding: go up when remainder > s
        s += 1
    return FixedReal.from_q64(s)
