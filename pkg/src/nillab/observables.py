"""Continuous test functions of prescribed vertical frequency.

An observable of vertical frequency xi transforms under the central circle
action by F((0,0,s) tau) = e(xi s) F(tau).  We construct such functions
explicitly as F = e(xi z) * bump(x, y) on canonical coordinates, with the
bump supported away from the fundamental-domain boundary (inside
(1/8, 7/8)^2) so F is continuous on the nilmanifold: the z chart jump across
the gluing is multiplied by zero.  Frequency-zero observables are plain base
torus Fourier modes.

The pair observable f1(x1, x2) = f(x1) conj(f(x2)) is invariant under the
diagonal central shift (z1, z2) -> (z1+s, z2+s), hence descends to the reduced
joining space; the descent is evaluated by picking the pair representative
((p x, p y, z), (q x, q y, 0)) of a star point and reducing each factor to X.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .heisenberg import NilPoint

TWO_PI = 2.0 * math.pi


def _smoothstep(u):
    """Order-3 polynomial step: 0 below 0, 1 above 1, u^2(3-2u) between."""
    u = np.clip(u, 0.0, 1.0)
    return u * u * (3.0 - 2.0 * u)


@dataclass(frozen=True)
class BumpProfile:
    """Product smoothstep bump on (0,1)^2, vanishing outside its support box.

    Support is [cx - r, cx + r] x [cy - r, cy + r], required to stay inside
    (1/8, 7/8)^2 so the induced observable is continuous on the nilmanifold.
    Peak value 1 at the center.
    """

    center: tuple[float, float] = (0.5, 0.5)
    radius: float = 0.25
    margin: float = 0.125

    def __post_init__(self):
        cx, cy = self.center
        r = self.radius
        if r <= 0:
            raise ValueError("bump radius must be positive")
        if not (self.margin <= cx - r and cx + r <= 1 - self.margin
                and self.margin <= cy - r and cy + r <= 1 - self.margin):
            raise ValueError(
                f"bump support must stay inside ({self.margin}, {1 - self.margin})^2"
            )

    @property
    def lipschitz(self) -> float:
        # |smoothstep'| <= 3/2, one factor per axis, product bounded by 1
        return 1.5 / self.radius

    def __call__(self, x, y):
        cx, cy = self.center
        tx = 1.0 - np.abs(np.asarray(x, dtype=np.float64) - cx) / self.radius
        ty = 1.0 - np.abs(np.asarray(y, dtype=np.float64) - cy) / self.radius
        return _smoothstep(tx) * _smoothstep(ty)


@dataclass(frozen=True)
class Observable:
    """A vertical-frequency observable, or a base Fourier mode when xi = 0."""

    xi: int
    bump: BumpProfile | None = None
    base_mode: tuple[int, int] | None = None

    def __post_init__(self):
        if self.xi != 0:
            if self.bump is None or self.base_mode is not None:
                raise ValueError("nonzero frequency requires a bump profile (and no base mode)")
        else:
            if self.base_mode is None or self.bump is not None:
                raise ValueError("zero frequency requires a base mode (and no bump)")

    @property
    def sup(self) -> float:
        return 1.0

    def eval_arrays(self, x, y, z):
        """Value at canonical coordinates (vectorized floats)."""
        if self.xi == 0:
            k1, k2 = self.base_mode
            return np.exp(2j * math.pi * (k1 * np.asarray(x) + k2 * np.asarray(y)))
        return np.exp(2j * math.pi * self.xi * np.asarray(z)) * self.bump(x, y)

    def __call__(self, x, y, z, n=None):
        """Engine sink signature; the step index is ignored."""
        return self.eval_arrays(x, y, z)


def eval_observable(obs: Observable, pt: NilPoint) -> complex:
    """Observable value at a canonical nilmanifold point."""
    x, y, z = (float(v) for v in pt.coords())
    return complex(obs.eval_arrays(x, y, z))


def fiber_average(obs: Observable, base: tuple[float, float], m: int) -> complex:
    """Equal-weight quadrature of F over the fiber above (x, y) at m nodes.

    Exactly zero (to roundoff) for xi != 0 by discrete orthogonality once
    m >= 2|xi| + 2, which is required.
    """
    if m < 2 * abs(obs.xi) + 2:
        raise ValueError(f"need m >= 2|xi|+2 = {2 * abs(obs.xi) + 2}, got {m}")
    x, y = base
    zs = np.arange(m, dtype=np.float64) / m
    vals = obs.eval_arrays(np.full(m, x), np.full(m, y), zs)
    return complex(vals.mean())


@dataclass(frozen=True)
class JoiningObservable:
    """The product observable f (x) conj(f) descended to the reduced space."""

    source: Observable
    p: int
    q: int

    def __post_init__(self):
        if self.source.xi == 0:
            raise ValueError("the descent requires a source of nonzero vertical frequency")
        if not self.p > self.q > 0:
            raise ValueError("need p > q > 0")

    def eval_pair(self, first: NilPoint, second: NilPoint) -> complex:
        """f1 on a pair of Heisenberg points."""
        return eval_observable(self.source, first) * np.conj(
            eval_observable(self.source, second)
        )

    def _factor(self, m: int, x, y, z):
        """f at the X-reduction of the group point (m x, m y, z), floats."""
        u = m * np.asarray(x, dtype=np.float64)
        v = m * np.asarray(y, dtype=np.float64)
        fu = np.floor(u)
        fv = np.floor(v)
        xa = u - fu
        ya = v - fv
        za = np.asarray(z, dtype=np.float64) - (u * fv - fu * v)
        za = za - np.floor(za)
        return self.source.eval_arrays(xa, ya, za)

    def eval_star(self, x, y, z):
        """f_star at trivialized star coordinates (vectorized floats)."""
        return self._factor(self.p, x, y, z) * np.conj(
            self._factor(self.q, x, y, np.zeros_like(np.asarray(z, dtype=np.float64)))
        )

    def __call__(self, x, y, z, n=None):
        return self.eval_star(x, y, z)


def eval_joining_observable(jobs: JoiningObservable, star_coords) -> complex:
    """f_star at a trivialized star point given as a coordinate triple."""
    x, y, z = (float(v) for v in star_coords)
    return complex(jobs.eval_star(x, y, z))
