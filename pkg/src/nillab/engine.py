"""Deterministic segmented orbit engine on exact uint64 circle lanes.

A torus coordinate is carried as a uint64 ``u`` standing for ``u / 2**64``;
uint64 wraparound *is* arithmetic mod 1, exactly.  The periodic part of the
fiber function enters through the canonical 2**-53 quantization (shared with
the scalar dynamics), so every z value along an orbit is an exact integer
computation: independent of segmentation, worker count and evaluation order.
The z lane carries a second 64-bit limb (``z = hi/2**64 + lo/2**128``) because
cross terms like alpha * y0 live on the 2**-128 grid.

Streaming is two-pass: pass 1 computes each segment's cocycle total
independently, an exclusive scan over segment totals yields the z-offsets,
and pass 2 evaluates observables per segment in a thread pool.  Observable
values are quantized to 2**-53 and summed in integer arithmetic, which makes
checkpoint sums bit-identical for any ``worker_count`` at fixed
``segment_size`` -- and equal to the naive single-loop oracle.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dynamics import JoiningSystem, SkewSystem
from .fixedpoint import FixedReal
from .heisenberg import HEISENBERG, NilPoint

MASK64 = (1 << 64) - 1
Q53 = 2.0**53
_U32MASK = np.uint64(0xFFFFFFFF)
_SH32 = np.uint64(32)
_VALUE_BOUND = 2.0  # |observable value| contract for exact accumulation


def u64c(v: int) -> np.uint64:
    """A Python integer as a wrapped uint64 constant."""
    return np.uint64(v & MASK64)


def mulhi_u64(a, b):
    """High 64 bits of the 64x64 product, elementwise (32-bit split)."""
    a = np.asarray(a, dtype=np.uint64)
    b = np.asarray(b, dtype=np.uint64)
    a_lo = a & _U32MASK
    a_hi = a >> _SH32
    b_lo = b & _U32MASK
    b_hi = b >> _SH32
    t = a_lo * b_lo
    w = a_hi * b_lo + (t >> _SH32)
    v = a_lo * b_hi + (w & _U32MASK)
    return a_hi * b_hi + (w >> _SH32) + (v >> _SH32)


def _frac_int_parts(base_u: np.uint64, step_u: np.uint64, n: np.ndarray):
    """frac and floor of base + n*step, where base, step are Q64 in [0, 1)."""
    lo = n * step_u
    frac = base_u + lo
    carry = (frac < lo).astype(np.uint64)
    return frac, mulhi_u64(n, step_u) + carry


def _n_times_q128(c128: int, n: np.ndarray):
    """(hi, lo) lanes of n * c128 mod 2**128 for a fixed 128-bit constant."""
    c_hi = u64c(c128 >> 64)
    c_lo = u64c(c128)
    lo = n * c_lo
    hi = n * c_hi + mulhi_u64(n, c_lo)
    return hi, lo


@dataclass(frozen=True)
class OrbitSegmentPlan:
    """Segmentation contract for a deterministic stream."""

    n_total: int
    segment_size: int = 1 << 16
    worker_count: int = 1

    def __post_init__(self):
        if not (1 <= self.n_total < (1 << 63)):
            raise ValueError("n_total must be in [1, 2**63)")
        s = self.segment_size
        if s < 1 or (s & (s - 1)) != 0:
            raise ValueError("segment_size must be a power of two")
        if self.worker_count < 1:
            raise ValueError("worker_count must be positive")


# ---------------------------------------------------------------------------
# lane streams
# ---------------------------------------------------------------------------


def _require_q64_unit(v: FixedReal, name: str) -> int:
    if not isinstance(v, FixedReal):
        raise TypeError(f"{name} must be FixedReal on the engine path")
    if not (0 <= v and v < 1):
        raise ValueError(f"{name} must lie in [0, 1) for the engine")
    return v.frac_u64()


class _LaneStream:
    """Shared z-lane assembly for the canonical-coordinates orbit formula:

    z_n = frac(z0 + S_n + c [n (alpha y0 - beta x0)
                              - (x0 + n alpha) floor(y0 + n beta)
                              + floor(x0 + n alpha) (y0 + n beta)])
    with S_n the cocycle Birkhoff sum mod 1.
    """

    def __init__(self, alpha: FixedReal, beta: FixedReal, x0: FixedReal, y0: FixedReal,
                 z0: FixedReal, twist: int):
        self.a_int = _require_q64_unit(alpha, "alpha")
        self.b_int = _require_q64_unit(beta, "beta")
        self.x0_int = _require_q64_unit(x0, "start x")
        self.y0_int = _require_q64_unit(y0, "start y")
        z0f = z0.frac()
        self.z0_hi, self.z0_lo = z0f.frac_lanes()
        self.twist = twist
        self.au = u64c(self.a_int)
        self.bu = u64c(self.b_int)
        self.x0u = u64c(self.x0_int)
        self.y0u = u64c(self.y0_int)
        self.cu = u64c(twist)
        # c*(alpha*y0 - beta*x0) on the 2**-128 grid, wrapped mod 2**128
        self.cross = (twist * (self.a_int * self.y0_int - self.b_int * self.x0_int)) % (1 << 128)

    def u_values(self, i: np.ndarray) -> np.ndarray:  # pragma: no cover - abstract
        raise NotImplementedError

    def lanes(self, n: np.ndarray, s: np.ndarray):
        """(x frac, y frac, z hi, z lo) for step indices n with cocycle sums s."""
        t1_hi, t1_lo = _n_times_q128(self.cross, n)
        fx, kx = _frac_int_parts(self.x0u, self.au, n)
        fy, m = _frac_int_parts(self.y0u, self.bu, n)
        z_lo = u64c(self.z0_lo) + t1_lo
        carry = (z_lo < t1_lo).astype(np.uint64)
        z_hi = (
            u64c(self.z0_hi)
            + s
            + t1_hi
            + carry
            - fx * (m * self.cu)
            + fy * (kx * self.cu)
        )
        return fx, fy, z_hi, z_lo


class _SkewLanes(_LaneStream):
    """Lanes of the T-orbit on X from a canonical start point."""

    def __init__(self, sys: SkewSystem, start: NilPoint):
        if not start.is_fixed or start.law != HEISENBERG:
            raise ValueError("engine start must be a fixed-point Heisenberg NilPoint")
        x0, y0, z0 = start.coords()
        super().__init__(sys.alpha, sys.beta, x0, y0, z0, twist=1)
        self.h = sys.h
        self.d1u = u64c(sys.h.d1)
        self.d2u = u64c(sys.h.d2)

    def u_values(self, i: np.ndarray) -> np.ndarray:
        xg = self.x0u + i * self.au
        yg = self.y0u + i * self.bu
        q = self.h.periodic_q53(xg, yg).astype(np.uint64) << np.uint64(11)
        return self.d1u * xg + self.d2u * yg + q


class _JoiningLanes(_LaneStream):
    """Lanes of the trivialized joining orbit on T^3.

    The per-step fiber value is H(x0+i a, y0+i b) whose lift is a sum of
    p + q shifted h lifts evaluated at indices p i + j and q i + j.
    """

    def __init__(self, js: JoiningSystem, start):
        x0, y0, z0 = start
        super().__init__(js.base.alpha, js.base.beta, x0, y0, z0, twist=js.twist)
        self.h = js.base.h
        self.p = js.p
        self.q = js.q
        self.d1u = u64c(js.base.h.d1)
        self.d2u = u64c(js.base.h.d2)
        self.px0u = u64c(self.p * self.x0_int)
        self.py0u = u64c(self.p * self.y0_int)
        self.qx0u = u64c(self.q * self.x0_int)
        self.qy0u = u64c(self.q * self.y0_int)

    def _ell(self, xg: np.ndarray, yg: np.ndarray) -> np.ndarray:
        q = self.h.periodic_q53(xg, yg).astype(np.uint64) << np.uint64(11)
        return self.d1u * xg + self.d2u * yg + q

    def u_values(self, i: np.ndarray) -> np.ndarray:
        acc = np.zeros(i.shape, dtype=np.uint64)
        pu = u64c(self.p)
        qu = u64c(self.q)
        for j in range(self.p):
            idx = i * pu + u64c(j)
            acc = acc + self._ell(self.px0u + idx * self.au, self.py0u + idx * self.bu)
        for j in range(self.q):
            idx = i * qu + u64c(j)
            acc = acc - self._ell(self.qx0u + idx * self.au, self.qy0u + idx * self.bu)
        return acc


def _make_stream(system, start) -> _LaneStream:
    if isinstance(system, SkewSystem):
        if start is None:
            from .heisenberg import identity, canonical_rep

            start = canonical_rep(identity())
        return _SkewLanes(system, start)
    if isinstance(system, JoiningSystem):
        if start is None:
            start = (FixedReal(0), FixedReal(0), FixedReal(0))
        return _JoiningLanes(system, start)
    raise TypeError(f"cannot stream orbits of {type(system).__name__}")


# ---------------------------------------------------------------------------
# exact quantized accumulation
# ---------------------------------------------------------------------------


def _exact_sum_i64(a: np.ndarray) -> int:
    """Exact integer sum of quantized values (|entry| <= 2**54 guaranteed)."""
    if a.size == 0:
        return 0
    k = (a.size // 256) * 256
    total = 0
    if k:
        body = a[:k].reshape(-1, 256).sum(axis=1, dtype=np.int64)  # <= 256*2**54 < 2**63
        total += int(body.sum(dtype=object))
    if a.size > k:
        total += int(a[k:].sum(dtype=np.int64))
    return total


def _quantize(values: np.ndarray):
    v = np.asarray(values)
    re = np.ascontiguousarray(v.real)
    im = np.ascontiguousarray(v.imag) if np.iscomplexobj(v) else np.zeros_like(re)
    peak = max(np.max(np.abs(re), initial=0.0), np.max(np.abs(im), initial=0.0))
    if not np.isfinite(peak) or peak > _VALUE_BOUND:
        raise ValueError(
            f"observable value magnitude {peak} exceeds the accumulation bound "
            f"{_VALUE_BOUND}"
        )
    return (
        np.rint(re * Q53).astype(np.int64),
        np.rint(im * Q53).astype(np.int64),
    )


def _float_lanes(fx, fy, z_hi, z_lo):
    xf = fx.astype(np.float64) * 2.0**-64
    yf = fy.astype(np.float64) * 2.0**-64
    zf = z_hi.astype(np.float64) * 2.0**-64 + z_lo.astype(np.float64) * 2.0**-128
    return xf, yf, zf


def _eval_fn(fn, fx, fy, z_hi, z_lo, n, floats_cache):
    if getattr(fn, "wants_lanes", False):
        return fn(fx, fy, z_hi, z_lo, n)
    if floats_cache[0] is None:
        floats_cache[0] = _float_lanes(fx, fy, z_hi, z_lo)
    xf, yf, zf = floats_cache[0]
    return fn(xf, yf, zf, n)


# ---------------------------------------------------------------------------
# the two-pass stream
# ---------------------------------------------------------------------------


def _segment_bounds(n_total: int, segment_size: int):
    return [(lo, min(lo + segment_size, n_total)) for lo in range(0, n_total, segment_size)]


def _segment_offsets(stream: _LaneStream, bounds, workers: int):
    """Pass 1: per-segment cocycle totals and their exclusive scan (mod 1)."""

    def total(seg):
        lo, hi = seg
        i = np.arange(lo, hi, dtype=np.uint64)
        return int(stream.u_values(i).sum(dtype=np.uint64))

    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            totals = list(pool.map(total, bounds))
    else:
        totals = [total(seg) for seg in bounds]
    offsets = []
    acc = 0
    for t in totals:
        offsets.append(acc)
        acc = (acc + t) & MASK64
    return offsets


def orbit_stream_multi(
    system,
    start,
    plan: OrbitSegmentPlan,
    value_fns,
    weights=None,
    checkpoints=None,
):
    """Checkpointed exact sums of several observables along one orbit.

    ``value_fns`` are callables ``fn(x, y, z, n) -> complex ndarray`` (floats
    in [0,1)), or lane sinks with ``wants_lanes = True`` receiving the raw
    uint64 lanes.  ``weights`` is an optional callable ``(lo, hi) -> int8``
    giving multiplicative weights for steps lo+1 .. hi.  Returns, per value
    function, a list of ``(N, complex_sum)`` with the *unnormalized* sum over
    n <= N, exactly accumulated on the 2**-53 grid.
    """
    n_total = plan.n_total
    if checkpoints is None:
        checkpoints = [n_total]
    checkpoints = list(checkpoints)
    if checkpoints != sorted(checkpoints) or len(set(checkpoints)) != len(checkpoints):
        raise ValueError("checkpoints must be strictly increasing")
    if checkpoints and (checkpoints[0] < 1 or checkpoints[-1] > n_total):
        raise ValueError("checkpoints must lie in [1, n_total]")

    stream = _make_stream(system, start)
    bounds = _segment_bounds(n_total, plan.segment_size)
    offsets = _segment_offsets(stream, bounds, plan.worker_count)
    nfns = len(value_fns)

    def job(k):
        lo, hi = bounds[k]
        i = np.arange(lo, hi, dtype=np.uint64)
        u = stream.u_values(i)
        s = u64c(offsets[k]) + np.cumsum(u, dtype=np.uint64)
        n = i + np.uint64(1)
        fx, fy, z_hi, z_lo = stream.lanes(n, s)
        w = weights(lo + 1, hi + 1) if weights is not None else None
        floats_cache = [None]
        cuts = [c for c in checkpoints if lo < c <= hi]
        out = []
        for fn in value_fns:
            v = _eval_fn(fn, fx, fy, z_hi, z_lo, n, floats_cache)
            if w is not None:
                v = v * w
            qre, qim = _quantize(v)
            cut_sums = [
                (c, _exact_sum_i64(qre[: c - lo]), _exact_sum_i64(qim[: c - lo])) for c in cuts
            ]
            out.append((cut_sums, _exact_sum_i64(qre), _exact_sum_i64(qim)))
        return out

    if plan.worker_count > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=plan.worker_count) as pool:
            seg_results = list(pool.map(job, range(len(bounds))))
    else:
        seg_results = [job(k) for k in range(len(bounds))]

    results = [[] for _ in range(nfns)]
    running = [(0, 0)] * nfns
    for seg in seg_results:
        for f, (cut_sums, tot_re, tot_im) in enumerate(seg):
            re0, im0 = running[f]
            for c, cre, cim in cut_sums:
                results[f].append((c, complex((re0 + cre) / Q53, (im0 + cim) / Q53)))
            running[f] = (re0 + tot_re, im0 + tot_im)
    return results


def orbit_stream(system, start, plan, value_fn, weights=None, checkpoints=None):
    """Single-observable form of :func:`orbit_stream_multi`."""
    return orbit_stream_multi(system, start, plan, [value_fn], weights, checkpoints)[0]


def orbit_stream_naive(system, start, n_total, value_fn, weights=None, checkpoints=None):
    """Single-threaded reference loop; must agree with the engine bit for bit.

    Reuses the same per-step kernels pointwise (length-1 arrays) but performs
    no segmentation, scan, or vector accumulation.
    """
    if checkpoints is None:
        checkpoints = [n_total]
    stream = _make_stream(system, start)
    s = 0
    re_tot = 0
    im_tot = 0
    out = []
    cset = set(checkpoints)
    for i in range(n_total):
        iu = np.array([i], dtype=np.uint64)
        s = (s + int(stream.u_values(iu)[0])) & MASK64
        n = i + 1
        fx, fy, z_hi, z_lo = stream.lanes(
            np.array([n], dtype=np.uint64), np.array([s], dtype=np.uint64)
        )
        floats_cache = [None]
        v = _eval_fn(value_fn, fx, fy, z_hi, z_lo, np.array([n], dtype=np.uint64), floats_cache)
        if weights is not None:
            v = v * weights(n, n + 1)
        qre, qim = _quantize(v)
        re_tot += int(qre[0])
        im_tot += int(qim[0])
        if n in cset:
            out.append((n, complex(re_tot / Q53, im_tot / Q53)))
    return out


def orbit_points(system, start, ns):
    """Float coordinates of the orbit at the given step indices (exact lanes)."""
    stream = _make_stream(system, start)
    out = []
    s = 0
    want = sorted(set(int(n) for n in ns))
    if want and want[0] < 1:
        raise ValueError("orbit indices must be >= 1")
    pos = 0
    for n in want:
        while pos < n:
            block = min(n - pos, 1 << 16)
            i = np.arange(pos, pos + block, dtype=np.uint64)
            s = (s + int(stream.u_values(i).sum(dtype=np.uint64))) & MASK64
            pos += block
        fx, fy, z_hi, z_lo = stream.lanes(
            np.array([n], dtype=np.uint64), np.array([s], dtype=np.uint64)
        )
        xf, yf, zf = _float_lanes(fx, fy, z_hi, z_lo)
        out.append((n, float(xf[0]), float(yf[0]), float(zf[0])))
    return out


# ---------------------------------------------------------------------------
# the prime-pair streams
# ---------------------------------------------------------------------------


def pair_factor_values(sys: SkewSystem, start, p: int, q: int, n_pairs: int,
                       plan_template: OrbitSegmentPlan, obs):
    """F(T^{p n} x0) and F(T^{q n} x0) for n = 1..n_pairs, one stream to p*n_pairs.

    Lane-exact; the observable is evaluated only at the strided positions.
    """
    total = p * n_pairs
    stream = _make_stream(sys, start)
    bounds = _segment_bounds(total, plan_template.segment_size)
    offsets = _segment_offsets(stream, bounds, plan_template.worker_count)
    fp = np.zeros(n_pairs, dtype=np.complex128)
    fq = np.zeros(n_pairs, dtype=np.complex128)

    def job(k):
        lo, hi = bounds[k]
        i = np.arange(lo, hi, dtype=np.uint64)
        u = stream.u_values(i)
        s = u64c(offsets[k]) + np.cumsum(u, dtype=np.uint64)
        n = i + np.uint64(1)
        fx, fy, z_hi, z_lo = stream.lanes(n, s)
        n_int = np.arange(lo + 1, hi + 1, dtype=np.int64)
        for stride, sink in ((p, fp), (q, fq)):
            mask = (n_int % stride == 0) & (n_int <= stride * n_pairs)
            if not mask.any():
                continue
            xf, yf, zf = _float_lanes(fx[mask], fy[mask], z_hi[mask], z_lo[mask])
            sink[n_int[mask] // stride - 1] = obs.eval_arrays(xf, yf, zf)

    if plan_template.worker_count > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=plan_template.worker_count) as pool:
            list(pool.map(job, range(len(bounds))))
    else:
        for k in range(len(bounds)):
            job(k)
    return fp, fq


def checkpoint_sums(values: np.ndarray, checkpoints) -> list[tuple[int, complex]]:
    """Exact quantized checkpoint sums of 1-indexed per-step values."""
    out = []
    qre, qim = _quantize(values)
    prev = 0
    re_tot = 0
    im_tot = 0
    for c in checkpoints:
        if not (1 <= c <= values.size):
            raise ValueError("checkpoint beyond available values")
        re_tot += _exact_sum_i64(qre[prev:c])
        im_tot += _exact_sum_i64(qim[prev:c])
        prev = c
        out.append((c, complex(re_tot / Q53, im_tot / Q53)))
    return out


class StarDescentSink:
    """Lane sink evaluating the descended pair observable f_star on T^3 points.

    For a trivialized joining point (x, y, z) the descent picks the pair
    representative ((p x, p y, z), (q x, q y, 0)) and evaluates
    f(first) * conj(f(second)) after exact reduction to the fundamental
    domain of X.
    """

    wants_lanes = True

    def __init__(self, obs, p: int, q: int):
        if obs.xi == 0:
            raise ValueError("descent requires a nonzero vertical frequency")
        self.obs = obs
        self.p = p
        self.q = q

    def _factor(self, m: int, fx, fy, z_hi, z_lo):
        mu = u64c(m)
        xa = fx * mu
        ka = mulhi_u64(fx, mu)
        ya = fy * mu
        la = mulhi_u64(fy, mu)
        za_hi = z_hi - xa * la + ka * ya
        xf, yf, zf = _float_lanes(xa, ya, za_hi, z_lo)
        return self.obs.eval_arrays(xf, yf, zf)

    def __call__(self, fx, fy, z_hi, z_lo, n):
        zero = np.zeros_like(z_lo)
        f1 = self._factor(self.p, fx, fy, z_hi, z_lo)
        f2 = self._factor(self.q, fx, fy, zero, zero)
        return f1 * np.conj(f2)
