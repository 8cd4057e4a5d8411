"""Path-simulation kernels.

The same source implements both execution modes: when numba is importable
and DIVCTL_DISABLE_NUMBA is unset, the hot functions are JIT-compiled (and
the batch driver threads over paths); otherwise the identical bytecode runs
as plain Python. Set DIVCTL_DISABLE_NUMBA=1 to force the fallback.

Randomness is a per-path xoshiro256++ stream, written in masked-integer
style so the same expressions evaluate identically as numba uint64 and as
plain Python integers. Each path carries two substreams: one for the jump
clock and sizes, one for the Gaussian increments (a 256-layer ziggurat fed
by single 64-bit draws). Stream states are derived outside the kernel from
(seed XOR stream index) through numpy's SeedSequence.
"""
from __future__ import annotations

import math
import os

import numpy as np

_ENV_FLAG = os.environ.get("DIVCTL_DISABLE_NUMBA", "").strip().lower()
_DISABLED = _ENV_FLAG not in ("", "0", "false", "no")

try:
    if _DISABLED:
        raise ImportError("numba disabled by DIVCTL_DISABLE_NUMBA")
    from numba import njit, prange
    NUMBA_ENABLED = True
except ImportError:  # fallback: decorators become no-ops
    NUMBA_ENABLED = False
    prange = range

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def deco(f):
            return f
        return deco

_MASK = 0xFFFFFFFFFFFFFFFF
_INV2P53 = 1.1102230246251565e-16  # 2^-53

# 256-layer ziggurat for the standard normal
_ZIG_R = 3.6541528853610088
_ZIG_V = 4.92867323399e-3


def _build_ziggurat():
    c = 256
    x = np.zeros(c + 1)
    f = math.exp(-0.5 * _ZIG_R * _ZIG_R)
    x[0] = _ZIG_V / f
    x[1] = _ZIG_R
    for i in range(2, c):
        xi = math.sqrt(-2.0 * math.log(_ZIG_V / x[i - 1] + f))
        x[i] = xi
        f = math.exp(-0.5 * xi * xi)
    x[c] = 0.0
    ratio = x[1:c + 1] / x[0:c]
    fx = np.exp(-0.5 * x * x)
    return x, ratio, fx


_ZIG_X, _ZIG_RATIO, _ZIG_F = _build_ziggurat()

JUMP_EXPONENTIAL = 0
JUMP_HYPEREXP = 1
JUMP_ERLANG = 2


@njit(cache=True, inline="always")
def _rotl(x, k):
    return (((x << k) & _MASK) | (x >> (64 - k))) & _MASK


@njit(cache=True, inline="always")
def _xo_next(s0, s1, s2, s3):
    """One xoshiro256++ step; returns (64-bit draw, new state).

    Written with explicit masking so the arithmetic is exact both as numba
    uint64 (wrapping) and as arbitrary-precision Python integers.
    """
    out = (_rotl((s0 + s3) & _MASK, 23) + s0) & _MASK
    t = (s1 << 17) & _MASK
    s2 ^= s0
    s3 ^= s1
    s1 ^= s2
    s0 ^= s3
    s2 ^= t
    s3 = _rotl(s3, 45)
    return out, s0, s1, s2, s3


@njit(cache=True, inline="always")
def _uniform(s0, s1, s2, s3):
    """Uniform draw in the open interval (0, 1): 53 mantissa bits offset by
    half an ulp, so logarithms are always finite."""
    out, s0, s1, s2, s3 = _xo_next(s0, s1, s2, s3)
    return (float(out >> 11) + 0.5) * _INV2P53, s0, s1, s2, s3


@njit(cache=True, inline="always")
def _normal(s0, s1, s2, s3):
    """Standard normal via ziggurat; one 64-bit draw per normal in the
    common case (layer index bits 0-7, sign bit 8, mantissa bits 11-63)."""
    while True:
        out, s0, s1, s2, s3 = _xo_next(s0, s1, s2, s3)
        idx = out & 255
        sign = -1.0 if (out & 256) != 0 else 1.0
        u = float(out >> 11) * _INV2P53
        x = u * _ZIG_X[idx]
        if u < _ZIG_RATIO[idx]:
            return sign * x, s0, s1, s2, s3
        if idx == 0:
            while True:  # tail beyond R
                u1, s0, s1, s2, s3 = _uniform(s0, s1, s2, s3)
                u2, s0, s1, s2, s3 = _uniform(s0, s1, s2, s3)
                ex = -math.log(u1) / _ZIG_R
                ey = -math.log(u2)
                if ey + ey >= ex * ex:
                    return sign * (_ZIG_R + ex), s0, s1, s2, s3
        else:
            flo = _ZIG_F[idx]
            fhi = _ZIG_F[idx + 1]
            uw, s0, s1, s2, s3 = _uniform(s0, s1, s2, s3)
            if flo + uw * (fhi - flo) < math.exp(-0.5 * x * x):
                return sign * x, s0, s1, s2, s3


@njit(cache=True, inline="always")
def _draw_jump(s0, s1, s2, s3, kind, params):
    if kind == JUMP_EXPONENTIAL:
        u, s0, s1, s2, s3 = _uniform(s0, s1, s2, s3)
        return -math.log(u) / params[0], s0, s1, s2, s3
    if kind == JUMP_HYPEREXP:
        k = int(params[0])
        u, s0, s1, s2, s3 = _uniform(s0, s1, s2, s3)
        comp = k - 1
        for j in range(k):
            if u <= params[1 + j]:
                comp = j
                break
        u2, s0, s1, s2, s3 = _uniform(s0, s1, s2, s3)
        return -math.log(u2) / params[1 + k + comp], s0, s1, s2, s3
    # Erlang
    k = int(params[0])
    total = 0.0
    for _ in range(k):
        u, s0, s1, s2, s3 = _uniform(s0, s1, s2, s3)
        total += -math.log(u)
    return total / params[1], s0, s1, s2, s3


@njit(cache=True)
def _run_path(seeds, x0, barrier, inject, p, r, sig_p, sig_r, rho, lam,
              jkind, jparams, delta, dt, horizon, anti):
    """One controlled path; returns (disc_dividends, disc_injections, ruin_time, steps).

    Euler steps of size dt between jump events; jump times come from the
    exact exponential clock and the last pre-jump step is shortened to land
    on the jump. Surplus above the barrier is paid out at once; below zero
    it is either refilled (inject) or the path stops with its ruin time.
    ruin_time is -1.0 when the path survives to the horizon.
    """
    j0 = int(seeds[0]) & _MASK
    j1 = int(seeds[1]) & _MASK
    j2 = int(seeds[2]) & _MASK
    j3 = int(seeds[3]) & _MASK
    d0 = int(seeds[4]) & _MASK
    d1 = int(seeds[5]) & _MASK
    d2 = int(seeds[6]) & _MASK
    d3 = int(seeds[7]) & _MASK
    u = x0
    ddiv = 0.0
    dinj = 0.0
    steps = 0
    if u > barrier:
        ddiv += u - barrier
        u = barrier
    if u <= 0.0 and not inject:
        return ddiv, dinj, 0.0, float(steps)
    df = 1.0
    dfstep = math.exp(-delta * dt)
    sig_sqdt = sig_p * math.sqrt(dt)
    sigr_sqdt = sig_r * math.sqrt(dt)
    rho_c = math.sqrt(max(1.0 - rho * rho, 0.0))
    diffusive = sig_p > 0.0 or sig_r > 0.0
    t = 0.0
    uj, j0, j1, j2, j3 = _uniform(j0, j1, j2, j3)
    t_jump = -math.log(uj) / lam
    while t < horizon - 1e-12:
        at_jump = t_jump < horizon
        te = t_jump if at_jump else horizon
        n_full = int((te - t) / dt)
        if n_full < 0:
            n_full = 0
        # full dt steps strictly inside the segment (time advances implicitly)
        i = 0
        while i < n_full:
            i += 1
            if diffusive:
                z1, d0, d1, d2, d3 = _normal(d0, d1, d2, d3)
                z1 *= anti
                if sig_r > 0.0:
                    z2, d0, d1, d2, d3 = _normal(d0, d1, d2, d3)
                    u += (r * u - p) * dt + sig_sqdt * z1 \
                        + u * sigr_sqdt * (rho * z1 + rho_c * anti * z2)
                else:
                    u += (r * u - p) * dt + sig_sqdt * z1
            else:
                u += (r * u - p) * dt
            df *= dfstep
            if u > barrier:
                ddiv += df * (u - barrier)
                u = barrier
            if u <= 0.0:
                if inject:
                    dinj += df * (0.0 - u)
                    u = 0.0
                else:
                    steps += i
                    return ddiv, dinj, t + i * dt, float(steps)
        steps += n_full
        # partial step onto the segment end (jump time or horizon)
        h = te - (t + n_full * dt)
        df = math.exp(-delta * te)
        if h > 1e-14:
            steps += 1
            if diffusive:
                sq = math.sqrt(h)
                z1, d0, d1, d2, d3 = _normal(d0, d1, d2, d3)
                z1 *= anti
                if sig_r > 0.0:
                    z2, d0, d1, d2, d3 = _normal(d0, d1, d2, d3)
                    u += (r * u - p) * h + sig_p * sq * z1 \
                        + u * sig_r * sq * (rho * z1 + rho_c * anti * z2)
                else:
                    u += (r * u - p) * h + sig_p * sq * z1
            else:
                u += (r * u - p) * h
            if u > barrier:
                ddiv += df * (u - barrier)
                u = barrier
            if u <= 0.0:
                if inject:
                    dinj += df * (0.0 - u)
                    u = 0.0
                else:
                    return ddiv, dinj, te, float(steps)
        t = te
        if at_jump:
            xj, j0, j1, j2, j3 = _draw_jump(j0, j1, j2, j3, jkind, jparams)
            u += xj
            steps += 1
            if u > barrier:
                ddiv += df * (u - barrier)
                u = barrier
            uj, j0, j1, j2, j3 = _uniform(j0, j1, j2, j3)
            t_jump = t - math.log(uj) / lam
        else:
            return ddiv, dinj, -1.0, float(steps)
    return ddiv, dinj, -1.0, float(steps)


@njit(cache=True, parallel=True)
def _run_batch(seeds, x0, barrier, inject, p, r, sig_p, sig_r, rho, lam,
               jkind, jparams, delta, dt, horizon, antithetic, out):
    n = seeds.shape[0]
    for i in prange(n):
        anti = -1.0 if (antithetic and (i & 1) == 1) else 1.0
        dd, di, rt, ns = _run_path(seeds[i], x0, barrier, inject, p, r, sig_p,
                                   sig_r, rho, lam, jkind, jparams, delta, dt,
                                   horizon, anti)
        out[i, 0] = dd
        out[i, 1] = di
        out[i, 2] = rt
        out[i, 3] = ns


@njit(cache=True)
def _sample_normals(seeds, out):
    """Fill `out` with ziggurat normals from one stream (test/benchmark aid)."""
    s0 = int(seeds[0]) & _MASK
    s1 = int(seeds[1]) & _MASK
    s2 = int(seeds[2]) & _MASK
    s3 = int(seeds[3]) & _MASK
    for i in range(out.size):
        z, s0, s1, s2, s3 = _normal(s0, s1, s2, s3)
        out[i] = z


def derive_stream_states(seed: int, indices) -> np.ndarray:
    """xoshiro256++ initial states for the given stream indices.

    Each stream id is seed XOR index; the id feeds a SeedSequence whose
    eight 64-bit words seed the two per-path substreams (jump clock,
    diffusion). All-zero substreams (probability ~2^-256) are bumped.
    """
    indices = np.asarray(indices, dtype=np.int64)
    out = np.empty((indices.size, 8), dtype=np.uint64)
    base = int(seed) & _MASK
    for row, idx in enumerate(indices):
        ss = np.random.SeedSequence((base ^ (int(idx) & _MASK)) & _MASK)
        w = ss.generate_state(8, dtype=np.uint64)
        if not w[0:4].any():
            w[0] = 1
        if not w[4:8].any():
            w[4] = 1
        out[row] = w
    return out
