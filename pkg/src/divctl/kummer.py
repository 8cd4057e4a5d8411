"""Confluent hypergeometric functions M(a,b,z) and U(a,b,z) with derivatives.

These are the two standard solutions of z f'' + (b - z) f' - a f = 0. The
return-on-investment solvers evaluate them at z = mu*(x - p/r), which is
negative left of the drift root p/r, so alongside the principal U (defined
for z > 0) this module provides the real-valued second solution

    S(a, b, z) = |z|^(1-b) * M(a+1-b, 2-b, z),

valid on either side of z = 0 and used whenever the argument is negative.

Derivatives use parameter-shift formulas, not numeric differentiation:
M' = (a/b) M(a+1,b+1,z), U' = -a U(a+1,b+1,z), S' = sign(z)(1-b) S(a+1,b+1,z).
"""
from __future__ import annotations

import math

from scipy import special as _sp

from .errors import BranchDomain, NonConvergence, ParameterPole

__all__ = [
    "kummer_M",
    "kummer_M_prime",
    "kummer_U",
    "kummer_U_prime",
    "kummer_second",
    "kummer_second_prime",
    "kummer_second_pp",
]

_MAX_TERMS = 2000
_POLE_TOL = 1e-12
_NEAR_INT = 1e-6


def _check_b_pole(b: float):
    if b <= 0.5 and abs(b - round(b)) < _POLE_TOL:
        raise ParameterPole(f"M(a,b,z) undefined at non-positive integer b={b}")


def _m_series(a: float, b: float, z: float) -> float:
    """Direct sum of the defining series; caller guarantees z >= 0."""
    term = 1.0
    total = 1.0
    for n in range(_MAX_TERMS):
        term *= (a + n) / (b + n) * z / (n + 1.0)
        total += term
        if not math.isfinite(total):
            raise NonConvergence(f"M series overflowed for a={a}, b={b}, z={z}")
        if abs(term) <= 1e-16 * abs(total) and n > 2:
            return total
    raise NonConvergence(f"M series did not converge for a={a}, b={b}, z={z}")


def kummer_M(a: float, b: float, z: float) -> float:
    """M(a, b, z) for real arguments.

    Negative z is routed through the transformation M(a,b,z) = e^z M(b-a,b,-z),
    which keeps every series argument nonnegative and avoids the alternating
    cancellation that direct summation suffers for large negative z.
    """
    _check_b_pole(b)
    if z < 0.0:
        return math.exp(z) * _m_series(b - a, b, -z)
    return _m_series(a, b, z)


def kummer_M_prime(a: float, b: float, z: float) -> float:
    """dM/dz = (a/b) M(a+1, b+1, z)."""
    _check_b_pole(b)
    if b == 0.0:
        raise ParameterPole("M'(a,b,z) undefined at b=0")
    return (a / b) * kummer_M(a + 1.0, b + 1.0, z)


def _u_connection(a: float, b: float, z: float) -> float:
    """Two-M connection formula for U; accurate only while e^z stays small
    against machine precision (the two terms cancel to U ~ z^-a)."""
    t1 = _sp.gamma(1.0 - b) * _sp.rgamma(a + 1.0 - b) * kummer_M(a, b, z)
    t2 = _sp.gamma(b - 1.0) * _sp.rgamma(a) * z ** (1.0 - b) * kummer_M(a - b + 1.0, 2.0 - b, z)
    return t1 + t2


def kummer_U(a: float, b: float, z: float) -> float:
    """Principal second solution U(a, b, z) on z > 0.

    Near-integer b (within 1e-6) is a removable numerical singularity of the
    backend; it is handled by evaluating at the flanking offsets b0 +- 1e-5
    and combining the symmetric average with a central slope correction.
    """
    if z <= 0.0:
        raise BranchDomain(
            f"U(a,b,z) takes z > 0 (got z={z}); use kummer_second for negative arguments")
    dist = abs(b - round(b))
    if dist < _NEAR_INT:
        b0 = round(b)
        eps = 1e-5
        up = _sp.hyperu(a, b0 + eps, z)
        dn = _sp.hyperu(a, b0 - eps, z)
        val = 0.5 * (up + dn) + (b - b0) * (up - dn) / (2.0 * eps)
    else:
        val = _sp.hyperu(a, b, z)
    if not math.isfinite(val):
        # backend gave up; the connection formula still works for modest z
        if z < 20.0:
            return _u_connection(a, b, z)
        raise NonConvergence(f"U(a={a}, b={b}, z={z}) could not be evaluated")
    return val


def kummer_U_prime(a: float, b: float, z: float) -> float:
    """dU/dz = -a U(a+1, b+1, z)."""
    if a == 0.0:
        return 0.0
    return -a * kummer_U(a + 1.0, b + 1.0, z)


def kummer_second(a: float, b: float, z: float) -> float:
    """Real second solution S(a,b,z) = |z|^(1-b) M(a+1-b, 2-b, z).

    Defined for 1 - b > 0 at z = 0 (value 0) and for all real z otherwise.
    On z > 0 it spans, together with M, the same space as {M, U}.
    """
    if z == 0.0:
        if 1.0 - b > 0.0:
            return 0.0
        raise BranchDomain(f"S(a,b,0) diverges for b >= 1 (b={b})")
    return abs(z) ** (1.0 - b) * kummer_M(a + 1.0 - b, 2.0 - b, z)


def kummer_second_prime(a: float, b: float, z: float) -> float:
    """dS/dz = sign(z) (1-b) |z|^(-b) M(a+1-b, 1-b, z)."""
    if z == 0.0:
        raise BranchDomain("S'(a,b,0) is singular")
    sgn = 1.0 if z > 0.0 else -1.0
    return sgn * (1.0 - b) * abs(z) ** (-b) * kummer_M(a + 1.0 - b, 1.0 - b, z)


def kummer_second_pp(a: float, b: float, z: float) -> float:
    """d2S/dz2 = -b (1-b) |z|^(-b-1) M(a+1-b, -b, z), either sign of z."""
    if z == 0.0:
        raise BranchDomain("S''(a,b,0) is singular")
    return -b * (1.0 - b) * abs(z) ** (-b - 1.0) * kummer_M(a + 1.0 - b, -b, z)
