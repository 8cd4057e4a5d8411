"""Shared numerical kernels: bracketing root finder, adaptive quadrature,
monotone inversion.

All routines are pure functions of their inputs and safe for concurrent use.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from scipy import integrate as _sp_integrate

from .errors import MaxIterExceeded, NoBracket, QuadratureFailure, TargetUnreachable

__all__ = [
    "Tolerance",
    "DEFAULT_TOL",
    "find_root",
    "integrate",
    "invert_monotone",
]


@dataclass(frozen=True)
class Tolerance:
    """Accuracy request for iterative routines.

    abs_tol and rel_tol must lie in (0, 1); max_iter is a positive iteration
    budget.
    """

    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_iter: int = 200

    def __post_init__(self):
        if not (0.0 < self.abs_tol < 1.0):
            raise ValueError(f"abs_tol out of (0,1): {self.abs_tol}")
        if not (0.0 < self.rel_tol < 1.0):
            raise ValueError(f"rel_tol out of (0,1): {self.rel_tol}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1: {self.max_iter}")


DEFAULT_TOL = Tolerance()


def find_root(f: Callable[[float], float], lo: float, hi: float,
              tol: Tolerance = DEFAULT_TOL) -> float:
    """Root of a continuous scalar function on a sign-changing bracket.

    Brent's method: bisection with secant / inverse-quadratic acceleration.
    Raises NoBracket if f(lo) and f(hi) have the same (nonzero) sign, and
    MaxIterExceeded if the bracket does not shrink below tolerance within
    tol.max_iter iterations.
    """
    a, b = float(lo), float(hi)
    fa, fb = f(a), f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if fa * fb > 0.0:
        raise NoBracket(f"f({lo})={fa:g} and f({hi})={fb:g} have the same sign")

    c, fc = a, fa
    e = d = b - a
    eps = 2.220446049250313e-16
    for _ in range(tol.max_iter):
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb
        tol1 = 2.0 * eps * abs(b) + 0.5 * tol.abs_tol
        m = 0.5 * (c - b)
        if abs(m) <= tol1 or fb == 0.0:
            return b
        if abs(e) < tol1 or abs(fa) <= abs(fb):
            e = d = m
        else:
            s = fb / fa
            if a == c:
                p_ = 2.0 * m * s
                q = 1.0 - s
            else:
                q = fa / fc
                r_ = fb / fc
                p_ = s * (2.0 * m * q * (q - r_) - (b - a) * (r_ - 1.0))
                q = (q - 1.0) * (r_ - 1.0) * (s - 1.0)
            if p_ > 0.0:
                q = -q
            else:
                p_ = -p_
            s = e
            e = d
            if 2.0 * p_ < 3.0 * m * q - abs(tol1 * q) and p_ < abs(0.5 * s * q):
                d = p_ / q
            else:
                e = d = m
        a, fa = b, fb
        if abs(d) > tol1:
            b += d
        elif m > 0.0:
            b += tol1
        else:
            b -= tol1
        fb = f(b)
        if (fb > 0.0) == (fc > 0.0):
            c, fc = a, fa
            e = d = b - a
    raise MaxIterExceeded(f"root not bracketed to {tol.abs_tol} in {tol.max_iter} iterations")


def integrate(f: Callable[[float], float], a: float, b: float,
              tol: Tolerance = DEFAULT_TOL,
              kinks: Sequence[float] = (),
              tail_rate: float | None = None) -> float:
    """Adaptive quadrature of f on [a, b] with error <= max(abs_tol, rel_tol*|I|).

    Declared kink points inside (a, b) split the integration. An infinite
    upper limit requires tail_rate, the rate of the integrand's exponential
    envelope; the integral is truncated where that envelope falls below
    abs_tol relative to the bulk.
    """
    a = float(a)
    b = float(b)
    if a > b:
        raise ValueError(f"integration bounds reversed: a={a} > b={b}")
    if a == b:
        return 0.0
    if math.isinf(b):
        if tail_rate is None or tail_rate <= 0.0:
            raise ValueError("infinite upper limit needs a positive tail_rate")
        b = a + (math.log(1.0 / tol.abs_tol) + 5.0) / tail_rate
    pts = sorted(x for x in kinks if a < x < b)
    limit = max(50, tol.max_iter)
    try:
        val, err, info = _sp_integrate.quad(
            f, a, b, epsabs=tol.abs_tol, epsrel=tol.rel_tol,
            limit=limit, points=pts or None, full_output=True)[:3]
    except Exception as exc:  # pragma: no cover - scipy-internal failures
        raise QuadratureFailure(str(exc)) from exc
    if err > 10.0 * max(tol.abs_tol, tol.rel_tol * abs(val)) and info["last"] >= limit:
        raise MaxIterExceeded(
            f"quadrature error {err:g} above tolerance after {limit} subdivisions")
    return val


def invert_monotone(g: Callable[[float], float], target: float, lo: float,
                    hi_hint: float, tol: Tolerance = DEFAULT_TOL,
                    ceiling: float = 1e12) -> float:
    """Solve g(x) = target for a strictly increasing g on [lo, infinity).

    The upper bracket grows geometrically from hi_hint; expansion past
    `ceiling` raises TargetUnreachable.
    """
    glo = g(lo)
    if glo > target:
        raise TargetUnreachable(f"g(lo)={glo:g} already above target {target:g}")
    if glo == target:
        return lo
    hi = max(hi_hint, lo + max(tol.abs_tol, 1e-12))
    while g(hi) < target:
        hi = lo + 2.0 * (hi - lo)
        if hi - lo > ceiling:
            raise TargetUnreachable(
                f"target {target:g} not reached by g below x={ceiling:g}")
    return find_root(lambda x: g(x) - target, lo, hi, tol)
