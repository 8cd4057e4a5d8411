"""Value-function implementations shared by the dividend and injection solvers.

Every implementation exposes value(x), prime(x) and second(x); above the
barrier all of them continue linearly with slope alpha, which the closed
forms produce automatically from their extended definitions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import RegimeMismatch
from .kummer import (
    kummer_M,
    kummer_M_prime,
    kummer_second,
    kummer_second_pp,
    kummer_second_prime,
)
from .model import CostParams, Exponential, ModelParams
from .scale import ScaleSet, eval_W, eval_Z, eval_Zbar


class LinearValue:
    """Immediate-payout value alpha*x + offset (zero-barrier strategies)."""

    def __init__(self, alpha: float, offset: float = 0.0):
        self.alpha = alpha
        self.offset = offset

    def value(self, x):
        return self.alpha * x + self.offset

    def prime(self, x):
        return self.alpha

    def second(self, x):
        return 0.0


class ScaleValue:
    """alpha * (gain_rate/delta - Zbar(barrier - x)).

    The extension Zbar(u) = u for u <= 0 makes the same expression valid
    above the barrier, where it reduces to the linear continuation.
    """

    def __init__(self, scale_set: ScaleSet, alpha: float, barrier: float,
                 level: float):
        self.scale_set = scale_set
        self.alpha = alpha
        self.barrier = barrier
        self.level = level  # value at the barrier

    def value(self, x):
        return self.alpha * (self.level / self.alpha - eval_Zbar(self.scale_set, self.barrier - x))

    def prime(self, x):
        return self.alpha * eval_Z(self.scale_set, self.barrier - x)

    def second(self, x):
        return -self.alpha * self.scale_set.delta * eval_W(self.scale_set, self.barrier - x)


@dataclass(frozen=True)
class KummerBasis:
    """Normalized solution basis of the drifted-return equation.

    In z = mu*(x - p/r) the equation is confluent hypergeometric with
    parameters a = -delta/r, b = 1 - (lam+delta)/r. The basis pairs M with
    the real second solution S (valid for the negative arguments that occur
    left of the drift root p/r), both normalized to 1 at x = 0.
    """

    a: float
    b: float
    mu: float
    x_sing: float
    m0: float
    s0: float

    @staticmethod
    def build(model: ModelParams, delta: float) -> "KummerBasis":
        if model.sigma_p != 0.0 or model.sigma_r != 0.0 or model.r <= 0.0:
            raise RegimeMismatch(
                "Kummer basis needs sigma_p = sigma_r = 0 and r > 0")
        if not isinstance(model.jump, Exponential):
            raise RegimeMismatch("Kummer basis needs exponential jumps")
        mu = model.jump.mu
        a = -delta / model.r
        b = 1.0 - (model.lam + delta) / model.r
        if b <= 0.5 and abs(b - round(b)) < 1e-12:
            from .errors import ParameterPole
            raise ParameterPole(
                f"(lam+delta)/r = {(model.lam + delta) / model.r:g} makes the "
                f"hypergeometric parameter b = {b:g} a non-positive integer; "
                "perturb delta by ~1e-9 and re-solve")
        xs = model.p / model.r
        z0 = mu * (0.0 - xs)
        return KummerBasis(a=a, b=b, mu=mu, x_sing=xs,
                           m0=kummer_M(a, b, z0),
                           s0=kummer_second(a, b, z0))

    def z(self, x: float) -> float:
        return self.mu * (x - self.x_sing)

    def f1(self, x: float) -> float:
        return kummer_M(self.a, self.b, self.z(x)) / self.m0

    def f2(self, x: float) -> float:
        return kummer_second(self.a, self.b, self.z(x)) / self.s0

    def d1(self, x: float) -> float:
        return self.mu * kummer_M_prime(self.a, self.b, self.z(x)) / self.m0

    def d2(self, x: float) -> float:
        return self.mu * kummer_second_prime(self.a, self.b, self.z(x)) / self.s0

    def dd1(self, x: float) -> float:
        zz = self.z(x)
        val = (self.a / self.b) * ((self.a + 1.0) / (self.b + 1.0)) \
            * kummer_M(self.a + 2.0, self.b + 2.0, zz)
        return self.mu ** 2 * val / self.m0

    def dd2(self, x: float) -> float:
        return self.mu ** 2 * kummer_second_pp(self.a, self.b, self.z(x)) / self.s0


class KummerValue:
    """c1*f1 + c2*f2 on [0, barrier], linear with slope alpha above."""

    def __init__(self, basis: KummerBasis, c1: float, c2: float,
                 barrier: float, alpha: float):
        self.basis = basis
        self.c1 = c1
        self.c2 = c2
        self.barrier = barrier
        self.alpha = alpha
        self._vb = c1 * basis.f1(barrier) + c2 * basis.f2(barrier)

    def value(self, x):
        if x <= self.barrier:
            return self.c1 * self.basis.f1(x) + self.c2 * self.basis.f2(x)
        return self._vb + self.alpha * (x - self.barrier)

    def prime(self, x):
        if x <= self.barrier:
            return self.c1 * self.basis.d1(x) + self.c2 * self.basis.d2(x)
        return self.alpha

    def second(self, x):
        if x <= self.barrier:
            return self.c1 * self.basis.dd1(x) + self.c2 * self.basis.dd2(x)
        return 0.0


class EmpiricalValue:
    """Monte Carlo value function: estimates on demand, cached per point.

    prime() is a forward difference of two common-random-number estimates
    and inherits their statistical noise; it exists for the selection
    criteria, not for residual checks.
    """

    def __init__(self, model, costs: CostParams, strategy, config):
        from .simulate import estimate_value  # local import to avoid a cycle
        self._estimate = estimate_value
        self.model = model
        self.costs = costs
        self.strategy = strategy
        self.config = config
        self._cache: dict[float, float] = {}

    def value(self, x):
        x = float(x)
        if x not in self._cache:
            est = self._estimate(self.model, self.costs, self.strategy, x,
                                 self.config)
            self._cache[x] = est.mean
        return self._cache[x]

    def prime(self, x, h: float = 0.25):
        return (self.value(x + h) - self.value(x)) / h

    def second(self, x):
        raise RegimeMismatch("second derivative unavailable for Monte Carlo solutions")
