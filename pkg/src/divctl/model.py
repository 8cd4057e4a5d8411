"""Model parameters, gain (jump) distributions, and generator coefficients.

The surplus grows by positive jumps and shrinks at the expense rate, with an
optional diffusion term and an optional stochastic return on the invested
surplus. All types here are immutable after construction; samplers take an
explicit random generator and keep no hidden state.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

__all__ = [
    "JumpLaw",
    "Exponential",
    "HyperExponential",
    "Erlang",
    "ModelParams",
    "CostParams",
    "Diagnostic",
    "validate",
    "generator_coefficients",
]

# kind codes shared with the simulation kernels
JUMP_EXPONENTIAL = 0
JUMP_HYPEREXP = 1
JUMP_ERLANG = 2


class JumpLaw:
    """Common interface of the gain distributions.

    The built-in variants all have strictly positive support, a finite mean,
    and a rational Laplace transform, which is what makes the closed-form
    solvers exact. Custom subclasses are allowed as an extension hook: a law
    without lt_num_den() is routed to the Monte Carlo solver only, and must
    provide kernel_spec() for the path engine.
    """

    def has_rational_transform(self) -> bool:
        try:
            self.lt_num_den()
            return True
        except NotImplementedError:
            return False

    def mean(self) -> float:
        raise NotImplementedError

    def laplace_transform(self, theta: float) -> float:
        raise NotImplementedError

    def density(self, x):
        raise NotImplementedError

    def survival(self, x):
        """P(X > x)."""
        raise NotImplementedError

    def partial_mean_above(self, w: float) -> float:
        """E[X; X > w] = integral of x f(x) over (w, infinity)."""
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        raise NotImplementedError

    def lt_num_den(self) -> tuple[np.ndarray, np.ndarray]:
        """Laplace transform as a ratio of polynomials in theta.

        Returns (num, den) coefficient arrays in ascending order with
        laplace_transform(theta) = num(theta) / den(theta).
        """
        raise NotImplementedError

    def kernel_spec(self) -> tuple[int, np.ndarray]:
        """(kind code, flat parameter vector) consumed by the path kernels."""
        raise NotImplementedError


@dataclass(frozen=True)
class Exponential(JumpLaw):
    """Exponential gains with rate mu (mean 1/mu)."""

    mu: float

    def __post_init__(self):
        if self.mu <= 0.0:
            raise ValueError(f"exponential rate must be positive: {self.mu}")

    def mean(self):
        return 1.0 / self.mu

    def laplace_transform(self, theta):
        return self.mu / (self.mu + theta)

    def density(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x < 0.0, 0.0, self.mu * np.exp(-self.mu * x))

    def survival(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x < 0.0, 1.0, np.exp(-self.mu * x))

    def partial_mean_above(self, w):
        w = max(float(w), 0.0)
        return (w + 1.0 / self.mu) * math.exp(-self.mu * w)

    def sample(self, rng, size):
        return rng.exponential(1.0 / self.mu, size)

    def lt_num_den(self):
        return np.array([self.mu]), np.array([self.mu, 1.0])

    def kernel_spec(self):
        return JUMP_EXPONENTIAL, np.array([self.mu])


@dataclass(frozen=True)
class HyperExponential(JumpLaw):
    """Mixture of exponentials: weights w_i, rates mu_i."""

    weights: tuple[float, ...]
    rates: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        object.__setattr__(self, "rates", tuple(float(r) for r in self.rates))
        if len(self.weights) != len(self.rates) or not self.weights:
            raise ValueError("weights and rates must be equal-length and non-empty")
        if abs(sum(self.weights) - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1: sum={sum(self.weights)!r}")
        if any(w < 0.0 for w in self.weights):
            raise ValueError("weights must be nonnegative")
        if any(r <= 0.0 for r in self.rates):
            raise ValueError("rates must be positive")

    def mean(self):
        return sum(w / r for w, r in zip(self.weights, self.rates))

    def laplace_transform(self, theta):
        return sum(w * r / (r + theta) for w, r in zip(self.weights, self.rates))

    def density(self, x):
        x = np.asarray(x, dtype=float)
        d = sum(w * r * np.exp(-r * np.maximum(x, 0.0))
                for w, r in zip(self.weights, self.rates))
        return np.where(x < 0.0, 0.0, d)

    def survival(self, x):
        x = np.asarray(x, dtype=float)
        s = sum(w * np.exp(-r * np.maximum(x, 0.0))
                for w, r in zip(self.weights, self.rates))
        return np.where(x < 0.0, 1.0, s)

    def partial_mean_above(self, w):
        w = max(float(w), 0.0)
        return sum(wt * (w + 1.0 / r) * math.exp(-r * w)
                   for wt, r in zip(self.weights, self.rates))

    def sample(self, rng, size):
        comp = rng.choice(len(self.rates), size=size, p=self.weights)
        scales = 1.0 / np.asarray(self.rates)
        return rng.exponential(scales[comp])

    def lt_num_den(self):
        from numpy.polynomial import polynomial as P
        den = np.array([1.0])
        for r in self.rates:
            den = P.polymul(den, np.array([r, 1.0]))
        num = np.array([0.0])
        for i, (w, r) in enumerate(zip(self.weights, self.rates)):
            term = np.array([w * r])
            for j, rj in enumerate(self.rates):
                if j != i:
                    term = P.polymul(term, np.array([rj, 1.0]))
            num = P.polyadd(num, term)
        return num, den

    def kernel_spec(self):
        k = len(self.rates)
        cumw = np.cumsum(self.weights)
        cumw[-1] = 1.0
        return JUMP_HYPEREXP, np.concatenate(([float(k)], cumw, np.asarray(self.rates)))


@dataclass(frozen=True)
class Erlang(JumpLaw):
    """Erlang gains: sum of `shape` independent exponentials of rate `rate`."""

    shape: int
    rate: float

    def __post_init__(self):
        if int(self.shape) != self.shape or self.shape < 1:
            raise ValueError(f"shape must be a positive integer: {self.shape}")
        object.__setattr__(self, "shape", int(self.shape))
        if self.rate <= 0.0:
            raise ValueError(f"rate must be positive: {self.rate}")

    def mean(self):
        return self.shape / self.rate

    def laplace_transform(self, theta):
        return (self.rate / (self.rate + theta)) ** self.shape

    def density(self, x):
        x = np.asarray(x, dtype=float)
        k, mu = self.shape, self.rate
        xp = np.maximum(x, 0.0)
        d = mu ** k * xp ** (k - 1) * np.exp(-mu * xp) / math.factorial(k - 1)
        return np.where(x < 0.0, 0.0, d)

    def survival(self, x):
        x = np.asarray(x, dtype=float)
        k, mu = self.shape, self.rate
        xp = np.maximum(x, 0.0)
        s = sum((mu * xp) ** j / math.factorial(j) for j in range(k)) * np.exp(-mu * xp)
        return np.where(x < 0.0, 1.0, s)

    def partial_mean_above(self, w):
        # integral of x f(x) above w equals (k/mu) * P(Erlang(k+1, mu) > w)
        w = max(float(w), 0.0)
        k, mu = self.shape, self.rate
        tail = sum((mu * w) ** j / math.factorial(j) for j in range(k + 1)) * math.exp(-mu * w)
        return (k / mu) * tail

    def sample(self, rng, size):
        return rng.gamma(self.shape, 1.0 / self.rate, size)

    def lt_num_den(self):
        from numpy.polynomial import polynomial as P
        den = np.array([1.0])
        for _ in range(self.shape):
            den = P.polymul(den, np.array([self.rate, 1.0]))
        return np.array([self.rate ** self.shape]), den

    def kernel_spec(self):
        return JUMP_ERLANG, np.array([float(self.shape), self.rate])


@dataclass(frozen=True)
class ModelParams:
    """Structural coefficients of the surplus and return processes.

    p        expense rate (currency per unit time)
    sigma_p  surplus volatility
    lam      jump intensity of the gain process
    jump     gain distribution
    r        return drift on invested surplus
    sigma_r  return volatility
    rho      correlation between the surplus and return Brownian drivers
    """

    p: float
    sigma_p: float
    lam: float
    jump: JumpLaw
    r: float = 0.0
    sigma_r: float = 0.0
    rho: float = 0.0

    def net_gain_rate(self) -> float:
        """Mean surplus growth per unit time ignoring returns: lam*E[X] - p."""
        return self.lam * self.jump.mean() - self.p

    def is_levy_regime(self) -> bool:
        """True when invested returns are absent (r = sigma_r = 0)."""
        return self.r == 0.0 and self.sigma_r == 0.0


@dataclass(frozen=True)
class CostParams:
    """Discount rate and proportional transaction costs.

    alpha is the fraction of each dividend the shareholders keep;
    beta >= 1 is the cost of supplying one unit of injected capital.
    """

    delta: float
    alpha: float = 1.0
    beta: float = 1.0


@dataclass(frozen=True)
class Diagnostic:
    level: Literal["ERROR", "WARNING"]
    field: str
    message: str


def validate(model: ModelParams, costs: CostParams) -> list[Diagnostic]:
    """Check parameter ranges; returns diagnostics instead of raising.

    Hard range breaches come back as ERROR entries. A failing net-profit
    condition (lam*E[X] <= p) is only a WARNING: the dividend solver handles
    it with a degenerate zero barrier.
    """
    out: list[Diagnostic] = []

    def err(fieldname, msg):
        out.append(Diagnostic("ERROR", fieldname, msg))

    if not model.p > 0.0:
        err("model.p", f"expense rate must be positive, got {model.p}")
    if model.sigma_p < 0.0:
        err("model.sigma_p", f"surplus volatility must be >= 0, got {model.sigma_p}")
    if not model.lam > 0.0:
        err("model.lambda", f"jump intensity must be positive, got {model.lam}")
    if model.r < 0.0:
        err("model.r", f"return drift must be >= 0, got {model.r}")
    if model.sigma_r < 0.0:
        err("model.sigma_r", f"return volatility must be >= 0, got {model.sigma_r}")
    if not -1.0 <= model.rho <= 1.0:
        err("model.rho", f"correlation must lie in [-1, 1], got {model.rho}")
    if not costs.delta > 0.0:
        err("costs.delta", f"discount rate must be positive, got {costs.delta}")
    if not 0.0 < costs.alpha <= 1.0:
        err("costs.alpha", f"alpha must lie in (0, 1], got {costs.alpha}")
    if not costs.beta >= 1.0:
        err("costs.beta", f"beta must be >= 1, got {costs.beta}")
    if costs.beta < costs.alpha:
        err("costs.beta", f"beta={costs.beta} below alpha={costs.alpha}")

    try:
        mean = model.jump.mean()
        if not math.isfinite(mean) or mean <= 0.0:
            err("model.jump", f"jump mean must be finite and positive, got {mean}")
        elif model.lam > 0.0 and model.p > 0.0 and model.lam * mean <= model.p:
            out.append(Diagnostic(
                "WARNING", "model",
                f"net-profit condition fails: lambda*E[X]={model.lam * mean:g} <= p={model.p:g}; "
                "the optimal dividend barrier degenerates to 0"))
    except Exception as exc:
        err("model.jump", f"jump law unusable: {exc}")
    return out


def generator_coefficients(model: ModelParams, y: float) -> tuple[float, float]:
    """Drift and diffusion coefficients of the uncontrolled surplus at level y.

    drift = r*y - p; diffusion is the half squared volatility combining the
    surplus noise with the (correlated) return noise scaled by the level.
    The jump part needs a test function and lives in the solver residuals.
    """
    drift = model.r * y - model.p
    diffusion = 0.5 * ((model.sigma_p + model.rho * model.sigma_r * y) ** 2
                       + model.sigma_r ** 2 * (1.0 - model.rho ** 2) * y ** 2)
    return drift, diffusion
