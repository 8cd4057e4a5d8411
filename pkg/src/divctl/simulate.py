"""Monte Carlo engine: controlled-path simulation, discounted-payoff
estimation, and empirical barrier search for regimes without closed forms.

Paths are embarrassingly parallel; every path owns a deterministic RNG
stream derived from (seed XOR stream index), so results are independent of
thread count and identical across runs. Aggregation uses exact summation
(math.fsum), which is order-independent outright.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import FlatProfile
from .model import CostParams, ModelParams

__all__ = [
    "SimConfig",
    "Strategy",
    "PathOutcome",
    "EstimateResult",
    "BarrierSearchResult",
    "default_horizon",
    "simulate_path",
    "run_paths",
    "estimate_value",
    "search_barrier",
    "NUMBA_ENABLED",
]

NUMBA_ENABLED = _kernels.NUMBA_ENABLED


@dataclass(frozen=True)
class SimConfig:
    """Time step, horizon, path count, seed, and antithetic switch.

    horizon=None defers to default_horizon(model, delta). The truncation
    error bound implied by the horizon is reported with every estimate.
    """

    dt: float = 1e-3
    horizon: float | None = None
    n_paths: int = 10_000
    seed: int = 0
    antithetic: bool = False

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ValueError(f"dt must be positive: {self.dt}")
        if self.horizon is not None and self.horizon < self.dt:
            raise ValueError(f"horizon {self.horizon} below dt {self.dt}")
        if self.n_paths < 1:
            raise ValueError(f"n_paths must be positive: {self.n_paths}")


@dataclass(frozen=True)
class Strategy:
    """Barrier strategy: pay out everything above `barrier`; optionally
    refill to zero (inject=True) instead of ruining."""

    barrier: float
    inject: bool = False


@dataclass(frozen=True)
class PathOutcome:
    discounted_dividends: float
    discounted_injections: float
    ruin_time: float  # math.inf when the path survived to the horizon
    payoff: float     # alpha*dividends - beta*injections by construction


@dataclass(frozen=True)
class EstimateResult:
    mean: float
    std_err: float
    n: int
    truncation_bound: float


@dataclass(frozen=True)
class BarrierSearchResult:
    barrier: float
    value: float
    profile: list = field(default_factory=list)  # (barrier, mean, std_err) rows


def default_horizon(model: ModelParams, delta: float) -> float:
    """max(200/delta, 50 * mean inter-jump time)."""
    return max(200.0 / delta, 50.0 / model.lam)


def _resolve_horizon(model, delta, config):
    return config.horizon if config.horizon is not None else default_horizon(model, delta)


def run_paths(model: ModelParams, delta: float, strategy: Strategy, x0: float,
              config: SimConfig) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Raw per-path results: (discounted dividends, discounted injections,
    ruin times) with ruin time -1.0 marking survival to the horizon.

    Cost factors alpha/beta do not enter the dynamics, so these streams can
    be re-weighted into payoffs for any CostParams.
    """
    if x0 < 0.0:
        raise ValueError(f"x0 must be >= 0: {x0}")
    if strategy.barrier < 0.0:
        raise ValueError(f"barrier must be >= 0: {strategy.barrier}")
    horizon = _resolve_horizon(model, delta, config)
    n = config.n_paths
    if config.antithetic and n % 2:
        n += 1
    if config.antithetic:
        streams = np.repeat(np.arange((n + 1) // 2, dtype=np.int64), 2)[:n]
    else:
        streams = np.arange(n, dtype=np.int64)
    seeds = _kernels.derive_stream_states(config.seed, streams)
    kind, params = model.jump.kernel_spec()
    out = np.empty((n, 4), dtype=np.float64)
    _kernels._run_batch(seeds, float(x0), float(strategy.barrier),
                        bool(strategy.inject), model.p, model.r, model.sigma_p,
                        model.sigma_r, model.rho, model.lam, kind, params,
                        float(delta), config.dt, float(horizon),
                        bool(config.antithetic), out)
    return out[:, 0], out[:, 1], out[:, 2]


def simulate_path(model: ModelParams, costs: CostParams, strategy: Strategy,
                  x0: float, config: SimConfig, rng_stream: int) -> PathOutcome:
    """Single path on the given RNG stream index."""
    horizon = _resolve_horizon(model, costs.delta, config)
    seeds = _kernels.derive_stream_states(config.seed, [rng_stream])
    kind, params = model.jump.kernel_spec()
    dd, di, rt, _ = _kernels._run_path(
        seeds[0], float(x0), float(strategy.barrier), bool(strategy.inject),
        model.p, model.r, model.sigma_p, model.sigma_r, model.rho, model.lam,
        kind, params, float(costs.delta), config.dt, float(horizon), 1.0)
    return PathOutcome(
        discounted_dividends=dd,
        discounted_injections=di,
        ruin_time=math.inf if rt < 0.0 else rt,
        payoff=costs.alpha * dd - costs.beta * di,
    )


def truncation_bound(model: ModelParams, costs: CostParams, inject: bool,
                     horizon: float) -> float:
    """Bound on the discounted payoff mass beyond the horizon."""
    scale = costs.alpha * model.lam * model.jump.mean()
    if inject:
        scale += costs.beta * model.p
    return math.exp(-costs.delta * horizon) * scale / costs.delta


def _mean_se(values: np.ndarray) -> tuple[float, float]:
    n = values.size
    mean = math.fsum(values) / n
    if n < 2:
        return mean, math.inf
    var = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, math.sqrt(var / n)


def estimate_value(model: ModelParams, costs: CostParams, strategy: Strategy,
                   x0: float, config: SimConfig) -> EstimateResult:
    """Sample mean and standard error of the discounted payoff.

    With antithetic pairing the standard error is computed over the
    independent pair averages.
    """
    div, inj, _ = run_paths(model, costs.delta, strategy, x0, config)
    payoff = costs.alpha * div - costs.beta * inj
    if config.antithetic:
        pairs = 0.5 * (payoff[0::2] + payoff[1::2])
        mean, se = _mean_se(pairs)
    else:
        mean, se = _mean_se(payoff)
    horizon = _resolve_horizon(model, costs.delta, config)
    return EstimateResult(
        mean=mean, std_err=se, n=payoff.size,
        truncation_bound=truncation_bound(model, costs, strategy.inject, horizon))


def _parabola_vertex(bs, ms):
    """Vertex of the parabola through three points; None unless the middle
    point is the local peak (otherwise the fit would propose a minimum or an
    extrapolation)."""
    (x0, x1, x2), (y0, y1, y2) = bs, ms
    if not (y1 >= y0 and y1 >= y2):
        return None
    d0 = (x1 - x0) * (y1 - y2)
    d2 = (x1 - x2) * (y1 - y0)
    denom = 2.0 * (d0 - d2)
    if denom == 0.0:
        return None
    num = (x1 - x0) ** 2 * (y1 - y2) - (x1 - x2) ** 2 * (y1 - y0)
    v = x1 - num / denom
    lo, hi = min(bs), max(bs)
    if not (lo <= v <= hi):
        return None
    return v


def search_barrier(model: ModelParams, costs: CostParams, inject: bool,
                   x0: float, bounds: tuple[float, float],
                   config: SimConfig, coarse: int = 9,
                   refine: int = 5) -> BarrierSearchResult:
    """Empirical barrier optimization with common random numbers.

    A coarse grid locates the best barrier, a local quadratic around it
    proposes a vertex, and one refinement pass on a shrunken grid repeats
    the fit. Raises FlatProfile when the coarse profile's variation stays
    within twice its largest standard error.
    """
    lo, hi = map(float, bounds)
    if not lo < hi:
        raise ValueError(f"bounds must satisfy lo < hi: {bounds}")
    profile = []

    def ev(b):
        est = estimate_value(model, costs, Strategy(barrier=b, inject=inject),
                             x0, config)
        profile.append((b, est.mean, est.std_err))
        return est

    grid = np.linspace(lo, hi, coarse)
    ests = [ev(b) for b in grid]
    means = np.array([e.mean for e in ests])
    worst_se = max(e.std_err for e in ests)
    if means.max() - means.min() < 2.0 * worst_se:
        raise FlatProfile(
            f"profile variation {means.max() - means.min():.4g} below "
            f"2*max(std_err)={2 * worst_se:.4g} on {bounds}")
    i = int(np.argmax(means))
    j = min(max(i, 1), coarse - 2)
    vertex = _parabola_vertex(grid[j - 1:j + 2], means[j - 1:j + 2])
    center = vertex if vertex is not None else grid[i]
    span = (hi - lo) / (coarse - 1)
    flo = max(lo, center - span)
    fhi = min(hi, center + span)
    fine = np.linspace(flo, fhi, refine)
    fests = [ev(b) for b in fine]
    fmeans = np.array([e.mean for e in fests])
    k = int(np.argmax(fmeans))
    kj = min(max(k, 1), refine - 2)
    fvertex = _parabola_vertex(fine[kj - 1:kj + 2], fmeans[kj - 1:kj + 2])
    best_b = fvertex if fvertex is not None else fine[k]
    final = ev(best_b)
    return BarrierSearchResult(barrier=float(best_b), value=final.mean,
                               profile=profile)
