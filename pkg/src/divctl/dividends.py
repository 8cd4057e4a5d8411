"""Optimal dividends without capital injections.

The optimal strategy is a barrier: pay out every unit of surplus above b*.
Solution routes by regime:

  Degenerate  net gain rate lam*E[X] - p <= 0: pay everything at once, b* = 0.
  ScaleForm   no invested returns (r = sigma_r = 0): b* solves
              Zbar(b*) = (lam*E[X] - p)/delta and the value is
              alpha*((lam*E[X]-p)/delta - Zbar(b*-x)).
  KummerForm  deterministic return drift (sigma_p = sigma_r = 0, r > 0,
              exponential gains): value spanned by the confluent
              hypergeometric basis; coefficients from {V(0)=0, equation
              holds up to the barrier}, barrier from the smooth-fit root
              V_b'(b-) = alpha (largest root on the scanned bracket).
  MonteCarlo  everything else: empirical barrier search.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize as _sp_optimize

from ._residual import ResidualReport, build_report
from ._valuefns import EmpiricalValue, KummerBasis, KummerValue, LinearValue, ScaleValue
from .errors import NoBracket
from .model import CostParams, Exponential, ModelParams, validate
from .numerics import Tolerance, find_root
from .scale import build_scale_set, eval_Zbar, invert_Zbar
from .simulate import SimConfig, Strategy, search_barrier

__all__ = ["DividendSolution", "solve_dividends", "hjb_residual_dividends", "value_at"]

REGIME_DEGENERATE = "Degenerate"
REGIME_SCALE = "ScaleForm"
REGIME_KUMMER = "KummerForm"
REGIME_MC = "MonteCarlo"

_ROOT_TOL = Tolerance(abs_tol=1e-12, rel_tol=1e-12, max_iter=300)


@dataclass
class DividendSolution:
    """A solved dividend problem: regime tag, barrier, value evaluators."""

    regime: str
    b_star: float
    model: ModelParams
    costs: CostParams
    impl: object
    diagnostics: dict = field(default_factory=dict)

    def value(self, x):
        return self.impl.value(x)

    def value_prime(self, x):
        return self.impl.prime(x)

    def value_second(self, x):
        return self.impl.second(x)


def _raise_on_errors(model, costs):
    diags = validate(model, costs)
    errors = [d for d in diags if d.level == "ERROR"]
    if errors:
        raise ValueError("invalid parameters: " +
                         "; ".join(f"{d.field}: {d.message}" for d in errors))
    return diags


def solve_dividends(model: ModelParams, costs: CostParams,
                    sim: SimConfig | None = None,
                    mc_bounds: tuple[float, float] | None = None) -> DividendSolution:
    """Dispatch on regime and construct the optimal barrier solution.

    `sim` and `mc_bounds` only matter for the Monte Carlo route.
    """
    _raise_on_errors(model, costs)
    alpha, delta = costs.alpha, costs.delta
    m = model.net_gain_rate()

    if m <= 1e-9:
        # paying out immediately is optimal; ruin occurs at once
        return DividendSolution(
            regime=REGIME_DEGENERATE, b_star=0.0, model=model, costs=costs,
            impl=LinearValue(alpha),
            diagnostics={"net_gain_rate": m})

    if model.is_levy_regime() and model.jump.has_rational_transform():
        s = build_scale_set(model, delta)
        target = m / delta
        b = invert_Zbar(s, target, _ROOT_TOL)
        impl = ScaleValue(s, alpha, b, level=alpha * target)
        return DividendSolution(
            regime=REGIME_SCALE, b_star=b, model=model, costs=costs, impl=impl,
            diagnostics={"net_gain_rate": m, "phi": s.phi,
                         "barrier_equation_residual": eval_Zbar(s, b) - target})

    if model.sigma_p == 0.0 and model.sigma_r == 0.0 and model.r > 0.0 \
            and isinstance(model.jump, Exponential):
        return _solve_kummer(model, costs, m)

    cfg = sim or SimConfig(dt=1e-3, n_paths=20_000, seed=2024)
    mean = model.jump.mean()
    hi = min(max(3.0 * m / delta, 2.0 * mean), 60.0 * mean)
    bounds = mc_bounds or (0.0, hi)
    res = search_barrier(model, costs, inject=False, x0=min(mean, bounds[1]),
                         bounds=bounds, config=cfg)
    strat = Strategy(barrier=res.barrier, inject=False)
    impl = EmpiricalValue(model, costs, strat, cfg)
    return DividendSolution(
        regime=REGIME_MC, b_star=res.barrier, model=model, costs=costs,
        impl=impl,
        diagnostics={"net_gain_rate": m, "profile": res.profile,
                     "search_value": res.value})


def _kummer_coefficients(basis: KummerBasis, model: ModelParams, alpha: float,
                         delta: float, b: float) -> np.ndarray:
    """Coefficients of {V(0)=0, equation constant at the barrier}.

    The second row pins the integration constant the hypergeometric
    reduction loses: delta*V(b) = (r*b - p)*V'(b-) + lam*alpha*E[X].
    """
    mu = basis.mu
    drift_b = model.r * b - model.p
    a = np.array([
        [1.0, 1.0],
        [delta * basis.f1(b) - drift_b * basis.d1(b),
         delta * basis.f2(b) - drift_b * basis.d2(b)],
    ])
    rhs = np.array([0.0, model.lam * alpha / mu])
    return np.linalg.solve(a, rhs)


def _solve_kummer(model: ModelParams, costs: CostParams, m: float) -> DividendSolution:
    alpha, delta = costs.alpha, costs.delta
    basis = KummerBasis.build(model, delta)

    def fit(b):
        c = _kummer_coefficients(basis, model, alpha, delta, b)
        return c[0] * basis.d1(b) + c[1] * basis.d2(b) - alpha

    scan_hi = min(1.5 * m / delta + 2.0 / basis.mu, 0.98 * basis.x_sing)
    grid = np.linspace(1e-3, scan_hi, 241)
    vals = np.array([fit(b) for b in grid])
    roots = []
    for i in range(len(grid) - 1):
        if vals[i] == 0.0:
            roots.append(grid[i])
        elif vals[i] * vals[i + 1] < 0.0:
            roots.append(find_root(fit, grid[i], grid[i + 1], _ROOT_TOL))
    if not roots:
        raise NoBracket(
            f"no smooth-fit barrier found on (0, {scan_hi:g}); "
            f"drift root p/r = {basis.x_sing:g} caps the scan")
    b = max(roots)
    c = _kummer_coefficients(basis, model, alpha, delta, b)
    impl = KummerValue(basis, c[0], c[1], b, alpha)

    # the two-boundary-condition family's best barrier maximizes 1/(V-normalizing
    # denominator); report it next to the smooth-fit root rather than using it
    gp = lambda t: basis.d1(t) - basis.d2(t)
    fam = _sp_optimize.minimize_scalar(gp, bounds=(1e-3, scan_hi),
                                       method="bounded",
                                       options={"xatol": 1e-10})
    diagnostics = {
        "net_gain_rate": m,
        "fit_roots": roots,
        "multiple_fit_roots": len(roots) > 1,
        "family_argmax_barrier": float(fam.x),
        "family_argmax_gap": float(b - fam.x),
        "barrier_above_drift_root": b >= basis.x_sing,
        "value_match_residual": impl.value(b) - alpha * (model.r * b + m) / delta,
        "coefficients": (float(c[0]), float(c[1])),
    }
    return DividendSolution(regime=REGIME_KUMMER, b_star=b, model=model,
                            costs=costs, impl=impl, diagnostics=diagnostics)


def hjb_residual_dividends(sol: DividendSolution, model: ModelParams,
                           costs: CostParams, grid,
                           tol_equality: float = 1e-6,
                           tol_inequality: float = 1e-8) -> ResidualReport:
    """Check max{(L-delta)V, alpha - V'} = 0 pointwise on the grid.

    Inside (0, b*) the generator branch must vanish within tol_equality; the
    inequality branches may not exceed tol_inequality anywhere; boundary
    behavior (V(0)=0, smooth fit at b*) is reported alongside.
    """
    if sol.regime == REGIME_MC:
        raise ValueError("HJB residuals need a closed-form solution regime")
    boundary = {"value_at_zero": sol.value(0.0)}
    check2 = sol.regime == REGIME_SCALE and model.sigma_p > 0.0
    return build_report(sol.impl, model, costs, grid, sol.b_star,
                        with_injection_branch=False, boundary=boundary,
                        tol_equality=tol_equality,
                        tol_inequality=tol_inequality,
                        check_second_fit=check2)


def value_at(sol: DividendSolution, x: float) -> float:
    """V(x); linear continuation above the barrier."""
    if x < 0.0:
        raise ValueError(f"surplus must be >= 0: {x}")
    return sol.value(x)
