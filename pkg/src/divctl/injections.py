"""Optimal dividends with forced capital injections (reflection at zero).

The company never ruins: whenever the surplus would dip below zero it is
refilled at proportional cost beta; above the upper barrier B* everything
is paid out. Regimes mirror the dividend-only solver:

  ScaleForm   r = sigma_r = 0: B* solves Z(B*) = beta/alpha and
              H(x) = alpha*((lam*E[X]-p)/delta - Zbar(B*-x)).
  KummerForm  sigma_p = sigma_r = 0, r > 0, exponential gains: coefficients
              from {H'(0) = beta, equation holds}, barrier from the
              smooth-fit root H_B'(B-) = alpha.
  MonteCarlo  anything else.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._residual import ResidualReport, build_report
from ._valuefns import EmpiricalValue, KummerBasis, KummerValue, LinearValue, ScaleValue
from .dividends import _raise_on_errors
from .errors import NoBracket
from .model import CostParams, Exponential, ModelParams
from .numerics import Tolerance, find_root
from .scale import build_scale_set, eval_Z, invert_Z
from .simulate import SimConfig, Strategy, search_barrier

__all__ = ["InjectionSolution", "solve_injections", "hjb_residual_injections", "value_at"]

REGIME_SCALE = "ScaleForm"
REGIME_KUMMER = "KummerForm"
REGIME_MC = "MonteCarlo"

_ROOT_TOL = Tolerance(abs_tol=1e-12, rel_tol=1e-12, max_iter=300)


@dataclass
class InjectionSolution:
    """A solved injection problem; value may be negative near zero when the
    running injection cost outweighs future dividends (the unconstrained
    selector consumes that sign)."""

    regime: str
    B_star: float
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


def solve_injections(model: ModelParams, costs: CostParams,
                     sim: SimConfig | None = None,
                     mc_bounds: tuple[float, float] | None = None) -> InjectionSolution:
    """Dispatch on regime and construct the two-barrier (0, B*) solution."""
    _raise_on_errors(model, costs)
    alpha, beta, delta = costs.alpha, costs.beta, costs.delta
    m = model.net_gain_rate()

    if model.is_levy_regime() and model.jump.has_rational_transform():
        s = build_scale_set(model, delta)
        b = 0.0 if beta == alpha else invert_Z(s, beta / alpha, _ROOT_TOL)
        impl = ScaleValue(s, alpha, b, level=alpha * m / delta)
        return InjectionSolution(
            regime=REGIME_SCALE, B_star=b, model=model, costs=costs, impl=impl,
            diagnostics={"net_gain_rate": m, "phi": s.phi,
                         "barrier_equation_residual": eval_Z(s, b) - beta / alpha,
                         "slope_at_zero": impl.prime(0.0)})

    if model.sigma_p == 0.0 and model.sigma_r == 0.0 and model.r > 0.0 \
            and isinstance(model.jump, Exponential):
        return _solve_kummer(model, costs, m)

    cfg = sim or SimConfig(dt=1e-3, n_paths=20_000, seed=2024)
    mean = model.jump.mean()
    hi = min(max(3.0 * max(m, 0.1) / delta, 2.0 * mean), 60.0 * mean)
    bounds = mc_bounds or (0.0, hi)
    res = search_barrier(model, costs, inject=True, x0=min(mean, bounds[1]),
                         bounds=bounds, config=cfg)
    strat = Strategy(barrier=res.barrier, inject=True)
    impl = EmpiricalValue(model, costs, strat, cfg)
    return InjectionSolution(
        regime=REGIME_MC, B_star=res.barrier, model=model, costs=costs,
        impl=impl,
        diagnostics={"net_gain_rate": m, "profile": res.profile,
                     "search_value": res.value})


def _coefficients(basis: KummerBasis, model: ModelParams, costs: CostParams,
                  b: float) -> tuple[np.ndarray, float]:
    """Solve {H'(0) = beta, equation constant at the barrier}; also return
    the condition number of the boundary-derivative system at this barrier."""
    delta = costs.delta
    drift_b = model.r * b - model.p
    a = np.array([
        [basis.d1(0.0), basis.d2(0.0)],
        [delta * basis.f1(b) - drift_b * basis.d1(b),
         delta * basis.f2(b) - drift_b * basis.d2(b)],
    ])
    rhs = np.array([costs.beta, model.lam * costs.alpha / basis.mu])
    return np.linalg.solve(a, rhs), float(np.linalg.cond(a))


def _solve_kummer(model: ModelParams, costs: CostParams, m: float) -> InjectionSolution:
    alpha, beta, delta = costs.alpha, costs.beta, costs.delta
    basis = KummerBasis.build(model, delta)

    def fit(b):
        c, _ = _coefficients(basis, model, costs, b)
        return c[0] * basis.d1(b) + c[1] * basis.d2(b) - alpha

    if beta == alpha:
        # everything above zero is paid at once; the account held at zero
        # earns no return, so the value is a pure flow balance
        impl = LinearValue(alpha, offset=alpha * m / delta)
        return InjectionSolution(
            regime=REGIME_KUMMER, B_star=0.0, model=model, costs=costs,
            impl=impl,
            diagnostics={"net_gain_rate": m, "fit_roots": [0.0],
                         "multiple_fit_roots": False,
                         "slope_at_zero": alpha,
                         "barrier_above_drift_root": False})
    else:
        # expand geometrically from zero until the smooth-fit gap crosses
        hi = 0.25
        scan_cap = 0.98 * basis.x_sing
        while fit(hi) > 0.0 and hi < scan_cap:
            hi = min(2.0 * hi, scan_cap)
        if fit(hi) > 0.0:
            raise NoBracket(
                f"H'(B-)-alpha stays positive up to {hi:g}; "
                f"drift root p/r = {basis.x_sing:g} caps the scan")
        grid = np.linspace(1e-6, hi, 201)
        vals = np.array([fit(b) for b in grid])
        roots = []
        for i in range(len(grid) - 1):
            if vals[i] == 0.0:
                roots.append(grid[i])
            elif vals[i] * vals[i + 1] < 0.0:
                roots.append(find_root(fit, grid[i], grid[i + 1], _ROOT_TOL))
        if not roots:
            raise NoBracket(f"no sign change of H'(B-)-alpha on (0, {hi:g})")
        b = max(roots)

    c, cond = _coefficients(basis, model, costs, b)
    impl = KummerValue(basis, c[0], c[1], b, alpha)

    # boundary-derivative system at the solved barrier (both slopes pinned)
    dsys = np.array([[basis.d1(0.0), basis.d2(0.0)],
                     [basis.d1(b), basis.d2(b)]])
    csys = np.linalg.solve(dsys, np.array([beta, alpha]))
    diagnostics = {
        "net_gain_rate": m,
        "fit_roots": roots,
        "multiple_fit_roots": len(roots) > 1,
        "system_condition_number": cond,
        "boundary_system_condition_number": float(np.linalg.cond(dsys)),
        "boundary_system_slope0_residual": float(csys @ dsys[0] - beta),
        "boundary_system_slopeB_residual": float(csys @ dsys[1] - alpha),
        "boundary_system_coefficient_gap": float(np.max(np.abs(csys - c))
                                                 / max(1.0, float(np.max(np.abs(c))))),
        "slope_at_zero": impl.prime(0.0),
        "barrier_above_drift_root": b >= basis.x_sing,
        "value_match_residual": impl.value(b) - alpha * (model.r * b + m) / delta,
        "coefficients": (float(c[0]), float(c[1])),
    }
    return InjectionSolution(regime=REGIME_KUMMER, B_star=b, model=model,
                             costs=costs, impl=impl, diagnostics=diagnostics)


def hjb_residual_injections(sol: InjectionSolution, model: ModelParams,
                            costs: CostParams, grid,
                            tol_equality: float = 1e-6,
                            tol_inequality: float = 1e-8) -> ResidualReport:
    """Check max{(L-delta)H, alpha - H', H' - beta} = 0 on the grid, plus the
    reflection boundary H'(0) = beta and smooth fit at B*."""
    if sol.regime == REGIME_MC:
        raise ValueError("HJB residuals need a closed-form solution regime")
    boundary = {"slope_at_zero_minus_beta": sol.value_prime(0.0) - costs.beta}
    check2 = sol.regime == REGIME_SCALE and model.sigma_p > 0.0
    return build_report(sol.impl, model, costs, grid, sol.B_star,
                        with_injection_branch=True, boundary=boundary,
                        tol_equality=tol_equality,
                        tol_inequality=tol_inequality,
                        check_second_fit=check2)


def value_at(sol: InjectionSolution, x: float) -> float:
    """H(x); linear continuation above B*."""
    if x < 0.0:
        raise ValueError(f"surplus must be >= 0: {x}")
    return sol.value(x)
