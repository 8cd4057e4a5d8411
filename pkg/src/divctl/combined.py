"""The unconstrained problem: inject capital only if it is worth it.

The candidate rule compares the dividend-only solution with the
forced-injection solution through two criteria evaluated at zero surplus:
keep dividends-only when its marginal value at zero does not exceed the
injection cost (V'(0) <= beta); switch to injections when their value
starts nonnegative (H(0) >= 0). In the regimes with closed forms exactly
one of the two holds except on the knife edge, where both candidates agree.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._residual import ResidualReport, build_report
from .dividends import DividendSolution, solve_dividends
from .injections import InjectionSolution, solve_injections
from .model import CostParams, ModelParams
from .simulate import SimConfig

__all__ = ["CombinedSolution", "solve_combined", "hjb_residual_combined", "dominance_check"]

CHOICE_DIVIDENDS = "DividendsOnly"
CHOICE_INJECTIONS = "WithInjections"
CHOICE_UNDETERMINED = "Undetermined"

_TOL = 1e-9


@dataclass
class CombinedSolution:
    chosen: str
    dividend_sol: DividendSolution
    injection_sol: InjectionSolution
    criteria: dict
    diagnostics: dict = field(default_factory=dict)

    def _branch(self):
        if self.chosen == CHOICE_INJECTIONS:
            return self.injection_sol
        return self.dividend_sol

    def value(self, x):
        if self.chosen == CHOICE_UNDETERMINED:
            return max(self.dividend_sol.value(x), self.injection_sol.value(x))
        return self._branch().value(x)

    def value_prime(self, x):
        return self._branch().value_prime(x)

    def barrier(self):
        return (self.injection_sol.B_star if self.chosen == CHOICE_INJECTIONS
                else self.dividend_sol.b_star)


def solve_combined(model: ModelParams, costs: CostParams,
                   sim: SimConfig | None = None,
                   grid_points: int = 201) -> CombinedSolution:
    """Solve both subproblems and select per the zero-surplus criteria.

    When both criteria hold the branches are compared pointwise on a grid
    and the larger one wins (diagnostic: condition_overlap). When neither
    holds the result is Undetermined with both branches attached.
    """
    div = solve_dividends(model, costs, sim=sim)
    inj = solve_injections(model, costs, sim=sim)
    v_prime0 = div.value_prime(0.0)
    h0 = inj.value(0.0)
    div_ok = v_prime0 <= costs.beta + _TOL
    inj_ok = h0 >= -_TOL
    diagnostics = {}
    if div_ok and not inj_ok:
        chosen = CHOICE_DIVIDENDS
    elif inj_ok and not div_ok:
        chosen = CHOICE_INJECTIONS
    elif div_ok and inj_ok:
        hi = max(div.b_star, inj.B_star, 1.0) * 2.0
        grid = np.linspace(0.0, hi, grid_points)
        dvals = np.array([div.value(x) for x in grid])
        ivals = np.array([inj.value(x) for x in grid])
        chosen = CHOICE_INJECTIONS if float(np.sum(ivals - dvals)) > 0.0 \
            else CHOICE_DIVIDENDS
        diagnostics["condition_overlap"] = True
        diagnostics["overlap_value_gap"] = float(np.max(np.abs(ivals - dvals)))
    else:
        chosen = CHOICE_UNDETERMINED
        diagnostics["condition_gap"] = True
    return CombinedSolution(
        chosen=chosen, dividend_sol=div, injection_sol=inj,
        criteria={"v_prime_at_zero": float(v_prime0), "h_at_zero": float(h0)},
        diagnostics=diagnostics)


def hjb_residual_combined(sol: CombinedSolution, model: ModelParams,
                          costs: CostParams, grid,
                          tol_equality: float = 1e-6,
                          tol_inequality: float = 1e-8) -> ResidualReport:
    """Three-branch check on the chosen value plus the zero-surplus boundary
    condition max{-v(0), v'(0) - beta} = 0."""
    if sol.chosen == CHOICE_UNDETERMINED:
        raise ValueError("no chosen branch to verify")
    branch = sol._branch()
    barrier = sol.barrier()
    v0 = branch.value(0.0)
    vp0 = branch.value_prime(0.0)
    boundary = {"max_of_boundary_pair": max(-v0, vp0 - costs.beta)}
    return build_report(branch.impl, model, costs, grid, barrier,
                        with_injection_branch=True, boundary=boundary,
                        tol_equality=tol_equality,
                        tol_inequality=tol_inequality)


def dominance_check(sol: CombinedSolution, grid) -> dict:
    """Assert the chosen branch dominates the other on the grid.

    Returns a report dict; violations list (x, gap) pairs where the other
    branch exceeds the chosen one beyond tolerance.
    """
    tol = 1e-8
    chosen_vals = []
    other_vals = []
    violations = []
    other = (sol.dividend_sol if sol.chosen == CHOICE_INJECTIONS
             else sol.injection_sol)
    branch = sol._branch()
    for x in grid:
        cv = branch.value(x)
        ov = other.value(x)
        chosen_vals.append(cv)
        other_vals.append(ov)
        if ov > cv + tol:
            violations.append((float(x), float(ov - cv)))
    return {
        "chosen": sol.chosen,
        "max_shortfall": max((g for _, g in violations), default=0.0),
        "violations": violations,
        "passed": not violations,
    }
