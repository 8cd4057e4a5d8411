"""Optimal dividend and capital-injection control for an upward
jump-diffusion surplus with random return on investment.

Three problems share one model: dividends until ruin, dividends with forced
capital injections (no ruin), and the unconstrained selection between them.
Closed forms cover the no-return regime (scale functions) and the
deterministic-return regime with exponential gains (confluent
hypergeometric functions); a Monte Carlo engine handles the rest and
cross-checks the closed forms.
"""
from .combined import CombinedSolution, dominance_check, hjb_residual_combined, solve_combined
from .dividends import DividendSolution, hjb_residual_dividends, solve_dividends
from .injections import InjectionSolution, hjb_residual_injections, solve_injections
from .model import (
    CostParams,
    Erlang,
    Exponential,
    HyperExponential,
    ModelParams,
    generator_coefficients,
    validate,
)
from .numerics import Tolerance, find_root, integrate, invert_monotone
from .scale import (
    ScaleSet,
    build_scale_set,
    eval_W,
    eval_Z,
    eval_Zbar,
    invert_Z,
    invert_Zbar,
    laplace_exponent,
)
from .simulate import (
    EstimateResult,
    PathOutcome,
    SimConfig,
    Strategy,
    default_horizon,
    estimate_value,
    run_paths,
    search_barrier,
    simulate_path,
)

__version__ = "0.1.0"

__all__ = [
    "CombinedSolution", "CostParams", "DividendSolution", "Erlang",
    "EstimateResult", "Exponential", "HyperExponential", "InjectionSolution",
    "ModelParams", "PathOutcome", "ScaleSet", "SimConfig", "Strategy",
    "Tolerance", "build_scale_set", "default_horizon", "dominance_check",
    "estimate_value", "eval_W", "eval_Z", "eval_Zbar", "find_root",
    "generator_coefficients", "hjb_residual_combined",
    "hjb_residual_dividends", "hjb_residual_injections", "integrate",
    "invert_Z", "invert_Zbar", "invert_monotone", "laplace_exponent",
    "run_paths", "search_barrier", "simulate_path", "solve_combined",
    "solve_dividends", "solve_injections", "validate",
]
