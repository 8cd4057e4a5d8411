"""Command-line front end.

Configs are flat ``key = value`` documents with dotted keys (``model.p``,
``costs.beta``, ``sim.seed``); ``#`` starts a comment. Every key can be
overridden by an environment variable named DIVCTL_ plus the uppercased key
with dots replaced by underscores (``DIVCTL_MODEL_SIGMA_P``).

Commands: solve | simulate | verify | sweep. Exit codes: 0 success,
1 verification failures, 2 configuration errors, 3 solver/simulation errors.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import combined as combined_mod
from . import dividends as dividends_mod
from . import injections as injections_mod
from .errors import ConfigError, DivctlError
from .model import CostParams, Erlang, Exponential, HyperExponential, ModelParams, validate
from .numerics import Tolerance, integrate
from .scale import build_scale_set, eval_W, eval_W_numeric, eval_Z, eval_Zbar, laplace_exponent
from .simulate import SimConfig, Strategy, estimate_value

_F = "%.12g"  # 12 significant digits everywhere in machine output


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        return _F % v
    return str(v)


_DEFAULTS = {
    "problem": "dividends",
    "model.p": None,
    "model.sigma_p": "0",
    "model.lambda": None,
    "model.r": "0",
    "model.sigma_r": "0",
    "model.rho": "0",
    "model.jump.kind": None,
    "model.jump.mu": None,
    "model.jump.weights": None,
    "model.jump.rates": None,
    "model.jump.shape": None,
    "model.jump.rate": None,
    "costs.delta": None,
    "costs.alpha": "1",
    "costs.beta": "1",
    "sim.dt": "0.001",
    "sim.horizon": "",
    "sim.n_paths": "10000",
    "sim.seed": "0",
    "sim.antithetic": "false",
    "sim.barrier": "",
    "sim.inject": "",
    "output.format": "csv",
    "output.grid.min": "0",
    "output.grid.max": "10",
    "output.grid.points": "101",
    "output.path": "",
    "output.per_path": "false",
}
_REQUIRED = ("model.p", "model.lambda", "model.jump.kind", "costs.delta")


def read_config_file(path: str) -> dict:
    doc = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
                key, _, value = line.partition("=")
                key = key.strip()
                if key not in _DEFAULTS:
                    raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
                doc[key] = value.strip()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return doc


def apply_env_overrides(doc: dict, environ=None) -> dict:
    environ = os.environ if environ is None else environ
    out = dict(doc)
    for key in _DEFAULTS:
        env_name = "DIVCTL_" + key.upper().replace(".", "_")
        if env_name in environ:
            out[key] = environ[env_name]
    return out


def _get(doc, key):
    v = doc.get(key, _DEFAULTS.get(key))
    return v


def _get_float(doc, key):
    v = _get(doc, key)
    if v is None or v == "":
        raise ConfigError(f"{key}: missing required value")
    try:
        return float(v)
    except ValueError as exc:
        raise ConfigError(f"{key}: not a number: {v!r}") from exc


def _get_int(doc, key):
    v = _get(doc, key)
    try:
        return int(v)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{key}: not an integer: {v!r}") from exc


def _get_bool(doc, key):
    v = str(_get(doc, key)).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("", "0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key}: not a boolean: {v!r}")


def _get_list(doc, key):
    v = _get(doc, key)
    if v is None or v == "":
        raise ConfigError(f"{key}: missing required list")
    try:
        return [float(tok) for tok in v.replace(",", " ").split()]
    except ValueError as exc:
        raise ConfigError(f"{key}: not a number list: {v!r}") from exc


def build_jump(doc) -> object:
    kind = _get(doc, "model.jump.kind")
    if kind is None:
        raise ConfigError("model.jump.kind: missing required value")
    kind = kind.strip().lower()
    try:
        if kind == "exponential":
            return Exponential(mu=_get_float(doc, "model.jump.mu"))
        if kind == "hyperexponential":
            return HyperExponential(weights=tuple(_get_list(doc, "model.jump.weights")),
                                    rates=tuple(_get_list(doc, "model.jump.rates")))
        if kind == "erlang":
            return Erlang(shape=_get_int(doc, "model.jump.shape"),
                          rate=_get_float(doc, "model.jump.rate"))
    except ValueError as exc:
        raise ConfigError(f"model.jump: {exc}") from exc
    raise ConfigError(f"model.jump.kind: unknown kind {kind!r} "
                      "(expected exponential|hyperexponential|erlang)")


class RunConfig:
    """Validated run configuration assembled from a flat key/value doc."""

    def __init__(self, doc: dict):
        for key in _REQUIRED:
            if _get(doc, key) in (None, ""):
                raise ConfigError(f"{key}: missing required value")
        self.doc = {k: _get(doc, k) for k in _DEFAULTS if _get(doc, k) is not None}
        self.problem = str(_get(doc, "problem")).strip().lower()
        if self.problem not in ("dividends", "injections", "combined"):
            raise ConfigError(f"problem: unknown problem {self.problem!r}")
        self.model = ModelParams(
            p=_get_float(doc, "model.p"),
            sigma_p=_get_float(doc, "model.sigma_p"),
            lam=_get_float(doc, "model.lambda"),
            jump=build_jump(doc),
            r=_get_float(doc, "model.r"),
            sigma_r=_get_float(doc, "model.sigma_r"),
            rho=_get_float(doc, "model.rho"),
        )
        self.costs = CostParams(
            delta=_get_float(doc, "costs.delta"),
            alpha=_get_float(doc, "costs.alpha"),
            beta=_get_float(doc, "costs.beta"),
        )
        horizon_raw = _get(doc, "sim.horizon")
        try:
            self.sim = SimConfig(
                dt=_get_float(doc, "sim.dt"),
                horizon=None if horizon_raw in ("", None) else float(horizon_raw),
                n_paths=_get_int(doc, "sim.n_paths"),
                seed=_get_int(doc, "sim.seed"),
                antithetic=_get_bool(doc, "sim.antithetic"),
            )
        except ValueError as exc:
            raise ConfigError(f"sim: {exc}") from exc
        barrier_raw = _get(doc, "sim.barrier")
        self.barrier_override = None if barrier_raw in ("", None) else float(barrier_raw)
        inject_raw = _get(doc, "sim.inject")
        self.inject_override = None if inject_raw in ("", None) else _get_bool(doc, "sim.inject")
        self.out_format = str(_get(doc, "output.format")).strip().lower()
        if self.out_format not in ("csv", "json"):
            raise ConfigError(f"output.format: unknown format {self.out_format!r}")
        gmin = _get_float(doc, "output.grid.min")
        gmax = _get_float(doc, "output.grid.max")
        gpts = _get_int(doc, "output.grid.points")
        if not (gmax > gmin and gpts >= 2):
            raise ConfigError("output.grid: need max > min and points >= 2")
        self.grid = (gmin, gmax, gpts)
        self.per_path = _get_bool(doc, "output.per_path")
        self.out_prefix = _get(doc, "output.path") or None
        errors = [d for d in validate(self.model, self.costs) if d.level == "ERROR"]
        if errors:
            raise ConfigError("; ".join(f"{d.field}: {d.message}" for d in errors))

    def grid_values(self) -> np.ndarray:
        gmin, gmax, gpts = self.grid
        return np.linspace(gmin, gmax, gpts)

    def dump(self) -> str:
        lines = []
        for key in _DEFAULTS:
            val = self.doc.get(key, _DEFAULTS[key])
            if val in (None,):
                continue
            lines.append(f"{key} = {val}")
        return "\n".join(lines) + "\n"


def _solve_problem(cfg: RunConfig):
    if cfg.problem == "dividends":
        return dividends_mod.solve_dividends(cfg.model, cfg.costs, sim=cfg.sim)
    if cfg.problem == "injections":
        return injections_mod.solve_injections(cfg.model, cfg.costs, sim=cfg.sim)
    return combined_mod.solve_combined(cfg.model, cfg.costs, sim=cfg.sim)


def _solution_rows(cfg: RunConfig, sol) -> list[dict]:
    closed_form = getattr(sol, "regime", None) not in ("MonteCarlo",) or \
        isinstance(sol, combined_mod.CombinedSolution)
    rows = []
    for x in cfg.grid_values():
        x = float(x)
        row = {"x": x, "value": sol.value(x)}
        try:
            row["value_prime"] = sol.value_prime(x)
        except DivctlError:
            row["value_prime"] = math.nan
        row["hjb_residual"] = math.nan
        rows.append(row)
    if closed_form:
        _fill_residuals(cfg, sol, rows)
    return rows


def _fill_residuals(cfg: RunConfig, sol, rows):
    from ._residual import generator_minus_delta
    if isinstance(sol, combined_mod.CombinedSolution):
        if sol.chosen == combined_mod.CHOICE_UNDETERMINED:
            return
        branch = sol._branch()
        if branch.regime == "MonteCarlo":
            return
        impl, barrier = branch.impl, sol.barrier()
    else:
        if sol.regime == "MonteCarlo":
            return
        impl = sol.impl
        barrier = getattr(sol, "b_star", getattr(sol, "B_star", 0.0))
    for row in rows:
        if row["x"] <= 0.0:
            continue
        row["hjb_residual"] = generator_minus_delta(
            impl, cfg.model, cfg.costs.delta, cfg.costs.alpha, barrier, row["x"])


def _summary_dict(cfg: RunConfig, sol) -> dict:
    if isinstance(sol, combined_mod.CombinedSolution):
        return {
            "problem": cfg.problem,
            "chosen": sol.chosen,
            "b_star": sol.dividend_sol.b_star,
            "B_star": sol.injection_sol.B_star,
            "v_prime_at_zero": sol.criteria["v_prime_at_zero"],
            "h_at_zero": sol.criteria["h_at_zero"],
            "dividend_regime": sol.dividend_sol.regime,
            "injection_regime": sol.injection_sol.regime,
            "diagnostics": _scrub(sol.diagnostics),
        }
    barrier_key = "b_star" if hasattr(sol, "b_star") else "B_star"
    return {
        "problem": cfg.problem,
        "regime": sol.regime,
        barrier_key: getattr(sol, barrier_key),
        "diagnostics": _scrub(sol.diagnostics),
    }


def _scrub(obj):
    """JSON-encodable copy of a diagnostics mapping."""
    if isinstance(obj, dict):
        return {k: _scrub(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_scrub(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, float) and math.isnan(obj):
        return "nan"
    return obj


def _write_table(path: str, fieldnames: list[str], rows: list[dict],
                 out_format: str):
    if out_format == "json":
        with open(path, "w", encoding="utf-8") as fh:
            json.dump([{k: _scrub_cell(r.get(k)) for k in fieldnames} for r in rows],
                      fh, indent=1, sort_keys=True)
            fh.write("\n")
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(fieldnames) + "\n")
        for r in rows:
            fh.write(",".join(_fmt(r.get(k)) for k in fieldnames) + "\n")


def _scrub_cell(v):
    if isinstance(v, float) and math.isnan(v):
        return None
    return v


def cmd_solve(cfg: RunConfig, out_prefix: str | None) -> int:
    sol = _solve_problem(cfg)
    summary = _summary_dict(cfg, sol)
    for key, val in summary.items():
        if key == "diagnostics":
            continue
        print(f"{key} = {_fmt(val)}")
    rows = _solution_rows(cfg, sol)
    prefix = out_prefix or cfg.out_prefix
    if prefix:
        ext = "json" if cfg.out_format == "json" else "csv"
        _write_table(f"{prefix}.values.{ext}",
                     ["x", "value", "value_prime", "hjb_residual"], rows,
                     cfg.out_format)
        with open(f"{prefix}.summary.json", "w", encoding="utf-8") as fh:
            json.dump(_scrub(summary), fh, indent=1, sort_keys=True)
            fh.write("\n")
        print(f"wrote {prefix}.values.{ext} and {prefix}.summary.json")
    return 0


def cmd_simulate(cfg: RunConfig, out_prefix: str | None) -> int:
    closed_value = None
    if cfg.barrier_override is not None:
        barrier = cfg.barrier_override
        inject = cfg.inject_override if cfg.inject_override is not None \
            else cfg.problem == "injections"
    else:
        sol = _solve_problem(cfg)
        if isinstance(sol, combined_mod.CombinedSolution):
            barrier = sol.barrier()
            inject = sol.chosen == combined_mod.CHOICE_INJECTIONS
            closed_value = sol.value
        else:
            inject = cfg.problem == "injections"
            barrier = getattr(sol, "b_star", None) if not inject else sol.B_star
            if getattr(sol, "regime", "") != "MonteCarlo":
                closed_value = sol.value
    strategy = Strategy(barrier=float(barrier), inject=bool(inject))
    rows = []
    path_rows = []
    for x0 in cfg.grid_values():
        if cfg.per_path:
            from .simulate import run_paths
            div, inj_amt, ruin = run_paths(cfg.model, cfg.costs.delta, strategy,
                                           float(x0), cfg.sim)
            payoff = cfg.costs.alpha * div - cfg.costs.beta * inj_amt
            for pid in range(div.size):
                path_rows.append({
                    "path_id": pid,
                    "ruin_time": math.inf if ruin[pid] < 0 else float(ruin[pid]),
                    "disc_dividends": float(div[pid]),
                    "disc_injections": float(inj_amt[pid]),
                    "payoff": float(payoff[pid]),
                    "x0": float(x0),
                })
        est = estimate_value(cfg.model, cfg.costs, strategy, float(x0), cfg.sim)
        row = {"x0": float(x0), "mean": est.mean, "std_err": est.std_err,
               "n_paths": est.n, "truncation_bound": est.truncation_bound}
        if closed_value is not None:
            ref = closed_value(float(x0))
            row["closed_form"] = ref
            row["check"] = ("PASS" if abs(est.mean - ref) <= 3.0 * est.std_err + 1e-12
                            else "FAIL")
        else:
            row["closed_form"] = math.nan
            row["check"] = "NA"
        rows.append(row)
    fields = ["x0", "mean", "std_err", "n_paths", "truncation_bound",
              "closed_form", "check"]
    for r in rows:
        print(",".join(_fmt(r[k]) for k in fields))
    prefix = out_prefix or cfg.out_prefix
    if prefix:
        ext = "json" if cfg.out_format == "json" else "csv"
        _write_table(f"{prefix}.simulate.{ext}", fields, rows, cfg.out_format)
        print(f"wrote {prefix}.simulate.{ext}")
        if cfg.per_path:
            _write_table(f"{prefix}.paths.{ext}",
                         ["path_id", "ruin_time", "disc_dividends",
                          "disc_injections", "payoff", "x0"],
                         path_rows, cfg.out_format)
            print(f"wrote {prefix}.paths.{ext}")
    return 0


def _verify_rows_scale(cfg: RunConfig) -> list[tuple[str, float, float]]:
    """Scale-function battery: transform identity, boundary values,
    monotonicity, convexity, numeric-inversion cross-check."""
    model, delta = cfg.model, cfg.costs.delta
    s = build_scale_set(model, delta)
    rows = []
    tol = Tolerance(abs_tol=1e-12, rel_tol=1e-12, max_iter=400)
    for off in (0.5, 1.0, 5.0):
        th = s.phi + off
        rate = max(off, 0.5)
        est = integrate(lambda x: math.exp(-th * x) * eval_W(s, x), 0.0,
                        math.inf, tol, tail_rate=rate)
        ref = 1.0 / (laplace_exponent(model, th) - delta)
        rows.append((f"laplace_identity_theta_phi+{off:g}", abs(est / ref - 1.0), 1e-6))
    rows.append(("Z_at_zero_minus_1", abs(eval_Z(s, 0.0) - 1.0), 1e-12))
    w0 = eval_W(s, 0.0)
    if model.sigma_p > 0.0:
        rows.append(("W_at_zero", abs(w0), 1e-9))
    xs = np.linspace(0.0, max(4.0 * model.jump.mean(), 5.0), 400)
    wv = eval_W(s, xs)
    rows.append(("W_nonnegative", float(max(0.0, -wv.min())), 1e-12))
    rows.append(("W_nondecreasing", float(max(0.0, -np.diff(wv).min())), 1e-9))
    zb = eval_Zbar(s, xs)
    d2 = np.diff(zb, 2)
    rows.append(("Zbar_convexity", float(max(0.0, -d2.min())), 1e-8))
    mid = float(xs[len(xs) // 2] + 0.25)
    rows.append(("numeric_inversion_crosscheck",
                 abs(eval_W_numeric(s, mid) / eval_W(s, mid) - 1.0), 1e-6))
    return rows


def cmd_verify(cfg: RunConfig, problem: str | None) -> int:
    problem = problem or cfg.problem
    rows: list[tuple[str, float, float]] = []
    if problem == "scale":
        if not cfg.model.is_levy_regime():
            raise ConfigError("model.r/model.sigma_r: scale verification needs r = sigma_r = 0")
        rows = _verify_rows_scale(cfg)
    else:
        rows = _verify_rows_problem(cfg, problem)
    width = max(len(name) for name, _, _ in rows)
    failed = False
    for name, value, tol in rows:
        ok = value <= tol
        failed |= not ok
        print(f"{name:<{width}}  {_fmt(value):>14}  tol={_fmt(tol):>8}  "
              f"{'PASS' if ok else 'FAIL'}")
    print("verify:", "FAIL" if failed else "PASS")
    return 1 if failed else 0


def _grid_for(sol_barrier: float, points: int = 500) -> np.ndarray:
    hi = max(2.0 * sol_barrier, sol_barrier + 1.0, 1.0)
    return np.linspace(hi / points, hi, points)


def _verify_rows_problem(cfg: RunConfig, problem: str):
    rows = []
    if problem == "dividends":
        sol = dividends_mod.solve_dividends(cfg.model, cfg.costs, sim=cfg.sim)
        if sol.regime == "MonteCarlo":
            raise ConfigError("problem: verify needs a closed-form regime "
                              "(Monte Carlo route has no residuals)")
        rep = dividends_mod.hjb_residual_dividends(
            sol, cfg.model, cfg.costs, _grid_for(sol.b_star))
        rows.append(("value_at_zero", abs(sol.value(0.0)), 1e-9))
        rows += _report_rows(rep)
        rows += _concavity_rows(sol, sol.b_star)
        if sol.regime == "ScaleForm":
            rows.append(("barrier_equation_residual",
                         abs(sol.diagnostics["barrier_equation_residual"]), 1e-8))
    elif problem == "injections":
        sol = injections_mod.solve_injections(cfg.model, cfg.costs, sim=cfg.sim)
        if sol.regime == "MonteCarlo":
            raise ConfigError("problem: verify needs a closed-form regime")
        rep = injections_mod.hjb_residual_injections(
            sol, cfg.model, cfg.costs, _grid_for(sol.B_star))
        rows.append(("slope_at_zero_minus_beta",
                     abs(sol.value_prime(0.0) - cfg.costs.beta), 1e-6))
        rows += _report_rows(rep)
        rows += _concavity_rows(sol, sol.B_star)
    elif problem == "combined":
        sol = combined_mod.solve_combined(cfg.model, cfg.costs, sim=cfg.sim)
        rep = combined_mod.hjb_residual_combined(
            sol, cfg.model, cfg.costs, _grid_for(sol.barrier()))
        rows += _report_rows(rep)
        rows.append(("boundary_pair_max",
                     abs(rep.boundary["max_of_boundary_pair"]), 1e-6))
        dom = combined_mod.dominance_check(sol, np.linspace(0.0, 2.0 * max(sol.barrier(), 1.0), 200))
        rows.append(("dominance_shortfall", dom["max_shortfall"], 1e-8))
    else:
        raise ConfigError(f"problem: unknown verification target {problem!r}")
    return rows


def _report_rows(rep) -> list[tuple[str, float, float]]:
    rows = [
        ("hjb_equality_max", rep.max_equality_residual, rep.tol_equality),
        ("hjb_generator_violation", rep.max_generator_violation, rep.tol_inequality),
        ("hjb_slope_low_violation", rep.max_slope_low_violation, rep.tol_inequality),
        ("smooth_fit_gap", rep.smooth_fit_gap, rep.tol_equality),
    ]
    if rep.max_slope_high_violation is not None:
        rows.insert(3, ("hjb_slope_high_violation", rep.max_slope_high_violation,
                        rep.tol_inequality))
    if rep.smooth_fit_gap_second is not None:
        rows.append(("smooth_fit_gap_second", rep.smooth_fit_gap_second, 1e-5))
    for name, val in rep.boundary.items():
        rows.append((f"boundary_{name}", abs(val), rep.tol_equality))
    return rows


def _concavity_rows(sol, barrier) -> list[tuple[str, float, float]]:
    if barrier <= 0.0:
        return [("concavity_violation", 0.0, 1e-8)]
    xs = np.linspace(barrier / 500.0, barrier, 500)
    vals = np.array([sol.value(x) for x in xs])
    d2 = np.diff(vals, 2)
    h = xs[1] - xs[0]
    return [("concavity_violation", float(max(0.0, d2.max() / h ** 2 if d2.size else 0.0)),
             1e-8)]


_SWEEPABLE = ("alpha", "beta", "delta", "lambda", "p", "sigma_p", "r")


def cmd_sweep(cfg: RunConfig, param: str, grid: np.ndarray,
              out_prefix: str | None, x0: float) -> int:
    if param not in _SWEEPABLE:
        raise ConfigError(f"sweep: unknown parameter {param!r} (choose from "
                          + ", ".join(_SWEEPABLE) + ")")
    rows = []
    for val in grid:
        val = float(val)
        model, costs = _override_param(cfg, param, val)
        row = {"param": param, "value": val, "b_star": math.nan,
               "B_star": math.nan, "value_x0": math.nan, "chosen": ""}
        if cfg.problem == "dividends":
            sol = dividends_mod.solve_dividends(model, costs, sim=cfg.sim)
            row["b_star"] = sol.b_star
            row["value_x0"] = sol.value(x0)
        elif cfg.problem == "injections":
            sol = injections_mod.solve_injections(model, costs, sim=cfg.sim)
            row["B_star"] = sol.B_star
            row["value_x0"] = sol.value(x0)
        else:
            sol = combined_mod.solve_combined(model, costs, sim=cfg.sim)
            row["b_star"] = sol.dividend_sol.b_star
            row["B_star"] = sol.injection_sol.B_star
            row["value_x0"] = sol.value(x0)
            row["chosen"] = sol.chosen
        rows.append(row)
    fields = ["param", "value", "b_star", "B_star", "value_x0", "chosen"]
    for r in rows:
        print(",".join(_fmt(r[k]) for k in fields))
    prefix = out_prefix or cfg.out_prefix
    if prefix:
        ext = "json" if cfg.out_format == "json" else "csv"
        _write_table(f"{prefix}.sweep.{ext}", fields, rows, cfg.out_format)
        print(f"wrote {prefix}.sweep.{ext}")
    return 0


def _override_param(cfg: RunConfig, param: str, value: float):
    model, costs = cfg.model, cfg.costs
    if param in ("alpha", "beta", "delta"):
        kw = {"delta": costs.delta, "alpha": costs.alpha, "beta": costs.beta}
        kw[param] = value
        return model, CostParams(**kw)
    kw = {"p": model.p, "sigma_p": model.sigma_p, "lam": model.lam,
          "jump": model.jump, "r": model.r, "sigma_r": model.sigma_r,
          "rho": model.rho}
    kw["lam" if param == "lambda" else param] = value
    return ModelParams(**kw), costs


def _parse_grid_spec(spec: str) -> np.ndarray:
    try:
        lo, hi, n = spec.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError as exc:
        raise ConfigError(f"--grid: expected MIN:MAX:N, got {spec!r}") from exc
    if n < 1:
        raise ConfigError(f"--grid: need at least one point, got {n}")
    return np.linspace(lo, hi, n) if n > 1 else np.array([lo])


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="divctl",
        description="Optimal dividend / capital-injection barrier solver and simulator")
    ap.add_argument("command", choices=["solve", "simulate", "verify", "sweep"])
    ap.add_argument("--config", required=True, help="flat key=value config file")
    ap.add_argument("--out", default=None, help="output artifact prefix")
    ap.add_argument("--problem", default=None,
                    help="override the configured problem "
                         "(solve/simulate/sweep: dividends|injections|combined; "
                         "verify also accepts 'scale')")
    ap.add_argument("--grid", default=None,
                    help="MIN:MAX:N; overrides output.grid (sweep: the sweep grid)")
    ap.add_argument("--sweep", default=None, help="parameter name for sweep")
    ap.add_argument("--x0", type=float, default=None,
                    help="evaluation point for sweep value column "
                         "(default: midpoint of output.grid)")
    ap.add_argument("--dump-config", action="store_true",
                    help="print the normalized configuration and exit")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        doc = read_config_file(args.config)
        doc = apply_env_overrides(doc)
        if args.problem and args.command != "verify":
            doc["problem"] = args.problem
        cfg = RunConfig(doc)
        grid_override = _parse_grid_spec(args.grid) if args.grid else None
        if grid_override is not None and args.command != "sweep":
            cfg.grid = (float(grid_override[0]), float(grid_override[-1]),
                        len(grid_override))
            cfg.doc["output.grid.min"] = _fmt(cfg.grid[0])
            cfg.doc["output.grid.max"] = _fmt(cfg.grid[1])
            cfg.doc["output.grid.points"] = str(cfg.grid[2])
        if args.dump_config:
            sys.stdout.write(cfg.dump())
            return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    try:
        if args.command == "solve":
            return cmd_solve(cfg, args.out)
        if args.command == "simulate":
            return cmd_simulate(cfg, args.out)
        if args.command == "verify":
            return cmd_verify(cfg, args.problem)
        if args.command == "sweep":
            if not args.sweep:
                print("config error: sweep: --sweep PARAM is required", file=sys.stderr)
                return 2
            grid = grid_override if grid_override is not None \
                else cfg.grid_values()
            x0 = args.x0 if args.x0 is not None else 0.5 * (cfg.grid[0] + cfg.grid[1])
            return cmd_sweep(cfg, args.sweep, grid, args.out, x0)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DivctlError as exc:
        print(f"solver error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
