"""End-to-end acceptance checks at their contract tolerances.

Each test prints one PASS line with its runtime (visible under pytest -s).
The Monte Carlo criteria are the heavy ones; they exploit that the payoff
is exactly linear in the dividend cost factor, so one batch of simulated
paths per starting point serves every cost scaling with unchanged
statistical meaning.
"""
import math
import time

import numpy as np
import pytest

from divctl import (
    CostParams,
    Erlang,
    Exponential,
    HyperExponential,
    ModelParams,
    SimConfig,
    Strategy,
    Tolerance,
    build_scale_set,
    dominance_check,
    estimate_value,
    eval_W,
    hjb_residual_dividends,
    hjb_residual_injections,
    integrate,
    laplace_exponent,
    run_paths,
    solve_combined,
    solve_dividends,
    solve_injections,
)
from divctl.cli import main as cli_main
from divctl.kummer import kummer_M, kummer_M_prime, kummer_U, kummer_U_prime

DELTA = 0.05
LEVY = ModelParams(p=0.5, sigma_p=0.2, lam=1.0, jump=Exponential(1.0))
KUMMER = ModelParams(p=0.5, sigma_p=0.0, lam=1.0, jump=Exponential(1.0), r=0.04)


def _report(name, t0, detail=""):
    print(f"ACCEPTANCE {name}: PASS ({time.time() - t0:.1f}s) {detail}")


def test_criterion_1_scale_laplace_identity():
    t0 = time.time()
    cases = [
        (0.1, Exponential(1.0)),
        (0.2, HyperExponential(weights=(0.35, 0.65), rates=(2.5, 0.9))),
        (0.5, HyperExponential(weights=(0.5, 0.5), rates=(3.0, 1.2))),
    ]
    tol = Tolerance(abs_tol=1e-12, rel_tol=1e-12, max_iter=500)
    for sigma_p, jump in cases:
        m = ModelParams(p=0.5, sigma_p=sigma_p, lam=1.0, jump=jump)
        s = build_scale_set(m, DELTA)
        for off in (0.5, 1.0, 5.0):
            th = s.phi + off
            est = integrate(lambda x: math.exp(-th * x) * eval_W(s, x),
                            0.0, math.inf, tol, tail_rate=min(off, 1.0))
            ref = 1.0 / (laplace_exponent(m, th) - DELTA)
            assert abs(est / ref - 1.0) < 1e-6
    elapsed = time.time() - t0
    assert elapsed < 10.0
    _report("1 (scale transform identity)", t0)


def test_criterion_2_dividends_closed_form_vs_monte_carlo():
    t0 = time.time()
    sol = solve_dividends(LEVY, CostParams(delta=DELTA, alpha=1.0))
    b = sol.b_star
    cfg = SimConfig(dt=1e-3, horizon=None, n_paths=100_000, seed=20260801)
    for x0 in (0.5, b / 2.0, b):
        div, _, _ = run_paths(LEVY, DELTA, Strategy(barrier=b), x0, cfg)
        for alpha in (1.0, 0.9):
            payoff = alpha * div
            mean = float(payoff.mean())
            se = float(payoff.std(ddof=1) / math.sqrt(payoff.size))
            ref = alpha * sol.value(x0)
            assert abs(mean - ref) <= 3.0 * se, (x0, alpha, mean, ref, se)
            assert se <= 0.01 * ref, (x0, alpha, se, ref)
    elapsed = time.time() - t0
    assert elapsed < 300.0
    _report("2 (dividends vs Monte Carlo)", t0, f"b*={b:.4f}")


def test_criterion_3_injections_closed_form_vs_monte_carlo():
    t0 = time.time()
    cfg = SimConfig(dt=1e-3, horizon=150.0, n_paths=20_000, seed=20260802)
    for beta in (1.1, 1.5):
        costs = CostParams(delta=DELTA, alpha=1.0, beta=beta)
        sol = solve_injections(LEVY, costs)
        bstar = sol.B_star
        for x0 in (0.0, bstar / 2.0, bstar):
            est = estimate_value(LEVY, costs, Strategy(barrier=bstar, inject=True),
                                 x0, cfg)
            ref = sol.value(x0)
            assert abs(est.mean - ref) <= 3.0 * est.std_err + est.truncation_bound, \
                (beta, x0, est.mean, ref, est.std_err)
    elapsed = time.time() - t0
    assert elapsed < 300.0
    _report("3 (injections vs Monte Carlo)", t0)


def test_criterion_4_zero_barrier_equivalence():
    t0 = time.time()
    rng = np.random.default_rng(99)
    done = 0
    while done < 200:
        p = rng.uniform(0.1, 2.0)
        lam = rng.uniform(0.2, 3.0)
        kind = rng.integers(0, 3)
        if kind == 0:
            jump = Exponential(mu=rng.uniform(0.3, 3.0))
        elif kind == 1:
            w = rng.uniform(0.2, 0.8)
            jump = HyperExponential(weights=(w, 1.0 - w),
                                    rates=(rng.uniform(0.5, 4.0), rng.uniform(0.3, 2.0)))
        else:
            jump = Erlang(shape=int(rng.integers(1, 4)), rate=rng.uniform(0.5, 3.0))
        net = lam * jump.mean() - p
        if abs(net) <= 1e-3:
            continue
        model = ModelParams(p=p, sigma_p=rng.uniform(0.0, 0.5), lam=lam, jump=jump)
        sol = solve_dividends(model, CostParams(delta=rng.uniform(0.02, 0.2)))
        if net <= 0.0:
            assert sol.b_star == 0.0
        else:
            assert sol.b_star > 0.0
        done += 1
    elapsed = time.time() - t0
    assert elapsed < 30.0
    _report("4 (zero-barrier equivalence, 200 draws)", t0)


def _assert_report(rep):
    assert rep.max_equality_residual < 1e-6
    assert rep.max_generator_violation <= 1e-8
    assert rep.max_slope_low_violation <= 1e-8
    if rep.max_slope_high_violation is not None:
        assert rep.max_slope_high_violation <= 1e-8
    assert rep.smooth_fit_gap < 1e-6
    assert rep.passed


def test_criterion_5_hjb_residual_suites():
    t0 = time.time()
    costs = CostParams(delta=DELTA, alpha=1.0, beta=1.2)

    sol = solve_dividends(LEVY, costs)
    inner = np.linspace(sol.b_star / 501.0, sol.b_star * (1.0 - 1e-9), 500)
    outer = np.linspace(sol.b_star * 1.01, 2.0 * sol.b_star, 100)
    _assert_report(hjb_residual_dividends(sol, LEVY, costs,
                                          np.concatenate([inner, outer])))

    soli = solve_injections(LEVY, costs)
    inner = np.linspace(soli.B_star / 501.0, soli.B_star * (1.0 - 1e-9), 500)
    outer = np.linspace(soli.B_star * 1.01, 2.0 * soli.B_star, 100)
    _assert_report(hjb_residual_injections(soli, LEVY, costs,
                                           np.concatenate([inner, outer])))

    solk = solve_dividends(KUMMER, costs)
    inner = np.linspace(solk.b_star / 501.0, solk.b_star * (1.0 - 1e-9), 500)
    outer = np.linspace(solk.b_star * 1.01, 2.0 * solk.b_star, 100)
    _assert_report(hjb_residual_dividends(solk, KUMMER, costs,
                                          np.concatenate([inner, outer])))

    solki = solve_injections(KUMMER, costs)
    inner = np.linspace(solki.B_star / 501.0, solki.B_star * (1.0 - 1e-9), 500)
    outer = np.linspace(solki.B_star * 1.01, 2.0 * solki.B_star, 100)
    _assert_report(hjb_residual_injections(solki, KUMMER, costs,
                                           np.concatenate([inner, outer])))

    elapsed = time.time() - t0
    assert elapsed < 60.0
    _report("5 (variational-inequality residual suites)", t0)


def test_criterion_6_kummer_correctness():
    t0 = time.time()
    for z in (-2.0, 0.5, 3.0):
        assert kummer_M(1.0, 1.0, z) == pytest.approx(math.exp(z),
                                                      abs=1e-12 * math.exp(abs(z)))
    rng = np.random.default_rng(11)
    for _ in range(20):
        a = rng.uniform(-2.0, 2.0)
        b = rng.uniform(0.3, 3.0)
        while abs(b - round(b)) < 0.05:
            b = rng.uniform(0.3, 3.0)
        z = rng.uniform(-6.0, 6.0)
        h = 1e-5
        fd = (kummer_M(a, b, z + h) - kummer_M(a, b, z - h)) / (2.0 * h)
        mp = kummer_M_prime(a, b, z)
        assert abs(mp - fd) <= 1e-6 * max(1.0, abs(mp))
        fpp = (a / b) * ((a + 1.0) / (b + 1.0)) * kummer_M(a + 2.0, b + 2.0, z)
        resid = z * fpp + (b - z) * kummer_M_prime(a, b, z) - a * kummer_M(a, b, z)
        assert abs(resid) < 1e-6 * max(1.0, abs(kummer_M(a, b, z)))
        zu = rng.uniform(0.3, 8.0)
        fd_u = (kummer_U(a, b, zu + h) - kummer_U(a, b, zu - h)) / (2.0 * h)
        up = kummer_U_prime(a, b, zu)
        assert abs(up - fd_u) <= 1e-6 * max(1.0, abs(up))
        fpp_u = a * (a + 1.0) * kummer_U(a + 2.0, b + 2.0, zu)
        resid_u = zu * fpp_u + (b - zu) * up - a * kummer_U(a, b, zu)
        assert abs(resid_u) < 1e-6 * max(1.0, abs(kummer_U(a, b, zu)))
    _report("6 (confluent hypergeometric correctness)", t0)


def test_criterion_7_boundary_system_regression():
    t0 = time.time()
    costs = CostParams(delta=DELTA, alpha=1.0, beta=1.2)
    sol = solve_injections(KUMMER, costs)
    assert sol.regime == "KummerForm"
    d = sol.diagnostics
    assert abs(d["boundary_system_slope0_residual"]) <= 1e-8
    assert abs(d["boundary_system_slopeB_residual"]) <= 1e-8
    assert abs(sol.value_prime(0.0) - costs.beta) <= 1e-8
    assert abs(sol.value_prime(sol.B_star) - costs.alpha) <= 1e-8
    # single crossing of the smooth-fit equation on the scanned bracket
    assert d["fit_roots"] == [sol.B_star] or len(d["fit_roots"]) == 1
    assert not d["multiple_fit_roots"]
    _report("7 (boundary-system regression)", t0, f"B*={sol.B_star:.6f}")


def test_criterion_8_combined_selection():
    t0 = time.time()
    grid = np.linspace(0.0, 12.0, 200)

    dear = solve_combined(LEVY, CostParams(delta=DELTA, alpha=1.0, beta=1000.0))
    assert dear.chosen == "DividendsOnly"
    assert dominance_check(dear, grid)["passed"]

    free = solve_combined(LEVY, CostParams(delta=DELTA, alpha=1.0, beta=1.0))
    assert free.chosen == "WithInjections"
    assert free.criteria["h_at_zero"] >= 0.0
    assert dominance_check(free, grid)["passed"]

    labels = []
    for beta in np.linspace(1.0, 15.0, 20):
        sol = solve_combined(LEVY, CostParams(delta=DELTA, alpha=1.0, beta=float(beta)))
        labels.append(sol.chosen)
    assert sum(1 for a, b in zip(labels, labels[1:]) if a != b) <= 1
    _report("8 (unconstrained selection rule)", t0)


def test_criterion_9_byte_identical_outputs(tmp_path):
    t0 = time.time()
    cfg = tmp_path / "det.cfg"
    cfg.write_text(
        "problem = dividends\n"
        "model.p = 0.5\nmodel.sigma_p = 0.2\nmodel.lambda = 1\n"
        "model.jump.kind = exponential\nmodel.jump.mu = 1\n"
        "costs.delta = 0.05\ncosts.alpha = 1\ncosts.beta = 1.2\n"
        "sim.dt = 0.001\nsim.horizon = 10\nsim.n_paths = 300\nsim.seed = 4242\n"
        "output.grid.min = 0\noutput.grid.max = 4\noutput.grid.points = 5\n")
    for cmd, suffix in (("simulate", ".simulate.csv"), ("solve", ".values.csv")):
        p1, p2 = str(tmp_path / "r1"), str(tmp_path / "r2")
        assert cli_main([cmd, "--config", str(cfg), "--out", p1]) == 0
        assert cli_main([cmd, "--config", str(cfg), "--out", p2]) == 0
        b1 = open(p1 + suffix, "rb").read()
        b2 = open(p2 + suffix, "rb").read()
        assert b1 == b2
    _report("9 (byte-identical repeated runs)", t0)
