"""Benchmark the path kernels: numba JIT vs pure-Python fallback.

Run from the repository root:

    python3 benchmarks/bench_kernels.py            # times the current mode,
                                                   # then the fallback in a
                                                   # subprocess for comparison
    DIVCTL_DISABLE_NUMBA=1 python3 benchmarks/bench_kernels.py --no-compare

Both modes execute identical code and produce bitwise-identical results;
only throughput differs.
"""
from __future__ import annotations

import argparse
import os
import subprocess
import sys
import time

import numpy as np


def run_workload(n_paths: int, horizon: float) -> tuple[float, float, float]:
    from divctl import CostParams, Exponential, ModelParams, SimConfig, Strategy, run_paths
    from divctl.simulate import NUMBA_ENABLED

    model = ModelParams(p=0.5, sigma_p=0.2, lam=1.0, jump=Exponential(1.0))
    cfg = SimConfig(dt=1e-3, horizon=horizon, n_paths=n_paths, seed=123)
    strat = Strategy(barrier=3.678, inject=False)
    # warm-up triggers JIT compilation so the timing below is steady-state
    run_paths(model, 0.05, strat, 3.678, SimConfig(dt=1e-3, horizon=2.0, n_paths=8, seed=1))
    t0 = time.perf_counter()
    div, inj, ruin = run_paths(model, 0.05, strat, 3.678, cfg)
    wall = time.perf_counter() - t0
    # ruin times bound the step count: steps ~ simulated_time / dt
    sim_time = float(np.where(ruin < 0, horizon, ruin).sum())
    steps = sim_time / cfg.dt
    return wall, steps, float(div.mean())


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-paths", type=int, default=None)
    ap.add_argument("--horizon", type=float, default=200.0)
    ap.add_argument("--no-compare", action="store_true",
                    help="skip the fallback subprocess comparison")
    args = ap.parse_args()

    from divctl.simulate import NUMBA_ENABLED
    mode = "numba" if NUMBA_ENABLED else "python"
    n = args.n_paths if args.n_paths is not None else (4000 if NUMBA_ENABLED else 8)
    wall, steps, mean = run_workload(n, args.horizon)
    rate = steps / wall
    print(f"mode={mode:6s} n_paths={n:<6d} wall={wall:8.2f}s "
          f"steps={steps:.3g} rate={rate:.3g} steps/s mean={mean:.4f}")

    if NUMBA_ENABLED and not args.no_compare:
        env = dict(os.environ, DIVCTL_DISABLE_NUMBA="1")
        sub = subprocess.run(
            [sys.executable, os.path.abspath(__file__), "--no-compare",
             "--n-paths", "8", "--horizon", str(args.horizon)],
            env=env, capture_output=True, text=True)
        sys.stdout.write(sub.stdout)
        if sub.returncode == 0 and "rate=" in sub.stdout:
            fb_rate = float(sub.stdout.split("rate=")[1].split()[0])
            print(f"speedup: {rate / fb_rate:.0f}x")
        else:
            sys.stderr.write(sub.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
