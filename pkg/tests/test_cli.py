import json
import os

import numpy as np
import pytest

from divctl.cli import main

BASE_CONFIG = """
problem = dividends
model.p = 0.5
model.sigma_p = 0.2
model.lambda = 1
model.jump.kind = exponential
model.jump.mu = 1
costs.delta = 0.05
costs.alpha = 1
costs.beta = 1.2
sim.dt = 0.001
sim.horizon = 5
sim.n_paths = 50
sim.seed = 31
output.grid.min = 0
output.grid.max = 6
output.grid.points = 7
"""


@pytest.fixture
def cfg_path(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(BASE_CONFIG)
    return str(path)


def _write(tmp_path, text, name="alt.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_solve_summary_degenerate(tmp_path, capsys):
    path = _write(tmp_path, BASE_CONFIG.replace("model.p = 0.5", "model.p = 1.5"))
    assert main(["solve", "--config", path]) == 0
    out = capsys.readouterr().out
    assert "regime = Degenerate" in out
    assert "b_star = 0" in out


def test_solve_writes_value_table(cfg_path, tmp_path, capsys):
    prefix = str(tmp_path / "run")
    assert main(["solve", "--config", cfg_path, "--out", prefix]) == 0
    lines = open(prefix + ".values.csv").read().splitlines()
    assert lines[0] == "x,value,value_prime,hjb_residual"
    assert len(lines) == 8
    summary = json.load(open(prefix + ".summary.json"))
    assert summary["regime"] == "ScaleForm"
    assert summary["b_star"] == pytest.approx(3.6776, abs=1e-3)


def test_solve_combined_reports_criteria(cfg_path, capsys):
    assert main(["solve", "--config", cfg_path, "--problem", "combined"]) == 0
    out = capsys.readouterr().out
    assert "chosen = " in out
    assert "v_prime_at_zero = " in out
    assert "h_at_zero = " in out


def test_malformed_jump_kind_exits_2(tmp_path, capsys):
    path = _write(tmp_path, BASE_CONFIG.replace("exponential", "cauchy"))
    assert main(["solve", "--config", path]) == 2
    err = capsys.readouterr().err
    assert "jump.kind" in err


def test_unknown_key_exits_2(tmp_path, capsys):
    path = _write(tmp_path, BASE_CONFIG + "\nmodel.bogus = 1\n")
    assert main(["solve", "--config", path]) == 2
    assert "model.bogus" in capsys.readouterr().err


def test_invalid_costs_exit_2(tmp_path, capsys):
    path = _write(tmp_path, BASE_CONFIG.replace("costs.alpha = 1", "costs.alpha = 0"))
    assert main(["solve", "--config", path]) == 2
    assert "costs.alpha" in capsys.readouterr().err


def test_simulate_zero_barrier_matches_linear(tmp_path, capsys):
    path = _write(tmp_path, BASE_CONFIG + "\nsim.barrier = 0\nsim.inject = false\n")
    assert main(["simulate", "--config", path]) == 0
    rows = [line.split(",") for line in capsys.readouterr().out.strip().splitlines()
            if not line.startswith("wrote")]
    for row in rows:
        x0, mean = float(row[0]), float(row[1])
        assert mean == pytest.approx(1.0 * x0, abs=1e-12)
        assert float(row[2]) == 0.0  # exact payout, zero spread


def test_simulate_csv_deterministic(cfg_path, tmp_path):
    p1 = str(tmp_path / "a")
    p2 = str(tmp_path / "b")
    assert main(["simulate", "--config", cfg_path, "--out", p1]) == 0
    assert main(["simulate", "--config", cfg_path, "--out", p2]) == 0
    assert open(p1 + ".simulate.csv", "rb").read() == open(p2 + ".simulate.csv", "rb").read()


def test_simulate_closed_form_check_column(tmp_path, capsys):
    cfg = BASE_CONFIG.replace("sim.horizon = 5", "sim.horizon = 200")
    cfg = cfg.replace("sim.n_paths = 50", "sim.n_paths = 1500")
    cfg = cfg.replace("output.grid.points = 7", "output.grid.points = 3")
    cfg = cfg.replace("output.grid.max = 6", "output.grid.max = 3")
    path = _write(tmp_path, cfg)
    assert main(["simulate", "--config", path]) == 0
    out = capsys.readouterr().out
    rows = [line.split(",") for line in out.strip().splitlines()]
    assert all(row[-1] == "PASS" for row in rows)


def test_verify_passes_scale_regime(cfg_path, capsys):
    assert main(["verify", "--config", cfg_path]) == 0
    out = capsys.readouterr().out
    assert "verify: PASS" in out
    assert "hjb_equality_max" in out


def test_verify_injections_and_combined(cfg_path, capsys):
    assert main(["verify", "--config", cfg_path, "--problem", "injections"]) == 0
    assert main(["verify", "--config", cfg_path, "--problem", "combined"]) == 0
    out = capsys.readouterr().out
    assert "boundary_slope_at_zero_minus_beta" in out
    assert "dominance_shortfall" in out


def test_verify_scale_battery(cfg_path, capsys):
    assert main(["verify", "--config", cfg_path, "--problem", "scale"]) == 0
    out = capsys.readouterr().out
    assert "laplace_identity_theta_phi+0.5" in out
    assert "numeric_inversion_crosscheck" in out


def test_verify_kummer_regime(tmp_path, capsys):
    cfg = BASE_CONFIG.replace("model.sigma_p = 0.2", "model.sigma_p = 0") \
                     .replace("model.r = 0", "") + "\nmodel.r = 0.04\n"
    path = _write(tmp_path, cfg)
    assert main(["verify", "--config", path, "--problem", "injections"]) == 0
    assert "verify: PASS" in capsys.readouterr().out


def test_dump_config_round_trips(cfg_path, tmp_path, capsys):
    assert main(["solve", "--config", cfg_path, "--dump-config"]) == 0
    dumped = capsys.readouterr().out
    path2 = _write(tmp_path, dumped, "roundtrip.cfg")
    assert main(["solve", "--config", path2, "--dump-config"]) == 0
    assert capsys.readouterr().out == dumped


def test_env_override(cfg_path, capsys, monkeypatch):
    monkeypatch.setenv("DIVCTL_MODEL_P", "1.5")
    assert main(["solve", "--config", cfg_path]) == 0
    assert "regime = Degenerate" in capsys.readouterr().out


def test_sweep_beta_monotone_barrier(cfg_path, capsys):
    assert main(["sweep", "--config", cfg_path, "--problem", "injections",
                 "--sweep", "beta", "--grid", "1.0:2.0:6", "--x0", "1.0"]) == 0
    rows = [line.split(",") for line in capsys.readouterr().out.strip().splitlines()]
    barriers = [float(r[3]) for r in rows]
    assert all(b2 >= b1 - 1e-12 for b1, b2 in zip(barriers, barriers[1:]))


def test_sweep_delta_value_nonincreasing(cfg_path, capsys):
    assert main(["sweep", "--config", cfg_path, "--sweep", "delta",
                 "--grid", "0.04:0.2:5", "--x0", "1.0"]) == 0
    rows = [line.split(",") for line in capsys.readouterr().out.strip().splitlines()]
    values = [float(r[4]) for r in rows]
    assert all(v2 <= v1 + 1e-9 for v1, v2 in zip(values, values[1:]))


def test_sweep_single_point_matches_solve(cfg_path, capsys):
    assert main(["sweep", "--config", cfg_path, "--sweep", "alpha",
                 "--grid", "1:1:1", "--x0", "2.0"]) == 0
    sweep_out = capsys.readouterr().out.strip().split(",")
    b_star_sweep = float(sweep_out[2])
    assert main(["solve", "--config", cfg_path]) == 0
    solve_out = capsys.readouterr().out
    b_line = [l for l in solve_out.splitlines() if l.startswith("b_star")][0]
    assert b_star_sweep == pytest.approx(float(b_line.split("=")[1]), abs=1e-9)


def test_sweep_unknown_parameter_exits_2(cfg_path, capsys):
    assert main(["sweep", "--config", cfg_path, "--sweep", "bogus",
                 "--grid", "0:1:3"]) == 2
    assert "sweep" in capsys.readouterr().err


def test_sweep_requires_parameter(cfg_path, capsys):
    assert main(["sweep", "--config", cfg_path]) == 2


def test_bad_grid_spec_exits_2(cfg_path, capsys):
    assert main(["solve", "--config", cfg_path, "--grid", "1:2"]) == 2


def test_missing_config_file_exits_2(tmp_path, capsys):
    assert main(["solve", "--config", str(tmp_path / "nope.cfg")]) == 2


def test_simulate_per_path_csv(tmp_path):
    cfg = BASE_CONFIG + "\noutput.per_path = true\nsim.barrier = 2\n"
    cfg = cfg.replace("output.grid.points = 7", "output.grid.points = 2")
    path = _write(tmp_path, cfg)
    prefix = str(tmp_path / "pp")
    assert main(["simulate", "--config", path, "--out", prefix]) == 0
    lines = open(prefix + ".paths.csv").read().splitlines()
    assert lines[0] == "path_id,ruin_time,disc_dividends,disc_injections,payoff,x0"
    assert len(lines) == 1 + 2 * 50  # grid points x n_paths
    first = lines[1].split(",")
    assert first[0] == "0"


def test_json_output_format(cfg_path, tmp_path):
    cfg = BASE_CONFIG + "\noutput.format = json\n"
    path = _write(tmp_path, cfg)
    prefix = str(tmp_path / "j")
    assert main(["solve", "--config", path, "--out", prefix]) == 0
    rows = json.load(open(prefix + ".values.json"))
    assert len(rows) == 7
    assert {"x", "value", "value_prime", "hjb_residual"} <= set(rows[0])


def test_twelve_significant_digits(cfg_path, tmp_path):
    prefix = str(tmp_path / "digits")
    assert main(["solve", "--config", cfg_path, "--out", prefix]) == 0
    with open(prefix + ".values.csv") as fh:
        next(fh)
        cell = next(fh).split(",")[1]
    assert len(cell.replace("-", "").replace(".", "").replace("e", "").lstrip("0")) >= 11
