import json
import subprocess
import sys

import numpy as np

from qfeedback import oracles
from qfeedback.loop import steady_state
from qfeedback.metrics import von_neumann_entropy
from qfeedback.validate import _mf_cooling_protocol


def run_cli(*args, cwd=None):
    return subprocess.run(
        [sys.executable, "-m", "qfeedback.cli", *args],
        capture_output=True, text=True, cwd=cwd,
    )


def test_steady_reports_oracle_deviation():
    r = run_cli("steady", "--scenario", "mf-noisy-cooling", "--tau", "0.5", "--lambda", "0.5")
    assert r.returncode == 0
    assert "0.785714285714286" in r.stdout
    assert "oracle_dev: 0" in r.stdout


def test_steady_cf_clean_is_pure():
    r = run_cli("steady", "--scenario", "cf-clean", "--tau", "0.5", "--lambda", "0.4")
    assert r.returncode == 0
    assert "purity: 1" in r.stdout


def test_steady_cf_noisy_is_maximally_mixed():
    # any in-loop unitary: a rotated loop still cannot beat the mixed controller
    r = run_cli("steady", "--scenario", "cf-noisy", "--tau", "0.3", "--lambda", "0.8",
                "--chi", "0.7", "--phi1", "0.4")
    assert r.returncode == 0
    assert "spectrum: 0.5, 0.5" in r.stdout


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"scenario": "mf-noisy-cooling", "tau": 0.9, "lambda": 0.5}))
    r = run_cli("steady", "--config", str(cfg), "--tau", "0.5")
    assert r.returncode == 0
    assert "tau1=0.5" in r.stdout  # the flag wins over the config value


def test_bad_scenario_exits_2():
    r = run_cli("steady", "--scenario", "not-a-scenario")
    assert r.returncode == 2
    assert "config error" in r.stderr


def test_bad_config_file_exits_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    r = run_cli("steady", "--config", str(bad), "--scenario", "cf-clean")
    assert r.returncode == 2


def test_degenerate_steady_state_exits_3():
    # tau = 1 and lambda = 1 make the cycle the identity map
    r = run_cli("steady", "--scenario", "cf-noisy", "--tau", "1.0", "--lambda", "1.0")
    assert r.returncode == 3
    assert "degenerate" in r.stderr.lower()


def test_trajectories_deterministic_and_schema(tmp_path):
    args = ["trajectories", "--scenario", "mf-noisy-cooling", "--tau", "0.5",
            "--lambda", "0.5", "--steps", "15", "--ntraj", "8", "--seed", "21"]
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run_cli(*args, "--out", str(out1)).returncode == 0
    assert run_cli(*args, "--out", str(out2), "--threads", "3").returncode == 0
    assert out1.read_bytes() == out2.read_bytes()
    lines = out1.read_text().splitlines()
    assert lines[0] == "trajectory_id,step,outcome,probability,entropy_normalised,rho11"
    assert len(lines) == 1 + 8 * 15 + 15  # header + per-trajectory rows + mean rows
    assert "\r" not in out1.read_text()
    meta = json.loads((tmp_path / "a.csv.meta.json").read_text())
    assert meta["config"]["seed"] == 21
    assert meta["version"]


def test_trajectories_perfect_cooling_entropy_column(tmp_path):
    out = tmp_path / "cool.csv"
    r = run_cli("trajectories", "--scenario", "mf-noisy-cooling", "--tau", "0.0",
                "--lambda", "1.0", "--steps", "10", "--ntraj", "5", "--seed", "3",
                "--out", str(out))
    assert r.returncode == 0
    for line in out.read_text().splitlines()[1:]:
        fields = line.split(",")
        assert float(fields[4]) <= 1e-12  # entropy column


def test_trajectories_mean_entropy_converges(tmp_path):
    tau, lam = 0.5, 0.5
    out = tmp_path / "traj.csv"
    r = run_cli("trajectories", "--scenario", "mf-noisy-cooling", "--tau", str(tau),
                "--lambda", str(lam), "--steps", "30", "--ntraj", "400", "--seed", "11",
                "--out", str(out))
    assert r.returncode == 0
    s_ss = von_neumann_entropy(steady_state(_mf_cooling_protocol(2, tau, lam))[0], normalised=True)
    step_cut = int(np.ceil(5.0 / (1.0 - tau)))
    for line in out.read_text().splitlines()[1:]:
        fields = line.split(",")
        if fields[0] == "mean" and int(fields[1]) >= step_cut:
            assert abs(float(fields[4]) - s_ss) < 0.02


def test_trajectories_require_mf_scenario():
    r = run_cli("trajectories", "--scenario", "cf-clean")
    assert r.returncode == 2


def test_sweep_crossover_sign_change(tmp_path):
    out = tmp_path / "sweep.csv"
    r = run_cli("sweep", "--scenario", "clean-cooling-compare", "--lambda", "0.5",
                "--sweep", "tau=0.1:0.6:26", "--out", str(out))
    assert r.returncode == 0
    lines = out.read_text().splitlines()
    cols = lines[0].split(",")
    i_tau = cols.index("tau")
    i_diff = cols.index("s_mf_minus_s_cf")
    rows = [(float(l.split(",")[i_tau]), float(l.split(",")[i_diff])) for l in lines[1:]]
    flips = [(a, b) for (a, da), (b, db) in zip(rows, rows[1:]) if (da < 0) != (db < 0)]
    assert len(flips) == 1
    lo, hi = flips[0]
    assert lo < 1.0 / 3.0 < hi


def test_sweep_povm_argmax_on_diagonal(tmp_path):
    out = tmp_path / "ab.csv"
    r = run_cli("sweep", "--scenario", "bitflip-povm", "--tau", "0.5",
                "--sweep", "a=0:1:11", "--sweep", "b=0:1:11", "--out", str(out))
    assert r.returncode == 0
    lines = out.read_text().splitlines()
    cols = lines[0].split(",")
    ia, ib, iv = cols.index("a"), cols.index("b"), cols.index("haar_fidelity")
    best = max(lines[1:], key=lambda l: float(l.split(",")[iv]))
    fields = best.split(",")
    assert abs(float(fields[ia]) - float(fields[ib])) <= 0.1 + 1e-12


def test_sweep_gamma_monotone(tmp_path):
    out = tmp_path / "g.csv"
    r = run_cli("sweep", "--scenario", "ad-cf", "--tau", "0.25", "--chi",
                str(np.pi / 2), "--sweep", "gamma=0.05:0.95:10", "--out", str(out))
    assert r.returncode == 0
    lines = out.read_text().splitlines()
    i_r = lines[0].split(",").index("rho11")
    vals = [float(l.split(",")[i_r]) for l in lines[1:]]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    # and the values match the closed form
    i_g = lines[0].split(",").index("gamma")
    for line in lines[1:]:
        fields = line.split(",")
        expect = oracles.ad_occupations(0.25, float(fields[i_g]))[1]
        assert abs(float(fields[i_r]) - expect) <= 1e-9


def test_sweep_rejects_three_axes():
    r = run_cli("sweep", "--scenario", "mf-noisy-cooling", "--sweep", "tau=0:1:3",
                "--sweep", "lambda=0:1:3", "--sweep", "gamma=0:1:3")
    assert r.returncode == 2


def test_sweep_rejects_unknown_axis():
    r = run_cli("sweep", "--scenario", "mf-noisy-cooling", "--sweep", "foo=0:1:3")
    assert r.returncode == 2


def test_validate_single_check_passes():
    r = run_cli("validate", "--only", "spot", "--points", "10")
    assert r.returncode == 0
    assert "PASS" in r.stdout
    assert "steady-spot-value" in r.stdout


def test_validate_unknown_filter_exits_2():
    r = run_cli("validate", "--only", "zzz-no-such-check")
    assert r.returncode == 2
