"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

These call the same check implementations the `validate` CLI command runs, so
a failure here and a failing validate row always name the same quantity.
Run with `pytest tests/test_acceptance.py -v -s` to see every line.
"""

import subprocess
import sys
import time

from qfeedback import validate


def _assert_all(results, label):
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status}  criterion {label}: {r.name} — {r.detail}")
    failed = [r for r in results if not r.passed]
    assert not failed, "; ".join(f"{r.name}: {r.detail}" for r in failed)


def test_criterion_01_oracle_equivalence():
    # 8 oracles x >=100 random points, sim within 1e-9, under 60 s
    _assert_all(validate.check_oracle_grids(points=100), "1")


def test_criterion_02_steady_spot_value():
    _assert_all([validate.check_steady_spot()], "2")


def test_criterion_03_cf_no_cooling():
    _assert_all([validate.check_cf_no_cooling(protocols=500)], "3")


def test_criterion_04_crossover_at_one_third():
    _assert_all([validate.check_crossover(lams=(0.1, 0.5, 0.9))], "4")


def test_criterion_05_purity_dichotomy():
    _assert_all([validate.check_purity_dichotomy(grid=30)], "5")


def test_criterion_06_amplitude_damping_grid():
    _assert_all([validate.check_ad_grid(grid=20)], "6")


def test_criterion_07_bitflip_fidelities():
    _assert_all([validate.check_bitflip_surface(grid=21)], "7")


def test_criterion_08_conditional_statistics():
    _assert_all([validate.check_conditional_statistics(n_traj=10_000, steps=200)], "8")


def test_criterion_09_weak_limit():
    _assert_all([validate.check_weak_limit()], "9")


def test_criterion_10_cooling_rate_scaling():
    _assert_all([validate.check_cooling_rate()], "10")


def test_criterion_11_determinism(tmp_path):
    _assert_all([validate.check_determinism()], "11")

    args = [sys.executable, "-m", "qfeedback.cli", "trajectories",
            "--scenario", "mf-noisy-cooling", "--tau", "0.5", "--lambda", "0.5",
            "--steps", "25", "--ntraj", "20", "--seed", "4242"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert subprocess.run([*args, "--out", str(a)], capture_output=True).returncode == 0
    assert subprocess.run([*args, "--out", str(b), "--threads", "2"], capture_output=True).returncode == 0
    identical = a.read_bytes() == b.read_bytes()
    print(f"{'PASS' if identical else 'FAIL'}  criterion 11: trajectory CSVs byte-identical")
    assert identical

    t0 = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "qfeedback.cli", "validate"],
                          capture_output=True, text=True)
    elapsed = time.perf_counter() - t0
    ok = proc.returncode == 0 and elapsed < 120.0
    print(f"{'PASS' if ok else 'FAIL'}  criterion 11: cmd_validate exit {proc.returncode} in {elapsed:.1f}s (budget 120s)")
    assert proc.returncode == 0, proc.stdout + proc.stderr
    assert elapsed < 120.0
