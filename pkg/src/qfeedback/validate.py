"""Self-contained verification suite: every closed-form result is recomputed
through the simulator pipeline and compared at the tolerances the package
promises. `run_all` powers the `validate` CLI command; the test suite asserts
on the same results.

Checks are grouped by the claim they verify; each returns CheckResult rows
with a pass flag and a human-readable detail string (worst deviation, fitted
exponent, ...), so a failure names exactly what broke.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import oracles
from .loop import (
    CoherentStage,
    FeedbackProtocol,
    ProjectiveStage,
    all_to_target_stage,
    conditional_branches,
    cycle_unconditional,
    iterate_to_fixed_point,
    sample_ensemble,
    steady_state,
)
from .metrics import haar_avg_bitflip_fidelity, linear_entropy, purity, von_neumann_entropy
from .quantum import (
    amplitude_damping_channel,
    controller_state,
    depolarizing_channel,
    dm,
    identity_channel,
    ket,
    maximally_mixed,
    pauli_x,
    qubit_unitary,
    random_density_matrix,
    random_kraus_channel,
    random_unitary,
    rotation,
    unitary_mapping,
)
from .scenarios import bitflip_povm_kraus
from .weaklimit import effective_hamiltonian, first_order_defect, lie_closure_dim

ORACLE_TOL = 1e-9


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


def _result(name: str, passed, detail: str) -> CheckResult:
    return CheckResult(name=name, passed=bool(passed), detail=detail)


def _mf_cooling_protocol(d: int, tau: float, lam: float) -> FeedbackProtocol:
    return FeedbackProtocol(
        d=d, noise=depolarizing_channel(d, lam), tau1=tau, tau2=tau,
        eta=maximally_mixed(d), stage=all_to_target_stage(d, 0),
    )


def _cf_protocol(d: int, tau: float, lam: float, eta, unitary=None) -> FeedbackProtocol:
    v = np.eye(d, dtype=complex) if unitary is None else unitary
    return FeedbackProtocol(
        d=d, noise=depolarizing_channel(d, lam), tau1=tau, tau2=tau,
        eta=eta, stage=CoherentStage(v),
    )


def _spectrum(rho: np.ndarray) -> np.ndarray:
    return np.sort(np.linalg.eigvalsh(rho))[::-1]


# --- criterion 1: oracle equivalence grids -------------------------------

def check_oracle_mf_noisy(points: int = 100, seed: int = 100) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(points):
        d = int(rng.integers(2, 5))
        tau, lam = rng.uniform(0.03, 0.97, 2)
        rho, _ = steady_state(_mf_cooling_protocol(d, tau, lam))
        dev = np.max(np.abs(_spectrum(rho) - oracles.mf_noisy_steady(d, tau, lam)))
        worst = max(worst, float(dev))
    return _result("oracle-grid[mf_noisy_steady]", worst < ORACLE_TOL, f"worst |sim-oracle| = {worst:.2e}")


def check_oracle_cf_clean(points: int = 100, seed: int = 101) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(points):
        d = int(rng.integers(2, 5))
        tau, lam = rng.uniform(0.03, 0.97, 2)
        rho, _ = steady_state(_cf_protocol(d, tau, lam, dm(ket(d, 0))))
        dev = np.max(np.abs(_spectrum(rho) - oracles.cf_clean_steady(d, tau, lam)))
        worst = max(worst, float(dev))
    return _result("oracle-grid[cf_clean_steady]", worst < ORACLE_TOL, f"worst |sim-oracle| = {worst:.2e}")


def check_oracle_clean_entropies(points: int = 100, seed: int = 102) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(points):
        tau, lam = rng.uniform(0.03, 0.97, 2)
        s_mf_o, s_cf_o = oracles.clean_qubit_entropies(tau, lam)
        s_mf = linear_entropy(steady_state(_mf_clean_protocol(tau, lam))[0])
        s_cf = linear_entropy(steady_state(_cf_protocol(2, tau, lam, dm(ket(2, 0))))[0])
        worst = max(worst, abs(s_mf - s_mf_o), abs(s_cf - s_cf_o))
    return _result("oracle-grid[clean_qubit_entropies]", worst < ORACLE_TOL, f"worst |sim-oracle| = {worst:.2e}")


def _mf_clean_protocol(tau: float, lam: float) -> FeedbackProtocol:
    return FeedbackProtocol(
        d=2, noise=depolarizing_channel(2, lam), tau1=tau, tau2=tau,
        eta=dm(ket(2, 0)), stage=all_to_target_stage(2, 0),
    )


def check_oracle_eta_entropies(points: int = 100, seed: int = 103) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(points):
        tau, lam = rng.uniform(0.03, 0.97, 2)
        eta0 = rng.uniform(0.0, 1.0)
        eta = controller_state(2, eta0)
        s_mf_o, s_cf_o = oracles.eta_entropies(tau, lam, eta0)
        target = 0 if eta0 >= 0.5 else 1
        pmf = FeedbackProtocol(d=2, noise=depolarizing_channel(2, lam), tau1=tau, tau2=tau,
                               eta=eta, stage=all_to_target_stage(2, target))
        s_mf = linear_entropy(steady_state(pmf)[0])
        s_cf = linear_entropy(steady_state(_cf_protocol(2, tau, lam, eta))[0])
        worst = max(worst, abs(s_mf - s_mf_o), abs(s_cf - s_cf_o))
    return _result("oracle-grid[eta_entropies]", worst < ORACLE_TOL, f"worst |sim-oracle| = {worst:.2e}")


def diagonal_fixed_point_population(p: FeedbackProtocol) -> float:
    """|0> population of the cycle's fixed point within the diagonal sector.

    The map e -> <0|cycle(diag(e, 1-e))|0> is affine; this returns its fixed
    point. Coincides with the unconstrained steady state whenever that state
    is diagonal.
    """
    f0 = cycle_unconditional(np.diag([0.0, 1.0]).astype(complex), p)[0, 0].real
    f1 = cycle_unconditional(np.diag([1.0, 0.0]).astype(complex), p)[0, 0].real
    return f0 / (1.0 - (f1 - f0))


def check_oracle_cf_general(points: int = 100, seed: int = 104) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(points):
        tau, lam = rng.uniform(0.03, 0.97, 2)
        chi, phi1 = rng.uniform(0.0, np.pi, 2)
        p = _cf_protocol(2, tau, lam, dm(ket(2, 0)), qubit_unitary(chi, phi1))
        e1 = diagonal_fixed_point_population(p)
        worst = max(worst, abs(e1 - oracles.cf_clean_general_qubit(tau, lam, chi, phi1)))
    # on the slices where the steady state actually is diagonal, the formula
    # must also match the unconstrained solver
    for _ in range(20):
        tau, lam = rng.uniform(0.05, 0.95, 2)
        phi1 = rng.uniform(0.0, np.pi)
        for chi in (0.0, np.pi / 2, np.pi):
            p = _cf_protocol(2, tau, lam, dm(ket(2, 0)), qubit_unitary(chi, phi1))
            rho, _ = steady_state(p)
            worst = max(worst, abs(rho[0, 0].real - oracles.cf_clean_general_qubit(tau, lam, chi, phi1)))
    return _result("oracle-grid[cf_clean_general_qubit]", worst < ORACLE_TOL, f"worst |sim-oracle| = {worst:.2e}")


def _ad_protocols(tau: float, gamma: float):
    noise = amplitude_damping_channel(gamma)
    eta = maximally_mixed(2)
    p_chi0 = FeedbackProtocol(2, noise, tau, tau, eta, CoherentStage(rotation(0.0)))
    p_chipi2 = FeedbackProtocol(2, noise, tau, tau, eta, CoherentStage(rotation(np.pi / 2)))
    p_mf = FeedbackProtocol(2, noise, tau, tau, eta,
                            ProjectiveStage(feedback=(rotation(np.pi / 2), np.eye(2, dtype=complex))))
    return p_chi0, p_chipi2, p_mf


def check_oracle_ad(points: int = 100, seed: int = 105) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    bool_ok = True
    for _ in range(points):
        tau, gamma = rng.uniform(0.03, 0.97, 2)
        orc = oracles.ad_occupations(tau, gamma)
        sims = [steady_state(q)[0][1, 1].real for q in _ad_protocols(tau, gamma)]
        worst = max(worst, float(np.max(np.abs(np.array(sims) - np.array(orc[:3])))))
        if abs(max(sims[0], sims[1]) - sims[2]) > 1e-7:
            bool_ok &= (max(sims[0], sims[1]) > sims[2]) == orc[4]
    ok = worst < ORACLE_TOL and bool_ok
    return _result("oracle-grid[ad_occupations]", ok, f"worst |sim-oracle| = {worst:.2e}, cf_beats_mf consistent: {bool_ok}")


def check_oracle_bitflip(points: int = 100, seed: int = 106) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for i in range(points):
        tau = rng.uniform(0.0, 1.0)
        if i % 3 == 0:
            a = b = rng.uniform(0.0, 1.0)       # the coherent-feedback line
        elif i % 3 == 1:
            a, b = 1.0, 0.0                      # projective measurement
        else:
            a, b = rng.uniform(0.0, 1.0, 2)
        p = FeedbackProtocol(2, identity_channel(2), tau, tau, maximally_mixed(2),
                             stage=_povm_stage(a, b))
        avg = haar_avg_bitflip_fidelity(p)
        worst = max(worst, abs(avg - oracles.bitflip_fidelity(tau, a, b)))
    return _result("oracle-grid[bitflip_fidelity]", worst < ORACLE_TOL, f"worst |quad-oracle| = {worst:.2e}")


def _povm_stage(a: float, b: float):
    from .loop import PovmStage

    return PovmStage(kraus=bitflip_povm_kraus(a, b))


def check_oracle_conditional(points: int = 100, seed: int = 107) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    ident = 0.0
    for _ in range(points):
        d = int(rng.integers(2, 5))
        tau, lam = rng.uniform(0.03, 0.97, 2)
        alpha_in = rng.uniform(1.0 / d + 1e-3, 0.999)
        rest = (1.0 - alpha_in) / (d - 1)
        rho = np.diag([alpha_in] + [rest] * (d - 1)).astype(complex)
        p = _mf_cooling_protocol(d, tau, lam)
        p0_o, a00_o, a01_o = oracles.conditional_cooling(d, tau, lam, alpha_in)
        branches = conditional_branches(rho, p)
        worst = max(
            worst,
            abs(branches[0][0] - p0_o),
            abs(float(np.linalg.eigvalsh(branches[0][1])[-1]) - a00_o),
            abs(float(np.linalg.eigvalsh(branches[1][1])[-1]) - a01_o),
        )
        # law of total probability: branch-weighted dominant eigenvalue equals
        # the unconditional one-step value
        uncond = cycle_unconditional(rho, p)[0, 0].real
        ident = max(ident, abs(p0_o * a00_o + (1.0 - p0_o) * a01_o - uncond))
    ok = worst < ORACLE_TOL and ident < 1e-12
    return _result("oracle-grid[conditional_cooling]", ok, f"worst |sim-oracle| = {worst:.2e}, mixture identity = {ident:.2e}")


def check_oracle_grids(points: int = 100) -> list[CheckResult]:
    """Criterion 1: every oracle matched by the simulator on a random grid."""
    subchecks = [
        ("mf_noisy_steady", check_oracle_mf_noisy),
        ("cf_clean_steady", check_oracle_cf_clean),
        ("clean_qubit_entropies", check_oracle_clean_entropies),
        ("eta_entropies", check_oracle_eta_entropies),
        ("cf_clean_general_qubit", check_oracle_cf_general),
        ("ad_occupations", check_oracle_ad),
        ("bitflip_fidelity", check_oracle_bitflip),
        ("conditional_cooling", check_oracle_conditional),
    ]
    t0 = time.perf_counter()
    results = []
    for name, fn in subchecks:
        try:
            results.append(fn(points))
        except Exception as exc:  # name the oracle whose pipeline broke
            results.append(_result(f"oracle-grid[{name}]", False, f"raised {type(exc).__name__}: {exc}"))
    elapsed = time.perf_counter() - t0
    results.append(_result("oracle-grid[runtime]", elapsed < 60.0, f"{elapsed:.1f}s (budget 60s)"))
    return results


# --- criterion 2: cooling steady-state spot value --------------------------

def check_steady_spot() -> CheckResult:
    expected = np.array([0.7857142857, 0.2142857143])
    p = _mf_cooling_protocol(2, 0.5, 0.5)
    rho_eig, _ = steady_state(p)
    rho_fix = iterate_to_fixed_point(maximally_mixed(2), p, 1000)
    dev_eig = float(np.max(np.abs(_spectrum(rho_eig) - expected)))
    dev_fix = float(np.max(np.abs(_spectrum(rho_fix) - expected)))
    ok = dev_eig < ORACLE_TOL and dev_fix < ORACLE_TOL
    return _result("steady-spot-value", ok, f"eigensolve dev {dev_eig:.2e}, fixed-point dev {dev_fix:.2e}")


# --- criterion 3: CF no-cooling theorem -----------------------------------

def check_cf_no_cooling(protocols: int = 500, seed: int = 300) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst_drop = 0.0
    worst_ss = 0.0
    for _ in range(protocols):
        d = int(rng.integers(2, 4))
        tau1, tau2 = rng.uniform(0.0, 1.0, 2)
        lam = rng.uniform(0.0, 0.98)
        p = FeedbackProtocol(d=d, noise=depolarizing_channel(d, lam), tau1=tau1, tau2=tau2,
                             eta=maximally_mixed(d), stage=CoherentStage(random_unitary(d, rng)))
        rho = random_density_matrix(d, rng)
        drop = von_neumann_entropy(rho) - von_neumann_entropy(cycle_unconditional(rho, p))
        worst_drop = max(worst_drop, drop)
        rho_ss, _ = steady_state(p)
        worst_ss = max(worst_ss, float(np.max(np.abs(rho_ss - maximally_mixed(d)))))
    ok = worst_drop < 1e-10 and worst_ss < 1e-8
    return _result("cf-no-cooling", ok,
                   f"worst entropy drop {worst_drop:.2e} (tol 1e-10), worst |ss - 1/d| {worst_ss:.2e}")


# --- criterion 4: clean-controller crossover at tau = 1/3 ------------------

def _entropy_gap_clean(tau: float, lam: float) -> float:
    s_mf = linear_entropy(steady_state(_mf_clean_protocol(tau, lam))[0])
    s_cf = linear_entropy(steady_state(_cf_protocol(2, tau, lam, dm(ket(2, 0))))[0])
    return s_mf - s_cf


def check_crossover(lams=(0.1, 0.5, 0.9)) -> CheckResult:
    worst = 0.0
    for lam in lams:
        lo, hi = 0.2, 0.45
        flo = _entropy_gap_clean(lo, lam)
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            fmid = _entropy_gap_clean(mid, lam)
            if (fmid < 0) == (flo < 0):
                lo, flo = mid, fmid
            else:
                hi = mid
            if hi - lo < 1e-12:
                break
        root = 0.5 * (lo + hi)
        worst = max(worst, abs(root - 1.0 / 3.0))
    return _result("crossover-tau-third", worst < ORACLE_TOL, f"worst |tau* - 1/3| = {worst:.2e}")


# --- criterion 5: purity dichotomy at tau = 1/2 ----------------------------

def check_purity_dichotomy(grid: int = 30, lams=(0.05, 0.5, 0.95)) -> CheckResult:
    p_cf = _cf_protocol(2, 0.5, min(lams), dm(ket(2, 0)))
    cf_purity = purity(steady_state(p_cf)[0])
    max_mf = 0.0
    thetas = np.linspace(0.0, np.pi, grid)
    for lam in lams:
        noise = depolarizing_channel(2, lam)
        for th0 in thetas:
            v0 = unitary_mapping(ket(2, 0), np.array([np.cos(th0 / 2), np.sin(th0 / 2)], dtype=complex))
            for th1 in thetas:
                v1 = unitary_mapping(ket(2, 1), np.array([np.cos(th1 / 2), np.sin(th1 / 2)], dtype=complex))
                p = FeedbackProtocol(2, noise, 0.5, 0.5, dm(ket(2, 0)),
                                     ProjectiveStage(feedback=(v0, v1)))
                max_mf = max(max_mf, purity(steady_state(p)[0]))
    ok = cf_purity >= 1.0 - 1e-9 and max_mf < 1.0 - 1e-4
    return _result("purity-dichotomy", ok,
                   f"CF purity {cf_purity:.12f}, max projective-MF purity {max_mf:.6f} over {grid}x{grid}x{len(lams)}")


# --- criterion 6: amplitude-damping comparison -----------------------------

def check_ad_grid(grid: int = 20) -> CheckResult:
    taus = np.linspace(0.03, 0.97, grid)
    gammas = np.linspace(0.03, 0.97, grid)
    worst = 0.0
    boundary_ok = True
    for gamma in gammas:
        signs = []
        tstar = oracles.ad_occupations(0.5, gamma)[3]
        for tau in taus:
            orc = oracles.ad_occupations(tau, gamma)
            sims = [steady_state(q)[0][1, 1].real for q in _ad_protocols(tau, gamma)]
            worst = max(worst, float(np.max(np.abs(np.array(sims) - np.array(orc[:3])))))
            signs.append(max(sims[0], sims[1]) > sims[2])
        # boundary of the CF>MF region matches the threshold within one cell
        flips = [i for i in range(1, grid) if signs[i] != signs[i - 1]]
        step = taus[1] - taus[0]
        if taus[0] < tstar < taus[-1]:
            if len(flips) != 1 or abs(taus[flips[0]] - tstar) > step:
                boundary_ok = False
        elif flips:
            boundary_ok = False
    ok = worst < ORACLE_TOL and boundary_ok
    return _result("ad-occupations-grid", ok,
                   f"worst |sim-oracle| = {worst:.2e} on {grid}x{grid}, boundary matches threshold: {boundary_ok}")


# --- criterion 7: bit-flip fidelities --------------------------------------

def check_bitflip_surface(grid: int = 21) -> CheckResult:
    worst = 0.0
    for tau in np.linspace(0.0, 1.0, 9):
        p_cf = FeedbackProtocol(2, identity_channel(2), tau, tau, maximally_mixed(2), CoherentStage(pauli_x))
        worst = max(worst, abs(haar_avg_bitflip_fidelity(p_cf) - (1.0 - 2.0 * tau / 3.0)))
        p_mf = FeedbackProtocol(2, identity_channel(2), tau, tau, maximally_mixed(2),
                                ProjectiveStage(feedback=(pauli_x, pauli_x)))
        worst = max(worst, abs(haar_avg_bitflip_fidelity(p_mf) - (2.0 / 3.0 - tau / 3.0)))
    tau = 0.5
    vals = np.zeros((grid, grid))
    axis = np.linspace(0.0, 1.0, grid)
    for i, a in enumerate(axis):
        for j, b in enumerate(axis):
            p = FeedbackProtocol(2, identity_channel(2), tau, tau, maximally_mixed(2), _povm_stage(a, b))
            vals[i, j] = haar_avg_bitflip_fidelity(p)
            worst = max(worst, abs(vals[i, j] - oracles.bitflip_fidelity(tau, a, b)))
    off = ~np.eye(grid, dtype=bool)
    argmax_on_diag = np.max(vals[off]) < np.max(np.diag(vals)) - 1e-6
    ok = worst < ORACLE_TOL and argmax_on_diag
    return _result("bitflip-fidelities", ok,
                   f"worst |quad-formula| = {worst:.2e}, argmax on diagonal: {argmax_on_diag}")


# --- criterion 8: conditional statistics -----------------------------------

def check_conditional_statistics(n_traj: int = 10_000, steps: int = 200,
                                 seed: int = 800, threads: int = 4) -> CheckResult:
    d, tau, lam = 2, 0.5, 0.5
    p = _mf_cooling_protocol(d, tau, lam)
    rho_ss, _ = steady_state(p)

    # one-step outcome statistics from a fixed diagonal input
    alpha_in = 0.7
    rho0 = np.diag([alpha_in, 1.0 - alpha_in]).astype(complex)
    ens1 = sample_ensemble(rho0, p, 1, n_traj, seed=seed, threads=threads)
    p0, a00, a01 = oracles.conditional_cooling(d, tau, lam, alpha_in)
    freq = float((ens1.outcomes[:, 0] == 0).mean())
    sigma = np.sqrt(p0 * (1.0 - p0) / n_traj)
    p0_ok = abs(freq - p0) <= 3.0 * sigma
    lead = np.linalg.eigvalsh(ens1.final_states)[:, -1]
    a00_dev = float(np.max(np.abs(lead[ens1.outcomes[:, 0] == 0] - a00)))
    a01_dev = float(np.max(np.abs(lead[ens1.outcomes[:, 0] == 1] - a01)))
    branch_ok = a00_dev < ORACLE_TOL and a01_dev < ORACLE_TOL

    # long-run ensemble: outcome-averaged state equals the unconditional
    # steady state, and every sampled step satisfies the majorisation bound
    ens = sample_ensemble(maximally_mixed(d), p, steps, n_traj, seed=seed + 1,
                          threads=threads, check_majorization=True)
    mean_state = ens.final_states.mean(axis=0)
    sem = ens.final_states.std(axis=0) / np.sqrt(n_traj)
    mean_ok = bool(np.all(np.abs(mean_state - rho_ss) <= 3.0 * np.abs(sem) + 1e-12))
    major_ok = ens.majorization_violation < 1e-9
    ok = p0_ok and branch_ok and mean_ok and major_ok
    return _result(
        "conditional-statistics", ok,
        f"p0 |freq-p0|/sigma = {abs(freq - p0) / sigma:.2f}, branch devs ({a00_dev:.1e}, {a01_dev:.1e}), "
        f"mean-state within 3 sigma: {mean_ok}, majorization violation {ens.majorization_violation:.1e}",
    )


# --- criterion 9: weak-interaction limit -----------------------------------

def check_weak_limit(seed: int = 900) -> CheckResult:
    rng = np.random.default_rng(seed)
    plus = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0)
    p = FeedbackProtocol(2, identity_channel(2), 0.5, 0.5, dm(ket(2, 0)),
                         all_to_target_stage(2, plus))
    defects = [first_order_defect(p, dt) for dt in (1e-2, 5e-3, 2.5e-3)]
    ratios = [defects[0] / defects[1], defects[1] / defects[2]]
    quad_ok = all(abs(r - 4.0) <= 0.4 for r in ratios)

    dims_ok = True
    for d in (2, 3):
        g_cf = [effective_hamiltonian(maximally_mixed(d), CoherentStage(random_unitary(d, rng)))
                for _ in range(3)]
        dims_ok &= lie_closure_dim(g_cf) == 1
        eta = dm(ket(d, 0))
        g_mf = [effective_hamiltonian(eta, _random_povm_stage(d, rng)) for _ in range(2)]
        dims_ok &= lie_closure_dim(g_mf) == d * d
    ok = quad_ok and dims_ok
    return _result("weak-limit", ok,
                   f"defect halving ratios {ratios[0]:.3f}, {ratios[1]:.3f} (want 4±0.4), closure dims ok: {dims_ok}")


def _random_povm_stage(d: int, rng):
    from .loop import PovmStage

    return PovmStage(kraus=random_kraus_channel(d, 2, rng).kraus)


# --- criterion 10: cooling-rate scaling -------------------------------------

def check_cooling_rate(taus=(0.5, 0.75, 0.9), threshold: float = 0.01) -> CheckResult:
    # swap-dominated regime (identity depolariser): iterations to approach the
    # steady entropy grow like 1/(1-tau)
    counts = []
    for tau in taus:
        p = _mf_cooling_protocol(2, tau, 1.0)
        target = von_neumann_entropy(steady_state(p)[0], normalised=True)
        rho = maximally_mixed(2)
        n = 0
        while abs(von_neumann_entropy(rho, normalised=True) - target) >= threshold:
            rho = cycle_unconditional(rho, p)
            n += 1
            if n > 100_000:
                break
        counts.append(n)
    x = np.log([1.0 / (1.0 - t) for t in taus])
    slope = float(np.polyfit(x, np.log(counts), 1)[0])
    ok = abs(slope - 1.0) <= 0.3
    return _result("cooling-rate-scaling", ok, f"iterations {counts}, fitted exponent {slope:.3f} (want 1±0.3)")


# --- criterion 11: determinism ----------------------------------------------

def check_determinism(seed: int = 1100) -> CheckResult:
    p = _mf_cooling_protocol(2, 0.5, 0.5)
    a = sample_ensemble(maximally_mixed(2), p, 40, 50, seed=seed, threads=1)
    b = sample_ensemble(maximally_mixed(2), p, 40, 50, seed=seed, threads=3)
    same = (
        np.array_equal(a.outcomes, b.outcomes)
        and np.array_equal(a.probabilities, b.probabilities)
        and np.array_equal(a.entropies, b.entropies)
        and np.array_equal(a.final_states, b.final_states)
    )
    return _result("determinism", same, "same seed, different thread counts: identical arrays")


CHECK_GROUPS: list[tuple[str, object]] = [
    ("oracle-grid", lambda points: check_oracle_grids(points)),
    ("steady-spot-value", lambda points: [check_steady_spot()]),
    ("cf-no-cooling", lambda points: [check_cf_no_cooling()]),
    ("crossover-tau-third", lambda points: [check_crossover()]),
    ("purity-dichotomy", lambda points: [check_purity_dichotomy()]),
    ("ad-occupations-grid", lambda points: [check_ad_grid()]),
    ("bitflip-fidelities", lambda points: [check_bitflip_surface()]),
    ("conditional-statistics", lambda points: [check_conditional_statistics()]),
    ("weak-limit", lambda points: [check_weak_limit()]),
    ("cooling-rate-scaling", lambda points: [check_cooling_rate()]),
    ("determinism", lambda points: [check_determinism()]),
]


def run_all(points: int = 100, only: str | None = None) -> list[CheckResult]:
    """Run every check (or the groups whose name contains `only`)."""
    groups = CHECK_GROUPS
    if only is not None:
        groups = [(name, fn) for name, fn in CHECK_GROUPS if only in name]
        if not groups:
            raise KeyError(f"no validation check matches {only!r}")
    results: list[CheckResult] = []
    for name, fn in groups:
        try:
            results.extend(fn(points))
        except Exception as exc:  # a broken build should fail its row, not crash
            results.append(_result(name, False, f"raised {type(exc).__name__}: {exc}"))
    return results
