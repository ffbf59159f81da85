"""The feedback cycle: one collision consists of noise on the system, a first
partial-swap collision with the controller, an in-loop stage acting on the
controller alone (a unitary for coherent feedback, a measurement plus
outcome-conditioned unitary for measurement-based feedback, or a general
POVM), a second partial swap, and a reset of the controller.

Provides the unconditional CP map, its superoperator (acting on column-stacked
matrices), the steady state via eigendecomposition with an independent
fixed-point-iteration cross-check, per-outcome conditional branches, and
seeded stochastic trajectory sampling (single trajectories and vectorised
ensembles with identical statistics).

The controller is a single qudit; protocols with composite controllers are
out of scope (the stage types are the extension point).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .linops import HERMITICITY_TOL, hermitize, max_abs
from .quantum import (
    KrausChannel,
    check_density_matrix,
    clean_state,
    ket,
    partial_swap,
    unitary_mapping,
)

PROBABILITY_FLOOR = 1e-15


class DegenerateSteadyStateError(RuntimeError):
    """The cycle superoperator has more than one eigenvalue of unit magnitude."""


def _check_unitary(u: np.ndarray, d: int, what: str) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.shape != (d, d):
        raise ValueError(f"{what} must be {d}x{d}, got {u.shape}")
    dev = max_abs(u.conj().T @ u - np.eye(d))
    if dev > HERMITICITY_TOL:
        raise ValueError(f"{what} is not unitary: max|U†U - 1| = {dev:.3e}")
    return u


@dataclass(frozen=True, eq=False)
class CoherentStage:
    """Coherent feedback: a single unitary applied to the controller in-loop."""

    unitary: np.ndarray

    def controller_ops(self, d: int) -> list[np.ndarray]:
        return [_check_unitary(self.unitary, d, "in-loop unitary")]


@dataclass(frozen=True, eq=False)
class ProjectiveStage:
    """Projective measurement of the controller followed by per-outcome unitaries.

    `basis` holds the measurement basis as columns (identity = computational
    basis); `feedback[j]` is the unitary applied after outcome j.
    """

    feedback: tuple[np.ndarray, ...]
    basis: np.ndarray | None = None

    def controller_ops(self, d: int) -> list[np.ndarray]:
        if len(self.feedback) != d:
            raise ValueError(f"need {d} feedback unitaries, got {len(self.feedback)}")
        b = np.eye(d, dtype=complex) if self.basis is None else _check_unitary(self.basis, d, "measurement basis")
        ops = []
        for j, v in enumerate(self.feedback):
            vj = _check_unitary(v, d, f"feedback unitary {j}")
            proj = np.outer(b[:, j], b[:, j].conj())
            ops.append(vj @ proj)
        return ops


@dataclass(frozen=True, eq=False)
class PovmStage:
    """General in-loop POVM with Kraus operators K_j (feedback unitaries absorbed)."""

    kraus: tuple[np.ndarray, ...]

    def controller_ops(self, d: int) -> list[np.ndarray]:
        ch = KrausChannel(d, tuple(self.kraus))  # re-validates completeness
        return list(ch.kraus)


InLoopStage = CoherentStage | ProjectiveStage | PovmStage


def all_to_target_stage(d: int, target: np.ndarray | int = 0) -> ProjectiveStage:
    """Projective stage that maps every measurement outcome to the same state.

    This is the optimal cooling feedback: measure in the computational basis
    and re-prepare the controller in `target` regardless of the outcome.
    """
    tgt = ket(d, target) if isinstance(target, int) else np.asarray(target, dtype=complex)
    vs = tuple(unitary_mapping(ket(d, j), tgt) for j in range(d))
    return ProjectiveStage(feedback=vs)


@dataclass(frozen=True, eq=False)
class FeedbackProtocol:
    """Everything defining one feedback collision.

    d: system (= controller) dimension; noise: the CP map hitting the system
    at the start of each cycle; tau1/tau2: transmissivities of the two partial
    swaps; eta: controller reset state; stage: the in-loop operation.
    """

    d: int
    noise: KrausChannel
    tau1: float
    tau2: float
    eta: np.ndarray
    stage: InLoopStage
    # joint-space operators, precomputed once per protocol
    _u1: np.ndarray = field(init=False, repr=False, compare=False)
    _u2: np.ndarray = field(init=False, repr=False, compare=False)
    _mids: tuple[np.ndarray, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        d = self.d
        if self.noise.dim != d:
            raise ValueError(f"noise channel dim {self.noise.dim} != {d}")
        for name, t in (("tau1", self.tau1), ("tau2", self.tau2)):
            if not 0.0 <= t <= 1.0:
                raise ValueError(f"{name} must be in [0,1], got {t}")
        eta = check_density_matrix(self.eta, what="controller reset state")
        object.__setattr__(self, "eta", eta)
        u1 = partial_swap(d, self.tau1)
        u2 = partial_swap(d, self.tau2)
        eye = np.eye(d, dtype=complex)
        mids = tuple(np.kron(eye, m) @ u1 for m in self.stage.controller_ops(d))
        object.__setattr__(self, "_u1", u1)
        object.__setattr__(self, "_u2", u2)
        object.__setattr__(self, "_mids", mids)

    @property
    def n_outcomes(self) -> int:
        return len(self._mids)


def _apply_noise_batch(states: np.ndarray, noise: KrausChannel) -> np.ndarray:
    out = np.zeros_like(states)
    for k in noise.kraus:
        out += np.einsum("ab,nbc,dc->nad", k, states, k.conj(), optimize=True)
    return out


def _joint_batch(states: np.ndarray, eta: np.ndarray) -> np.ndarray:
    n, d, _ = states.shape
    joint = np.einsum("nab,ce->nacbe", states, eta)
    return joint.reshape(n, d * d, d * d)


def _ptrace_controller_batch(joint: np.ndarray, d: int) -> np.ndarray:
    n = joint.shape[0]
    return np.einsum("nacbc->nab", joint.reshape(n, d, d, d, d))


def _mid_branches(states: np.ndarray, p: FeedbackProtocol) -> list[np.ndarray]:
    """Unnormalised joint states after noise, first swap and in-loop branch j."""
    noisy = _apply_noise_batch(states, p.noise)
    joint = _joint_batch(noisy, p.eta)
    return [m @ joint @ m.conj().T for m in p._mids]


def _cycle_raw_batch(states: np.ndarray, p: FeedbackProtocol) -> np.ndarray:
    """The linear cycle map applied to a batch of matrices, no validation or hygiene."""
    out = 0
    for mid in _mid_branches(states, p):
        fin = p._u2 @ mid @ p._u2.conj().T
        out = out + _ptrace_controller_batch(fin, p.d)
    return out


def cycle_unconditional(rho: np.ndarray, p: FeedbackProtocol) -> np.ndarray:
    """One unconditional feedback collision (measurement outcomes averaged over)."""
    rho = check_density_matrix(rho)
    if rho.shape != (p.d, p.d):
        raise ValueError(f"state shape {rho.shape} does not match protocol d={p.d}")
    out = _cycle_raw_batch(rho[None], p)[0]
    return clean_state(out)


def conditional_branches(rho: np.ndarray, p: FeedbackProtocol) -> list[tuple[float, np.ndarray]]:
    """Per-outcome (probability, normalised post-cycle system state)."""
    rho = check_density_matrix(rho)
    branches = []
    for mid in _mid_branches(rho[None], p):
        prob = float(np.einsum("naa->n", mid).real[0])
        fin = p._u2 @ mid @ p._u2.conj().T
        sys = _ptrace_controller_batch(fin, p.d)[0]
        if prob > PROBABILITY_FLOOR:
            branches.append((prob, clean_state(sys / prob)))
        else:
            branches.append((max(prob, 0.0), np.full((p.d, p.d), np.nan)))
    return branches


def stack(rho: np.ndarray) -> np.ndarray:
    """Column-stack a matrix into a vector (Fortran order)."""
    return np.asarray(rho, dtype=complex).flatten(order="F")


def unstack(vec: np.ndarray, d: int) -> np.ndarray:
    return np.asarray(vec, dtype=complex).reshape(d, d, order="F")


@dataclass(frozen=True, eq=False)
class Superoperator:
    """d²xd² matrix of one unconditional cycle, acting on column-stacked states."""

    d: int
    matrix: np.ndarray

    def __post_init__(self):
        n = self.d * self.d
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (n, n):
            raise ValueError(f"superoperator must be {n}x{n}, got {m.shape}")
        # trace preservation: the stacked identity is a left fixed vector
        left = stack(np.eye(self.d)) @ m
        dev = max_abs(left - stack(np.eye(self.d)))
        if dev > 1e-10:
            raise ValueError(f"superoperator does not preserve trace: deviation {dev:.3e}")
        object.__setattr__(self, "matrix", m)

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return unstack(self.matrix @ stack(rho), self.d)


def build_superoperator(p: FeedbackProtocol) -> Superoperator:
    """Assemble the cycle superoperator column by column from matrix units."""
    d = p.d
    units = np.zeros((d * d, d, d), dtype=complex)
    for j in range(d):       # column-stacking: basis vector i + d*j is |i><j|
        for i in range(d):
            units[i + d * j, i, j] = 1.0
    images = _cycle_raw_batch(units, p)
    cols = [stack(images[k]) for k in range(d * d)]
    return Superoperator(d, np.column_stack(cols))


def steady_state(p: FeedbackProtocol) -> tuple[np.ndarray, float]:
    """Fixed point of the unconditional cycle and the spectral gap 1 - |λ₂|.

    Solved by full eigendecomposition of the cycle superoperator, taking the
    eigenvector of the eigenvalue nearest 1. Raises DegenerateSteadyStateError
    when a second eigenvalue sits within 1e-8 of unit magnitude.
    """
    sop = build_superoperator(p)
    evals, evecs = np.linalg.eig(sop.matrix)
    order = np.argsort(-np.abs(evals))
    mags = np.abs(evals[order])
    if len(mags) > 1 and mags[1] > 1.0 - 1e-8:
        raise DegenerateSteadyStateError(
            f"second eigenvalue magnitude {mags[1]:.12f} is within 1e-8 of 1; "
            "the steady state is not unique"
        )
    gap = float(1.0 - mags[1]) if len(mags) > 1 else 1.0
    v = evecs[:, int(np.argmin(np.abs(evals - 1.0)))]
    rho = hermitize(unstack(v, p.d), tol=np.inf)
    rho = rho / np.trace(rho).real
    return clean_state(rho), gap


def iterate_to_fixed_point(
    rho0: np.ndarray, p: FeedbackProtocol, steps: int
) -> np.ndarray:
    """Apply the unconditional cycle `steps` times; independent steady-state path."""
    rho = check_density_matrix(rho0)
    for _ in range(steps):
        rho = cycle_unconditional(rho, p)
    return rho


@dataclass(frozen=True, eq=False)
class TrajectoryRecord:
    """One step of a conditional run: outcome index, its probability, the
    post-cycle system state and its base-d normalised von Neumann entropy."""

    step: int
    outcome: int
    probability: float
    state: np.ndarray
    entropy: float


def _trajectory_uniforms(seed: int, index: int, steps: int) -> np.ndarray:
    # counter-based per-trajectory stream: ensembles are reproducible and
    # order-independent no matter how they are chunked across workers
    return np.random.default_rng((seed, index)).random(steps)


def sample_trajectory(
    rho0: np.ndarray,
    p: FeedbackProtocol,
    steps: int,
    seed: int,
    trajectory_index: int = 0,
) -> list[TrajectoryRecord]:
    """One conditional (filtered) trajectory of `steps` cycles.

    Outcomes are drawn by inverse CDF over the branch probabilities using the
    per-trajectory stream derived from (seed, trajectory_index). Coherent
    stages are deterministic: outcome 0 with probability 1.
    """
    rho = check_density_matrix(rho0)
    uniforms = _trajectory_uniforms(seed, trajectory_index, steps)
    records = []
    for step in range(1, steps + 1):
        branches = conditional_branches(rho, p)
        probs = np.array([b[0] for b in branches])
        cum = np.cumsum(probs)
        j = int(np.searchsorted(cum, uniforms[step - 1] * cum[-1], side="right"))
        j = min(j, len(branches) - 1)
        if probs[j] <= PROBABILITY_FLOOR:
            raise RuntimeError(f"sampled branch {j} with probability {probs[j]:.3e}")
        rho = branches[j][1]
        records.append(
            TrajectoryRecord(
                step=step,
                outcome=j,
                probability=float(probs[j]),
                state=rho,
                entropy=float(_entropy_batch(np.linalg.eigvalsh(rho), p.d)),
            )
        )
    return records


@dataclass
class EnsembleResult:
    """Arrays indexed (trajectory, step); final_states is (trajectory, d, d)."""

    outcomes: np.ndarray
    probabilities: np.ndarray
    entropies: np.ndarray
    rho11: np.ndarray
    final_states: np.ndarray
    majorization_violation: float | None = None


def _entropy_batch(w: np.ndarray, d: int) -> np.ndarray:
    w = np.clip(w, 0.0, 1.0)
    terms = np.where(w > 0.0, -w * np.log(np.where(w > 0.0, w, 1.0)), 0.0)
    return terms.sum(axis=-1) / np.log(d)


def _hygiene_batch(states: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Batched per-cycle hygiene; returns cleaned states and their spectra (ascending)."""
    states = 0.5 * (states + np.conj(np.swapaxes(states, -1, -2)))
    w, v = np.linalg.eigh(states)
    if float(w.min()) < -1e-8:
        raise ValueError(f"trajectory state eigenvalue {w.min():.3e} below -1e-8")
    w = np.clip(w, 0.0, None)
    w /= w.sum(axis=-1, keepdims=True)
    states = np.einsum("nij,nj,nkj->nik", v, w, v.conj(), optimize=True)
    return states, w


def _run_chunk(
    rho0: np.ndarray,
    p: FeedbackProtocol,
    steps: int,
    seed: int,
    indices: range,
    check_majorization: bool,
) -> EnsembleResult:
    n, d = len(indices), p.d
    uniforms = np.stack([_trajectory_uniforms(seed, i, steps) for i in indices])
    states = np.broadcast_to(rho0, (n, d, d)).copy()
    outcomes = np.zeros((n, steps), dtype=np.int64)
    probabilities = np.zeros((n, steps))
    entropies = np.zeros((n, steps))
    rho11 = np.zeros((n, steps))
    worst = -np.inf
    rows = np.arange(n)
    for t in range(steps):
        mids = _mid_branches(states, p)
        probs = np.stack([np.einsum("naa->n", m).real for m in mids], axis=1)
        cum = np.cumsum(probs, axis=1)
        u = uniforms[:, t] * cum[:, -1]
        chosen = (u[:, None] >= cum).sum(axis=1)
        np.clip(chosen, 0, len(mids) - 1, out=chosen)
        pj = probs[rows, chosen]
        if float(pj.min()) <= PROBABILITY_FLOOR:
            raise RuntimeError("sampled a branch with probability below the floor")
        mid = np.stack(mids)[chosen, rows] / pj[:, None, None]
        if check_majorization:
            rho_j = _ptrace_controller_batch(mid, d)
            w_mid = np.sort(np.linalg.eigvalsh(0.5 * (rho_j + np.conj(np.swapaxes(rho_j, 1, 2)))), axis=1)[:, ::-1]
        fin = p._u2 @ mid @ p._u2.conj().T
        states, spectra = _hygiene_batch(_ptrace_controller_batch(fin, d))
        if check_majorization:
            # spectrum of the branch output must be majorized by
            # tau2 * spectrum(rho_j) + (1 - tau2) * (pure spectrum)
            bound = p.tau2 * w_mid
            bound[:, 0] += 1.0 - p.tau2
            viol = np.cumsum(np.sort(spectra, axis=1)[:, ::-1], axis=1) - np.cumsum(bound, axis=1)
            worst = max(worst, float(viol.max()))
        outcomes[:, t] = chosen
        probabilities[:, t] = pj
        entropies[:, t] = _entropy_batch(spectra, d)
        rho11[:, t] = states[:, 1, 1].real
    return EnsembleResult(
        outcomes=outcomes,
        probabilities=probabilities,
        entropies=entropies,
        rho11=rho11,
        final_states=states,
        majorization_violation=worst if check_majorization else None,
    )


def sample_ensemble(
    rho0: np.ndarray,
    p: FeedbackProtocol,
    steps: int,
    n_traj: int,
    seed: int,
    threads: int = 1,
    check_majorization: bool = False,
) -> EnsembleResult:
    """Sample n_traj conditional trajectories; identical to looping
    sample_trajectory with trajectory_index = 0..n_traj-1, but vectorised.

    With threads > 1 the ensemble is chunked across a worker pool; results do
    not depend on the chunking because every trajectory owns its seed stream.
    """
    rho0 = check_density_matrix(rho0)
    if threads <= 1 or n_traj < 2 * threads:
        return _run_chunk(rho0, p, steps, seed, range(n_traj), check_majorization)
    bounds = np.linspace(0, n_traj, threads + 1, dtype=int)
    chunks = [range(a, b) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
    with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
        parts = list(pool.map(
            lambda idx: _run_chunk(rho0, p, steps, seed, idx, check_majorization), chunks
        ))
    viol = None
    if check_majorization:
        viol = max(pt.majorization_violation for pt in parts)
    return EnsembleResult(
        outcomes=np.concatenate([pt.outcomes for pt in parts]),
        probabilities=np.concatenate([pt.probabilities for pt in parts]),
        entropies=np.concatenate([pt.entropies for pt in parts]),
        rho11=np.concatenate([pt.rho11 for pt in parts]),
        final_states=np.concatenate([pt.final_states for pt in parts]),
        majorization_violation=viol,
    )
