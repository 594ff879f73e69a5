"""Monte Carlo trial orchestration and exact outcome-tree enumeration.

Two modes: the failure-branch protocol (parity measurements on the two-level
failure copies) and the naive protocol (three-outcome MUB measurements on
received copies).  Measurement outcomes are always sampled by inverse CDF on
the exact likelihood at the true phase; the grid only ever carries the
posterior, so sampling is free of discretization bias.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import backend
from ._kernels_numpy import distance_from_moments_single
from .channel import SUCCESS, FAILURE, build_osbp, failure_branch_state, osbp_branch
from .closed_forms import FLAT_DISTANCE
from .estimation import (
    ADAPTIVE,
    ALTERNATING,
    EVEN,
    FIXED,
    ODD,
    ROTATING,
    StrategySpec,
    bayes_update,
    estimate_phase_default,
    mub_coefficients,
    mub_likelihood_from_amps,
    next_measurement,
    parity_likelihood,
)
from .phase_space import (
    GhzPhaseState,
    PhaseDistribution,
    TwoParamQutrit,
    circular_moment,
    corrected_state,
    ghz_projector,
    grid_angles,
    trace_distance,
)

FAILURE_BRANCH = "failure-branch"
NAIVE = "naive"
RECEIVED = "received"
STORED = "stored"
SUCCESS_MEASURED = "success-measured"

_SUCCESS_TAGS = (SUCCESS, STORED, SUCCESS_MEASURED)

STRATEGY_CODES = {FIXED: 0, ALTERNATING: 1, ROTATING: 2, ADAPTIVE: 3}

DEFAULT_ENUMERATION_BUDGET = 100_000_000


class BudgetError(RuntimeError):
    """Exact enumeration would exceed the configured work budget."""


def _validate_grid_size(grid_size: int) -> None:
    if grid_size < 256 or grid_size & (grid_size - 1):
        raise ValueError("grid size must be a power of two, at least 256")


@dataclass(frozen=True)
class TrialConfig:
    """One experiment description, shared by trials and curve aggregation.

    In failure-branch mode `copies` counts failure-branch measurement rounds
    (the curves' k_f); success draws are logged but consume no estimation
    budget.  In naive mode `copies` counts received copies measured (k_e).
    """

    mode: str
    copies: int
    strategy: StrategySpec = StrategySpec(ADAPTIVE)
    a: float | None = None
    params: TwoParamQutrit | None = None
    parties: int = 2
    grid_size: int = 1024
    master_seed: int = 0
    trials: int = 1

    def __post_init__(self) -> None:
        if self.mode not in (FAILURE_BRANCH, NAIVE):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.copies < 0:
            raise ValueError("copies must be non-negative")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.parties < 2:
            raise ValueError("parties must be at least 2")
        _validate_grid_size(self.grid_size)
        if self.mode == NAIVE:
            if self.params is None:
                raise ValueError("naive mode needs vendor parameters")
        elif (self.a is None) == (self.params is None):
            raise ValueError("failure-branch mode needs exactly one of a or params")


def effective_a(cfg: TrialConfig) -> float:
    """Failure-branch amplitude: given directly, or derived from the vendor state."""
    if cfg.a is not None:
        return cfg.a
    params = cfg.params
    state = GhzPhaseState(params.amps, 0.0, cfg.parties)
    return failure_branch_state(state, build_osbp(params)).a


@dataclass(frozen=True)
class CopyRecord:
    branch: str
    outcome: int | None
    offset: float
    moment_modulus: float
    estimate: float


@dataclass(frozen=True)
class RunRecord:
    """Per-copy log of one trial plus the distances after each update."""

    entries: tuple[CopyRecord, ...]
    distances: tuple[float, ...]
    final_distance: float
    success_count: int
    failure_count: int

    def __post_init__(self) -> None:
        succ = sum(1 for e in self.entries if e.branch in _SUCCESS_TAGS)
        fail = sum(1 for e in self.entries if e.branch == FAILURE)
        if succ != self.success_count or fail != self.failure_count:
            raise ValueError("branch counts must match the logged entries")


@dataclass(frozen=True)
class CurvePoint:
    x: float
    mean_distance: float
    stderr: float
    label: str = ""

    def __post_init__(self) -> None:
        if self.stderr < 0.0:
            raise ValueError("stderr must be non-negative")


def _posterior_stats(posterior: PhaseDistribution) -> tuple[float, float, float]:
    """(modulus of first moment, estimate, corrected distance to GHZ_3)."""
    m1 = circular_moment(posterior, 1)
    est = estimate_phase_default(posterior)
    dist = trace_distance(corrected_state(posterior, est, 3), ghz_projector(3))
    return abs(m1), est, dist


def run_failure_branch_trial(cfg: TrialConfig, true_phi: float, seed: int) -> RunRecord:
    """One trial: OSBP branching plus parity estimation on failure copies.

    Runs until `copies` failure measurements are recorded.  Conditioning on
    the failure count is statistically clean because branch outcomes are
    independent of the phase and of all measurement outcomes.
    """
    if cfg.mode != FAILURE_BRANCH:
        raise ValueError("config is not in failure-branch mode")
    rng = np.random.default_rng(seed)
    posterior = PhaseDistribution.flat(cfg.grid_size)
    est = 0.0
    entries: list[CopyRecord] = []
    distances: list[float] = []
    ops = build_osbp(cfg.params) if cfg.params is not None else None
    n_success = 0
    n_failure = 0
    while n_failure < cfg.copies:
        if ops is not None:
            state = GhzPhaseState(cfg.params.amps, true_phi, cfg.parties)
            branch = osbp_branch(state, ops, rng.random())
            if branch.tag == SUCCESS:
                n_success += 1
                mod = abs(circular_moment(posterior, 1))
                entries.append(CopyRecord(SUCCESS, None, 0.0, mod, est))
                continue
            a_copy = branch.failure_state.a
            phi_copy = branch.failure_state.phi
        else:
            a_copy = cfg.a
            phi_copy = true_phi
        meas = next_measurement(cfg.strategy, n_failure, est)
        p_even = parity_likelihood(EVEN, phi_copy, a_copy, meas.chi)
        m = EVEN if rng.random() < p_even else ODD
        posterior = bayes_update(
            posterior,
            lambda x, m=m, a_copy=a_copy, chi=meas.chi: parity_likelihood(m, x, a_copy, chi),
        )
        mod, est, dist = _posterior_stats(posterior)
        distances.append(dist)
        entries.append(CopyRecord(FAILURE, m, meas.chi, mod, est))
        n_failure += 1
    final = distances[-1] if distances else FLAT_DISTANCE
    return RunRecord(tuple(entries), tuple(distances), final, n_success, n_failure)


def run_naive_trial(cfg: TrialConfig, true_phi: float, seed: int) -> RunRecord:
    """One trial of the naive protocol: MUB measurements on received copies."""
    if cfg.mode != NAIVE:
        raise ValueError("config is not in naive mode")
    rng = np.random.default_rng(seed)
    posterior = PhaseDistribution.flat(cfg.grid_size)
    est = 0.0
    cs, cd = mub_coefficients(cfg.params.amps)
    entries: list[CopyRecord] = []
    distances: list[float] = []
    for _ in range(cfg.copies):
        nu = (est + math.pi / 3.0) % (2.0 * math.pi)
        probs = [mub_likelihood_from_amps(l, true_phi, cs, cd, nu) for l in range(3)]
        u = rng.random()
        outcome = 0 if u < probs[0] else (1 if u < probs[0] + probs[1] else 2)
        posterior = bayes_update(
            posterior,
            lambda x, l=outcome, nu=nu: mub_likelihood_from_amps(l, x, cs, cd, nu),
        )
        mod, est, dist = _posterior_stats(posterior)
        distances.append(dist)
        entries.append(CopyRecord(RECEIVED, outcome, nu, mod, est))
    final = distances[-1] if distances else FLAT_DISTANCE
    return RunRecord(tuple(entries), tuple(distances), final, 0, 0)


def average_over_prior(cfg: TrialConfig, label: str = "") -> list[CurvePoint]:
    """Distance-vs-copies curve under a flat prior on the true phase.

    All randomness is pre-drawn from the master seed in one stream and handed
    to the kernels row by row, so the result is independent of the backend's
    threading and scheduling.
    """
    rng = np.random.default_rng(cfg.master_seed)
    phis_true = rng.uniform(0.0, 2.0 * np.pi, cfg.trials)
    u = rng.random((cfg.trials, cfg.copies))
    points = [CurvePoint(0, FLAT_DISTANCE, 0.0, label)]
    if cfg.copies == 0:
        return points
    backend.configure_threads()
    kern = backend.kernels()
    if cfg.mode == FAILURE_BRANCH:
        a = effective_a(cfg)
        b = a * math.sqrt(1.0 - a * a)
        code = STRATEGY_CODES[cfg.strategy.kind]
        dists = kern.parity_curve(u, phis_true, b, code,
                                  cfg.strategy.rotating_step, cfg.grid_size)
    else:
        cs, cd = mub_coefficients(cfg.params.amps)
        dists = kern.mub_curve(u, phis_true, cs, cd, cfg.grid_size)
    for j in range(cfg.copies):
        col = dists[:, j]
        mean = float(col.mean())
        se = float(col.std(ddof=1) / math.sqrt(cfg.trials)) if cfg.trials > 1 else 0.0
        points.append(CurvePoint(j + 1, mean, se, label))
    return points


def enumerate_exact(cfg: TrialConfig, label: str = "",
                    budget: int = DEFAULT_ENUMERATION_BUDGET) -> list[CurvePoint]:
    """Exact distance-vs-copies curve by summing every outcome sequence.

    Walks the outcome tree carrying unnormalized posterior mass, so adaptive
    offsets see exactly the posterior the sampled protocol would have seen.
    The flat-prior phase integral is the grid rectangle rule, which is exact
    here because every integrand is a trigonometric polynomial of degree far
    below the grid size.
    """
    outcomes = 2 if cfg.mode == FAILURE_BRANCH else 3
    work = outcomes ** cfg.copies * cfg.grid_size
    if work > budget:
        raise BudgetError(
            f"enumeration needs {work} grid-weight operations, budget is {budget}"
        )
    points = [CurvePoint(0, FLAT_DISTANCE, 0.0, label)]
    if cfg.copies == 0:
        return points
    phis = grid_angles(cfg.grid_size)
    e1 = np.exp(1j * phis)
    e2 = np.exp(2j * phis)
    curve = np.zeros(cfg.copies)
    if cfg.mode == FAILURE_BRANCH:
        a = effective_a(cfg)
        def branch_likelihoods(depth: int, est: float) -> list[np.ndarray]:
            chi = next_measurement(cfg.strategy, depth, est).chi
            return [np.asarray(parity_likelihood(m, phis, a, chi)) for m in (EVEN, ODD)]
    else:
        cs, cd = mub_coefficients(cfg.params.amps)
        def branch_likelihoods(depth: int, est: float) -> list[np.ndarray]:
            nu = (est + math.pi / 3.0) % (2.0 * math.pi)
            return [np.asarray(mub_likelihood_from_amps(l, phis, cs, cd, nu))
                    for l in range(3)]

    def visit(w: np.ndarray, depth: int, est: float) -> None:
        if depth == cfg.copies:
            return
        for lik in branch_likelihoods(depth, est):
            w_child = w * lik
            p_child = float(w_child.sum())
            if p_child <= 0.0:
                continue
            post = w_child / p_child
            m1 = complex(post @ e1)
            m2 = complex(post @ e2)
            est_child = float(np.angle(m1)) if abs(m1) > 1e-12 else 0.0
            curve[depth] += p_child * distance_from_moments_single(m1, m2, est_child)
            visit(w_child, depth + 1, est_child)

    visit(np.full(cfg.grid_size, 1.0 / cfg.grid_size), 0, 0.0)
    for j in range(cfg.copies):
        points.append(CurvePoint(j + 1, float(curve[j]), 0.0, label))
    return points
