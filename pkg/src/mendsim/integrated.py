"""Metrology-integrated conversion loop.

Each incoming copy is corrected by the running estimate and offered to a
measurement interpolated between the trivial {1, 0} pair and the full
conversion operators; the interpolation weight is the posterior's first
circular-moment modulus, so a vague posterior converts cautiously and a
sharp one converts at full strength.  Success copies close enough to the
target (posterior-averaged overlap at least 1 - epsilon) are stored;
everything else is measured and feeds the posterior.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import OsbpOperators, build_osbp, failure_branch_state
from .estimation import (
    ADAPTIVE,
    EVEN,
    ODD,
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
    trace_distance,
)
from .runner import (
    FAILURE,
    STORED,
    SUCCESS_MEASURED,
    CopyRecord,
    RunRecord,
)
from .closed_forms import FLAT_DISTANCE

DEFAULT_EPSILON = 0.05


@dataclass(frozen=True)
class StoredCopy:
    """A success copy that passed the storage criterion when it arrived."""

    copy_index: int
    operators: OsbpOperators
    estimate_at_storage: float
    criterion_value: float
    kept_after_final_check: bool = True


@dataclass(frozen=True)
class IntegratedState:
    posterior: PhaseDistribution
    estimate: float
    stored: tuple[StoredCopy, ...]
    rounds: int


def averaged_success_operator(posterior: PhaseDistribution, estimate: float,
                              params: TwoParamQutrit) -> OsbpOperators:
    """Posterior-adapted conversion operators for the diagonal phase family.

    The full operators commute with every phase, so a literal average would
    be phase-blind; the posterior instead sets the conversion strength
    through its first-moment modulus, from {1, 0} at a flat posterior to the
    full operators at a point mass.  The estimate does not enter because the
    diagonal family is unchanged by the phase correction.
    """
    weight = abs(circular_moment(posterior, 1))
    full = build_osbp(params)
    s = (1.0 - weight) + weight * full.success_diag
    s = np.minimum(s, 1.0)
    f = np.sqrt(np.maximum(0.0, 1.0 - s * s))
    p = float(np.sum((params.amps * s) ** 2))
    return OsbpOperators(s, f, min(1.0, p))


def storage_overlap(posterior: PhaseDistribution, estimate: float,
                    ops: OsbpOperators, params: TwoParamQutrit) -> float:
    """Posterior-averaged squared overlap with the GHZ target.

    For each candidate phase: dephase the vendor amplitudes, correct by the
    estimate, apply the success operator, renormalize, project on GHZ_3.
    """
    amps = params.amps
    s = ops.success_diag
    norm_sq = float(np.sum((amps * s) ** 2))
    if norm_sq <= 0.0:
        raise ValueError("success operator annihilates the state")
    delta = posterior.phis - estimate
    levels = np.arange(3)
    z = (s * amps) @ np.exp(1j * np.outer(levels, delta)) / math.sqrt(3.0)
    fidelity = np.abs(z) ** 2 / norm_sq
    return float(np.sum(posterior.weights * fidelity))


def storage_criterion(posterior: PhaseDistribution, estimate: float,
                      ops: OsbpOperators, epsilon: float,
                      params: TwoParamQutrit) -> bool:
    """True when the stored copy would be within epsilon of the target."""
    if not 0.0 < epsilon <= 1.0:
        raise ValueError("epsilon must lie in (0, 1]")
    return storage_overlap(posterior, estimate, ops, params) >= 1.0 - epsilon


def run_integrated(k: int, epsilon: float, params: TwoParamQutrit, true_phi: float,
                   seed: int, prior: PhaseDistribution | None = None,
                   grid_size: int = 4096) -> tuple[IntegratedState, RunRecord]:
    """Run the integrated loop over k copies at the (unknown) true phase.

    Success copies failing the storage criterion are measured in the
    three-outcome MUB of the partially converted state; failure copies are
    measured as two-level parity with the adaptive offset.  After the last
    copy every stored copy is re-checked against the final posterior.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if not 0.0 < epsilon <= 1.0:
        raise ValueError("epsilon must lie in (0, 1]")
    rng = np.random.default_rng(seed)
    posterior = prior if prior is not None else PhaseDistribution.flat(grid_size)
    est = estimate_phase_default(posterior)
    adaptive = StrategySpec(ADAPTIVE)
    entries: list[CopyRecord] = []
    distances: list[float] = []
    stored: list[StoredCopy] = []
    n_success = 0
    n_failure = 0
    for i in range(k):
        ops = averaged_success_operator(posterior, est, params)
        if rng.random() < ops.p_success:
            n_success += 1
            value = storage_overlap(posterior, est, ops, params)
            if value >= 1.0 - epsilon:
                stored.append(StoredCopy(i, ops, est, value))
                entries.append(CopyRecord(STORED, None, est,
                                          abs(circular_moment(posterior, 1)), est))
                continue
            post_amps = params.amps * ops.success_diag
            post_amps = post_amps / np.linalg.norm(post_amps)
            cs, cd = mub_coefficients(post_amps)
            nu = (est + math.pi / 3.0) % (2.0 * math.pi)
            probs = [mub_likelihood_from_amps(l, true_phi, cs, cd, nu) for l in range(3)]
            u = rng.random()
            outcome = 0 if u < probs[0] else (1 if u < probs[0] + probs[1] else 2)
            posterior = bayes_update(
                posterior,
                lambda x, l=outcome, cs=cs, cd=cd, nu=nu: mub_likelihood_from_amps(l, x, cs, cd, nu),
            )
            tag = SUCCESS_MEASURED
            offset = nu
        else:
            n_failure += 1
            fb = failure_branch_state(GhzPhaseState(params.amps, true_phi, 2), ops)
            chi = next_measurement(adaptive, i, est).chi
            p_even = parity_likelihood(EVEN, fb.phi, fb.a, chi)
            outcome = EVEN if rng.random() < p_even else ODD
            posterior = bayes_update(
                posterior,
                lambda x, m=outcome, a=fb.a, chi=chi: parity_likelihood(m, x, a, chi),
            )
            tag = FAILURE
            offset = chi
        est = estimate_phase_default(posterior)
        mod = abs(circular_moment(posterior, 1))
        dist = trace_distance(corrected_state(posterior, est, 3), ghz_projector(3))
        distances.append(dist)
        entries.append(CopyRecord(tag, outcome, offset, mod, est))
    checked = tuple(
        StoredCopy(
            c.copy_index, c.operators, c.estimate_at_storage, c.criterion_value,
            storage_overlap(posterior, est, c.operators, params) >= 1.0 - epsilon,
        )
        for c in stored
    )
    state = IntegratedState(posterior, est, checked, k)
    final = distances[-1] if distances else FLAT_DISTANCE
    record = RunRecord(tuple(entries), tuple(distances), final, n_success, n_failure)
    return state, record


def stored_fraction_halves(records: list[RunRecord]) -> tuple[float, float]:
    """Stored-copy fraction in the first and second half of each run, averaged."""
    firsts = []
    seconds = []
    for rec in records:
        n = len(rec.entries)
        half = n // 2
        tags = [e.branch for e in rec.entries]
        firsts.append(tags[:half].count(STORED) / max(1, half))
        seconds.append(tags[half:].count(STORED) / max(1, n - half))
    return float(np.mean(firsts)), float(np.mean(seconds))
