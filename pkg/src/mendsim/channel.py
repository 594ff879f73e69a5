"""Dephasing channel, one-successful-branch protocol (OSBP), conversion bound.

The OSBP measurement operators are diagonal in the dephasing eigenbasis, so
they commute with the channel: branch probabilities never depend on the
accumulated phase, and the phase survives both branches intact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .phase_space import (
    AMP_NORM_TOL,
    FailureBranchState,
    GhzPhaseState,
    TwoParamQutrit,
    wrap_phase,
)

SUCCESS = "success"
FAILURE = "failure"

COMPLETENESS_TOL = 1e-12
# Failure levels below this amplitude are treated as unpopulated.
LEVEL_PRUNE_TOL = 1e-9


@dataclass(frozen=True)
class OsbpOperators:
    """Diagonals of the success and failure measurement operators.

    Completeness M_s^dag M_s + M_f^dag M_f = 1 holds entrywise:
    success_diag[l]^2 + failure_diag[l]^2 = 1.
    """

    success_diag: np.ndarray
    failure_diag: np.ndarray
    p_success: float

    def __post_init__(self) -> None:
        s = np.ascontiguousarray(self.success_diag, dtype=float)
        f = np.ascontiguousarray(self.failure_diag, dtype=float)
        if s.shape != f.shape or s.ndim != 1:
            raise ValueError("success and failure diagonals must be equal-length vectors")
        if np.any(s < 0.0) or np.any(f < 0.0):
            raise ValueError("operator diagonals must be non-negative")
        if np.max(np.abs(s * s + f * f - 1.0)) > COMPLETENESS_TOL:
            raise ValueError("operator completeness violated")
        if not 0.0 <= self.p_success <= 1.0:
            raise ValueError("p_success must lie in [0, 1]")
        s.setflags(write=False)
        f.setflags(write=False)
        object.__setattr__(self, "success_diag", s)
        object.__setattr__(self, "failure_diag", f)


@dataclass(frozen=True)
class BranchOutcome:
    tag: str
    success_state: GhzPhaseState | None = None
    failure_state: FailureBranchState | None = None

    def __post_init__(self) -> None:
        if self.tag not in (SUCCESS, FAILURE):
            raise ValueError(f"unknown branch tag {self.tag!r}")
        ok = (self.tag == SUCCESS) == (self.success_state is not None)
        ok = ok and (self.tag == FAILURE) == (self.failure_state is not None)
        if not ok:
            raise ValueError("exactly the payload matching the tag must be set")


def apply_dephasing(state: GhzPhaseState, theta: float) -> GhzPhaseState:
    """Every party dephases by theta; the collective phase advances by N*theta."""
    return GhzPhaseState(state.amps, wrap_phase(state.phi + state.parties * theta), state.parties)


def osbp_diagonals(source_amps: np.ndarray, target_amps: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
    """Success/failure diagonals converting source to target amplitudes.

    s_l is proportional to target_amp_l / source_amp_l, normalized so the
    largest entry is 1; the entry at the smallest source amplitude reaches 1
    first, which fixes the success probability.
    """
    src = np.asarray(source_amps, dtype=float)
    tgt = np.asarray(target_amps, dtype=float)
    if src.shape != tgt.shape:
        raise ValueError("source and target must have equal length")
    if np.any(src <= 0.0):
        raise ValueError("source amplitudes must be strictly positive")
    ratio = tgt / src
    s = np.minimum(ratio / ratio.max(), 1.0)
    f = np.sqrt(np.maximum(0.0, 1.0 - s * s))
    # For a normalized target the success norm is sum_l (src_l s_l)^2.
    p_success = float(np.sum((src * s) ** 2))
    return s, f, p_success


def build_osbp(params: TwoParamQutrit) -> OsbpOperators:
    """OSBP converting the vendor qutrit to GHZ_3; p_success = 3 cos^2 alpha."""
    amps = params.amps
    if np.any(amps <= 0.0):
        # cos(alpha) = 0 degenerates to a two-level vendor; the qutrit OSBP
        # needs all three levels populated.
        raise ValueError("vendor amplitudes must be strictly positive")
    s, f, p = osbp_diagonals(amps, np.full(3, 1.0 / math.sqrt(3.0)))
    return OsbpOperators(s, f, p)


def failure_branch_state(state: GhzPhaseState, ops: OsbpOperators) -> FailureBranchState:
    """Normalized post-failure state; requires exactly two populated levels."""
    fail = state.amps * ops.failure_diag
    levels = np.flatnonzero(fail > LEVEL_PRUNE_TOL)
    if levels.size != 2:
        raise ValueError(
            f"failure branch populates {levels.size} levels; only two-level "
            "failure states are representable"
        )
    j1, j2 = int(levels[0]), int(levels[1])
    norm = math.sqrt(fail[j1] ** 2 + fail[j2] ** 2)
    return FailureBranchState(fail[j1] / norm, wrap_phase((j2 - j1) * state.phi))


def osbp_branch(state: GhzPhaseState, ops: OsbpOperators, u: float) -> BranchOutcome:
    """Resolve one OSBP round with the uniform draw u supplied by the runner.

    Success yields GHZ_d at the same collective phase; failure yields the
    two-level failure state.  Branch probabilities are phase-independent.
    """
    if not 0.0 <= u < 1.0:
        raise ValueError("u must lie in [0, 1)")
    if u < ops.p_success:
        d = state.dim
        ghz = GhzPhaseState(np.full(d, 1.0 / math.sqrt(d)), state.phi, state.parties)
        return BranchOutcome(SUCCESS, success_state=ghz)
    return BranchOutcome(FAILURE, failure_state=failure_branch_state(state, ops))


def vidal_conversion_bound(source_amps: Sequence[float], target_amps: Sequence[float]) -> float:
    """Optimal single-copy conversion probability bound min_j of tail-sum ratios.

    Tail sums run over squared amplitudes from index j.  A j whose target tail
    is zero is skipped when the source tail is zero too (both states have left
    that subspace) and contributes +inf otherwise, never the minimum.
    """
    src = np.asarray(source_amps, dtype=float)
    tgt = np.asarray(target_amps, dtype=float)
    for v, name in ((src, "source"), (tgt, "target")):
        if abs(np.sum(v * v) - 1.0) > AMP_NORM_TOL:
            raise ValueError(f"{name} amplitudes must be normalized")
        if np.any(np.diff(v) > AMP_NORM_TOL):
            raise ValueError(f"{name} amplitudes must be non-increasing")
    if src.size != tgt.size:
        raise ValueError("source and target must have equal length")
    best = 1.0
    src_tail = np.cumsum((src * src)[::-1])[::-1]
    tgt_tail = np.cumsum((tgt * tgt)[::-1])[::-1]
    for j in range(src.size):
        if tgt_tail[j] <= 0.0:
            continue
        best = min(best, src_tail[j] / tgt_tail[j])
    return max(0.0, min(1.0, float(best)))
