"""Bayesian update engine: likelihood models, posterior updates, strategies.

Measurement offsets act at the effective-phase level as shifts of the
likelihood argument; per-party basis rotations are never materialized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .phase_space import PhaseDistribution, TwoParamQutrit, circular_moment, wrap_phase

EVEN = 0
ODD = 1

FIXED = "fixed"
ALTERNATING = "alternating"
ROTATING = "rotating"
ADAPTIVE = "adaptive"

EVIDENCE_FLOOR = 1e-300
ESTIMATOR_MODULUS_FLOOR = 1e-12


class ZeroEvidenceError(ValueError):
    """Raised when an observed outcome has (numerically) zero prior evidence."""


class UndefinedEstimatorError(ValueError):
    """Raised when the posterior first circular moment has negligible modulus."""


@dataclass(frozen=True)
class ParityMeasurement:
    """Equatorial parity measurement on the failure-branch qubit, offset chi."""

    chi: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "chi", wrap_phase(self.chi))


@dataclass(frozen=True)
class QutritMubMeasurement:
    """Mutually unbiased (Fourier) basis measurement, effective phase offset nu."""

    nu: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "nu", wrap_phase(self.nu))


@dataclass(frozen=True)
class StrategySpec:
    """Measurement-direction policy; the estimator rule is the circular mean."""

    kind: str
    rotating_step: float = math.pi / 8.0

    def __post_init__(self) -> None:
        if self.kind not in (FIXED, ALTERNATING, ROTATING, ADAPTIVE):
            raise ValueError(f"unknown strategy kind {self.kind!r}")
        if self.kind == ROTATING and not 0.0 < self.rotating_step < 2.0 * math.pi:
            raise ValueError("rotating step must lie in (0, 2*pi)")


def parity_likelihood(m: int, phi: float | np.ndarray, a: float, chi: float = 0.0) -> float | np.ndarray:
    """p(even/odd | phi) = 1/2 +/- a*sqrt(1-a^2)*cos(phi - chi)."""
    if not 0.0 <= a <= 1.0:
        raise ValueError("a must lie in [0, 1]")
    if m not in (EVEN, ODD):
        raise ValueError("parity outcome must be EVEN or ODD")
    amp = a * math.sqrt(1.0 - a * a)
    sign = 1.0 if m == EVEN else -1.0
    p = 0.5 + sign * amp * np.cos(np.asarray(phi, dtype=float) - chi)
    return p if isinstance(phi, np.ndarray) else float(p)


def mub_coefficients(amps: np.ndarray) -> tuple[float, float]:
    """Cosine coefficients (adjacent-level, skip-level) of the MUB likelihood."""
    v0, v1, v2 = float(amps[0]), float(amps[1]), float(amps[2])
    return v0 * v1 + v1 * v2, v0 * v2


def mub_likelihood_from_amps(
    l: int, phi: float | np.ndarray, coef_single: float, coef_double: float, nu: float = 0.0
) -> float | np.ndarray:
    if l not in (0, 1, 2):
        raise ValueError("MUB outcome must be 0, 1 or 2")
    third = 2.0 * math.pi / 3.0
    delta = np.asarray(phi, dtype=float) - nu
    p = (1.0 + 2.0 * coef_single * np.cos(third * l - delta)
         + 2.0 * coef_double * np.cos(2.0 * third * l - 2.0 * delta)) / 3.0
    return p if isinstance(phi, np.ndarray) else float(p)


def qutrit_mub_likelihood(l: int, phi: float | np.ndarray, params: TwoParamQutrit, nu: float = 0.0) -> float | np.ndarray:
    """Probability of collapsed outcome class l for the MUB measurement.

    All three parties measure in the Fourier basis; outcomes collapse into the
    three classes indexed by the outcome sum mod 3.
    """
    cs, cd = mub_coefficients(params.amps)
    return mub_likelihood_from_amps(l, phi, cs, cd, nu)


def bayes_update(prior: PhaseDistribution, likelihood: Callable[[np.ndarray], np.ndarray]) -> PhaseDistribution:
    """Posterior proportional to prior times likelihood, renormalized on the grid."""
    like = np.asarray(likelihood(prior.phis), dtype=float)
    if like.shape != prior.weights.shape:
        raise ValueError("likelihood must evaluate on the full grid")
    if np.any(like < 0.0):
        raise ValueError("likelihood must be non-negative on the grid")
    post = prior.weights * like
    evidence = float(post.sum())
    if evidence < EVIDENCE_FLOOR:
        raise ZeroEvidenceError("observed outcome has zero probability under the prior")
    return PhaseDistribution(post / evidence)


def estimate_phase(p: PhaseDistribution) -> float:
    """Circular-mean estimator arg E[e^{i phi}], in [0, 2*pi)."""
    m1 = circular_moment(p, 1)
    if abs(m1) <= ESTIMATOR_MODULUS_FLOOR:
        raise UndefinedEstimatorError("posterior has no preferred phase direction")
    return wrap_phase(math.atan2(m1.imag, m1.real))


def estimate_phase_default(p: PhaseDistribution) -> float:
    """Circular-mean estimator, substituting 0 for a directionless posterior."""
    try:
        return estimate_phase(p)
    except UndefinedEstimatorError:
        return 0.0


def next_measurement(strategy: StrategySpec, round_index: int, current_estimate: float) -> ParityMeasurement:
    """Measurement offset for the given round under the strategy policy."""
    if round_index < 0:
        raise ValueError("round index must be non-negative")
    if strategy.kind == FIXED:
        chi = 0.0
    elif strategy.kind == ALTERNATING:
        chi = (round_index % 2) * (math.pi / 2.0)
    elif strategy.kind == ROTATING:
        chi = round_index * strategy.rotating_step
    else:
        chi = current_estimate + math.pi / 2.0
    return ParityMeasurement(chi)
