"""Analytic benchmarks: quantum Fisher information, the Bayesian
Cramer-Rao (van Trees) trace-distance floor, and asymptotic conversion rates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .phase_space import TwoParamQutrit
from .channel import build_osbp, vidal_conversion_bound

# Gaussian-posterior replacement loses accuracy once the posterior is wide;
# flag widths beyond this as outside the approximation regime.
APPROXIMATION_SIGMA = math.pi / 4.0


def quantum_fisher_information(params: TwoParamQutrit, parties: int = 1) -> float:
    """QFI of the dephased vendor state for the per-party phase.

    4 N^2 [sin^2(a) sin^2(b) + 4 cos^2(a) - (sin^2(a) sin^2(b) + 2 cos^2(a))^2].
    """
    if parties < 1:
        raise ValueError("parties must be at least 1")
    s2b = math.sin(params.alpha) ** 2 * math.sin(params.beta) ** 2
    c2 = math.cos(params.alpha) ** 2
    value = 4.0 * parties * parties * (s2b + 4.0 * c2 - (s2b + 2.0 * c2) ** 2)
    return max(0.0, value)


def van_trees_sigma_sq(k: float, qfi_per_copy: float) -> float:
    """Posterior-variance bound 1/(k * QFI); the flat prior adds no information.

    The N^2 in the QFI cancels the N^2 the variance enters with, so the result
    is stated per collective phase and is independent of the party count.
    """
    if qfi_per_copy <= 0.0:
        raise ValueError("qfi_per_copy must be positive")
    if k < 1:
        raise ValueError("k must be at least 1")
    return 1.0 / (k * qfi_per_copy)


def van_trees_distance_floor(k: float, qfi_per_copy: float) -> float:
    """Lower bound on the average corrected trace distance after k copies.

    Evaluates the Gaussian-posterior bound at variance 1/(k * QFI); accepts
    non-integer k so the crossing with a target distance can be bracketed.
    """
    s = van_trees_sigma_sq(k, qfi_per_copy)
    e = math.exp
    return (e(-2.0 * s) / 6.0) * (e(s / 2.0) - 1.0) * (
        1.0 + e(s / 2.0) + e(s) + e(1.5 * s)
        + math.sqrt(8.0 * e(3.0 * s) + (1.0 + e(s / 2.0)) ** 2 * (1.0 + e(s)) ** 2)
    )


def distance_floor_crossing(target: float, qfi_per_copy: float,
                            lo: float = 1.0, hi: float = 1e6) -> float:
    """Continuous k at which the distance floor drops to the target, by bisection."""
    if not 0.0 < target < 2.0 / 3.0:
        raise ValueError("target must lie in (0, 2/3)")
    if van_trees_distance_floor(lo, qfi_per_copy) <= target:
        return lo
    if van_trees_distance_floor(hi, qfi_per_copy) > target:
        raise ValueError("target not reached within the bracket")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if van_trees_distance_floor(mid, qfi_per_copy) > target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def distillation_rate(source_amps: Sequence[float]) -> float:
    """Asymptotic target copies per source copy: -sum l log_d l over l = amps^2."""
    amps = np.asarray(source_amps, dtype=float)
    lam = amps * amps
    if abs(lam.sum() - 1.0) > 1e-10:
        raise ValueError("amplitudes must be normalized")
    d = len(amps)
    if d < 2:
        raise ValueError("need at least two levels")
    return float(-sum(x * math.log(x, d) for x in lam if x > 0.0))


@dataclass(frozen=True)
class YieldReport:
    """Converted-copy counts out of k received copies under three accountings."""

    failure_branch_yield: float
    naive_yield: float
    optimal_naive_yield: float


def yield_comparison(k: float, p_s: float, k_e_naive: float, k_e_optimal: float) -> YieldReport:
    """Yields when estimation is free (failure branch) vs paid for up front."""
    if not 0.0 <= p_s <= 1.0:
        raise ValueError("p_s must lie in [0, 1]")
    for k_e in (k_e_naive, k_e_optimal):
        if not 0.0 <= k_e <= k:
            raise ValueError("k_e must lie in [0, k]")
    return YieldReport(
        failure_branch_yield=k * p_s,
        naive_yield=(k - k_e_naive) * p_s,
        optimal_naive_yield=(k - k_e_optimal) * p_s,
    )


@dataclass(frozen=True)
class BoundReport:
    """All benchmark quantities for one vendor-state parameter point."""

    qfi_per_copy: float
    distillation_rate: float
    vidal_rate: float
    p_success: float

    def __post_init__(self) -> None:
        if self.qfi_per_copy < 0.0 or self.distillation_rate < 0.0:
            raise ValueError("rates must be non-negative")
        if not 0.0 <= self.vidal_rate <= 1.0:
            raise ValueError("vidal_rate must lie in [0, 1]")
        for f in (self.qfi_per_copy, self.distillation_rate, self.vidal_rate, self.p_success):
            if not math.isfinite(f):
                raise ValueError("all rates must be finite")

    def sigma_sq(self, k: float) -> float:
        return van_trees_sigma_sq(k, self.qfi_per_copy)

    def distance_floor(self, k: float) -> float:
        return van_trees_distance_floor(k, self.qfi_per_copy)

    def in_approximation_regime(self, k: float) -> bool:
        """True when the posterior-width bound is too wide to trust the floor."""
        return math.sqrt(self.sigma_sq(k)) > APPROXIMATION_SIGMA

    def crossing(self, target: float) -> float:
        return distance_floor_crossing(target, self.qfi_per_copy)


def bound_report(params: TwoParamQutrit) -> BoundReport:
    """Assemble the benchmark report for one (alpha, beta)."""
    ghz = np.full(3, 1.0 / math.sqrt(3.0))
    return BoundReport(
        qfi_per_copy=quantum_fisher_information(params, 1),
        distillation_rate=distillation_rate(params.amps),
        vidal_rate=vidal_conversion_bound(params.amps, ghz),
        p_success=build_osbp(params).p_success,
    )
