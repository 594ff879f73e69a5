"""Exact flat-prior results for the parity protocol without posterior updates.

With a fixed measurement basis the k parity outcomes are exchangeable, so the
whole record collapses to the even-outcome count m.  Every quantity below
reduces to moments of cos^n over the circle, which regroup into exact integer
convolutions; evaluating those avoids the catastrophic cancellation a naive
alternating double sum suffers from by k = 30.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .phase_space import (
    PhaseDistribution,
    corrected_state,
    ghz_projector,
    state_from_moments,
    trace_distance,
)

FLAT_DISTANCE = 2.0 / 3.0


@dataclass(frozen=True)
class NoUpdateOutcome:
    """k parity rounds in a fixed basis, m of them even."""

    k: int
    m: int

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if not 0 <= self.m <= self.k:
            raise ValueError("m must lie in [0, k]")


def single_measurement_distance(a: float) -> float:
    """Average corrected trace distance after one flat-prior parity round.

    The value is outcome-independent, so no outcome average is needed.
    """
    if not 0.0 <= a <= 1.0:
        raise ValueError("a must lie in [0, 1]")
    b = a * math.sqrt(1.0 - a * a)
    return (1.0 + math.sqrt(9.0 + 8.0 * b * b - 16.0 * b)) / 6.0


def poly_q(plus: int, minus: int) -> list[int]:
    """Coefficients of (1+x)^plus (1-x)^minus, exact integers."""
    if plus < 0 or minus < 0:
        raise ValueError("exponents must be non-negative")
    p = [1]
    for _ in range(plus):
        p = [x + y for x, y in zip(p + [0], [0] + p)]
    for _ in range(minus):
        p = [x - y for x, y in zip(p + [0], [0] + p)]
    return p


def _cos_power_sum(q: list[int], b: float, r: int) -> float:
    """Circle average of e^{irx} sum_n q_n (2b cos x)^n.

    Equals sum over n = r, r+2, ... of q_n b^n C(n, (n-r)/2); the integer
    products q_n C(n, .) are exact, which is what keeps the alternating sum
    stable for large k.
    """
    terms = [q[n] * math.comb(n, (n - r) // 2) * b ** n for n in range(r, len(q), 2)]
    return math.fsum(terms)


def no_update_outcome_probability(o: NoUpdateOutcome, a: float) -> float:
    """Flat-prior probability of seeing m even outcomes in k fixed-basis rounds."""
    if not 0.0 <= a <= 1.0:
        raise ValueError("a must lie in [0, 1]")
    b = a * math.sqrt(1.0 - a * a)
    q = poly_q(o.m, o.k - o.m)
    return math.comb(o.k, o.m) / 2.0 ** o.k * _cos_power_sum(q, b, 0)


def no_update_estimator_and_distance(k: int, a: float) -> tuple[np.ndarray, float]:
    """Per-outcome phase estimates and outcome-averaged corrected distance.

    The estimator is pi when evens are in the minority (m < k/2), 0 otherwise.
    Posterior circular moments come from the same integer regrouping as the
    outcome probabilities, so the result is exact up to rounding.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    if not 0.0 <= a <= 1.0:
        raise ValueError("a must lie in [0, 1]")
    if k == 0:
        return np.zeros(1), FLAT_DISTANCE
    b = a * math.sqrt(1.0 - a * a)
    ghz = ghz_projector(3)
    estimates = np.empty(k + 1)
    avg = 0.0
    for m in range(k + 1):
        q = poly_q(m, k - m)
        b0 = _cos_power_sum(q, b, 0)
        prob = math.comb(k, m) / 2.0 ** k * b0
        moments = [_cos_power_sum(q, b, r) / b0 for r in (1, 2)]
        estimate = math.pi if m < k / 2.0 else 0.0
        estimates[m] = estimate
        rho = state_from_moments(moments, estimate, 3)
        avg += prob * trace_distance(rho, ghz)
    return estimates, avg


def no_update_posterior(o: NoUpdateOutcome, a: float, grid_size: int = 4096) -> PhaseDistribution:
    """Grid posterior for outcome m: proportional to (1+2b cos)^m (1-2b cos)^(k-m)."""
    b = a * math.sqrt(1.0 - a * a)
    phis = PhaseDistribution.flat(grid_size).phis
    w = (0.5 + b * np.cos(phis)) ** o.m * (0.5 - b * np.cos(phis)) ** (o.k - o.m)
    total = w.sum()
    if total <= 0.0:
        raise ValueError("outcome has zero probability")
    return PhaseDistribution(w / total)
