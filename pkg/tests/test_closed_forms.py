import math

import numpy as np
import pytest

from mendsim.closed_forms import (
    FLAT_DISTANCE,
    NoUpdateOutcome,
    no_update_estimator_and_distance,
    no_update_outcome_probability,
    no_update_posterior,
    poly_q,
    single_measurement_distance,
)
from mendsim.estimation import EVEN, ODD, bayes_update, parity_likelihood
from mendsim.phase_space import PhaseDistribution

A_SYM = 2.0 ** -0.5

# Average distances for the fixed-offset schedule at a = 1/sqrt(2).
CURVE_REFERENCE = {
    1: 0.45534180126147944,
    2: 0.45735330568132493,
    8: 0.4202243410535232,
    20: 0.4121238683269855,
}


def test_single_measurement_reference():
    assert abs(single_measurement_distance(A_SYM) - (1.0 + math.sqrt(3.0)) / 6.0) < 1e-15
    assert abs(single_measurement_distance(0.3) - 0.5421771278761257) < 1e-12
    # b = 0 keeps the flat prior: nothing is learned
    assert abs(single_measurement_distance(1.0) - FLAT_DISTANCE) < 1e-15


def test_zero_rounds_returns_flat_distance():
    estimates, dist = no_update_estimator_and_distance(0, A_SYM)
    assert estimates.shape == (1,) and estimates[0] == 0.0
    assert abs(dist - FLAT_DISTANCE) < 1e-15


def test_poly_q_exact_coefficients():
    assert poly_q(0, 0) == [1]
    assert poly_q(2, 1) == [1, 1, -1, -1]
    assert poly_q(3, 0) == [1, 3, 3, 1]
    assert poly_q(0, 2) == [1, -2, 1]


def test_outcome_probabilities_sum_to_one():
    for a in (0.3, A_SYM, 0.95):
        for k in (1, 2, 5, 10, 20, 30):
            total = math.fsum(
                no_update_outcome_probability(NoUpdateOutcome(k, m), a) for m in range(k + 1)
            )
            assert abs(total - 1.0) < 1e-10


def test_outcome_probability_reference():
    probs = [no_update_outcome_probability(NoUpdateOutcome(2, m), A_SYM) for m in range(3)]
    assert np.max(np.abs(np.array(probs) - [0.375, 0.25, 0.375])) < 1e-12


def test_outcome_symmetry():
    # swapping even and odd counts shifts the posterior by half a period,
    # and each posterior is symmetric under phi -> -phi on its own
    for k, m in ((5, 1), (8, 3), (12, 5)):
        p = no_update_posterior(NoUpdateOutcome(k, m), A_SYM, 1024)
        q = no_update_posterior(NoUpdateOutcome(k, k - m), A_SYM, 1024)
        shifted = np.roll(q.weights, 512)
        assert np.max(np.abs(p.weights - shifted)) < 1e-12
        reflected = np.roll(p.weights[::-1], 1)
        assert np.max(np.abs(p.weights - reflected)) < 1e-12
        assert abs(no_update_outcome_probability(NoUpdateOutcome(k, m), A_SYM)
                   - no_update_outcome_probability(NoUpdateOutcome(k, k - m), A_SYM)) < 1e-12


def test_curve_reference_values():
    for k, expect in CURVE_REFERENCE.items():
        _, dist = no_update_estimator_and_distance(k, A_SYM)
        assert abs(dist - expect) < 1e-12


def test_estimator_convention():
    estimates, _ = no_update_estimator_and_distance(5, A_SYM)
    assert np.allclose(estimates[:3], math.pi)
    assert np.allclose(estimates[3:], 0.0)
    estimates, _ = no_update_estimator_and_distance(4, A_SYM)
    assert estimates[2] == 0.0


def test_symmetric_amplitude_minimizes_distance():
    for k in (1, 3, 6):
        best = no_update_estimator_and_distance(k, A_SYM)[1]
        for a in (0.3, 0.5, 0.6, 0.8, 0.9, 0.95):
            assert best <= no_update_estimator_and_distance(k, a)[1] + 1e-9


def test_posterior_matches_sequential_bayes():
    # closed-form posterior against the grid pipeline it summarizes
    for k, m in ((1, 0), (3, 2), (6, 3), (9, 1)):
        p = PhaseDistribution.flat(4096)
        for _ in range(m):
            p = bayes_update(p, lambda x: parity_likelihood(EVEN, x, A_SYM, 0.0))
        for _ in range(k - m):
            p = bayes_update(p, lambda x: parity_likelihood(ODD, x, A_SYM, 0.0))
        closed = no_update_posterior(NoUpdateOutcome(k, m), A_SYM, 4096)
        assert np.max(np.abs(closed.weights - p.weights)) < 1e-12


def test_outcome_validation():
    with pytest.raises(ValueError):
        NoUpdateOutcome(0, 0)
    with pytest.raises(ValueError):
        NoUpdateOutcome(3, 4)
    with pytest.raises(ValueError):
        NoUpdateOutcome(3, -1)
