import math

import numpy as np
import pytest

from conftest import angle_gap, draw_params
from mendsim.estimation import (
    ADAPTIVE,
    ALTERNATING,
    EVEN,
    FIXED,
    ODD,
    ROTATING,
    StrategySpec,
    UndefinedEstimatorError,
    ZeroEvidenceError,
    bayes_update,
    estimate_phase,
    estimate_phase_default,
    mub_coefficients,
    mub_likelihood_from_amps,
    next_measurement,
    parity_likelihood,
    qutrit_mub_likelihood,
)
from mendsim.phase_space import (
    PhaseDistribution,
    circular_moment,
    corrected_state,
    ghz_projector,
    grid_angles,
    trace_distance,
)


def test_parity_likelihood_normalization():
    rng = np.random.default_rng(20)
    for _ in range(500):
        a = rng.uniform(0.0, 1.0)
        phi, chi = rng.uniform(0.0, 2.0 * math.pi, 2)
        p0 = parity_likelihood(EVEN, phi, a, chi)
        p1 = parity_likelihood(ODD, phi, a, chi)
        assert abs(p0 + p1 - 1.0) < 1e-12
        assert 0.0 <= p0 <= 1.0


def test_parity_likelihood_reference():
    a = 2.0 ** -0.5
    assert abs(parity_likelihood(EVEN, 0.0, a, 0.0) - 1.0) < 1e-12
    assert abs(parity_likelihood(EVEN, math.pi, a, 0.0)) < 1e-12
    assert abs(parity_likelihood(EVEN, math.pi / 2.0, a, 0.0) - 0.5) < 1e-12
    # a=1 carries no relative amplitude, so outcomes are uninformative
    assert abs(parity_likelihood(EVEN, 1.3, 1.0, 0.0) - 0.5) < 1e-12
    grid = grid_angles(256)
    vec = parity_likelihood(EVEN, grid, a, 0.4)
    assert vec.shape == grid.shape
    assert abs(vec[0] - parity_likelihood(EVEN, 0.0, a, 0.4)) < 1e-15


def test_mub_likelihood_matches_projection():
    # independent check: project the phased state onto the discrete-Fourier basis
    rng = np.random.default_rng(21)
    omega = np.exp(2j * math.pi / 3.0)
    levels = np.arange(3)
    worst = 0.0
    for _ in range(300):
        params = draw_params(rng)
        v = params.amps
        cs, cd = mub_coefficients(v)
        phi, nu = rng.uniform(0.0, 2.0 * math.pi, 2)
        psi = v * np.exp(1j * levels * (phi - nu))
        for l in range(3):
            basis = omega ** (levels * l) / math.sqrt(3.0)
            direct = abs(np.vdot(basis, psi)) ** 2
            closed = mub_likelihood_from_amps(l, phi, cs, cd, nu)
            worst = max(worst, abs(direct - closed))
            assert abs(closed - qutrit_mub_likelihood(l, phi, params, nu)) < 1e-14
    assert worst < 1e-12


def test_mub_likelihood_normalization():
    rng = np.random.default_rng(22)
    for _ in range(1000):
        params = draw_params(rng)
        phi, nu = rng.uniform(0.0, 2.0 * math.pi, 2)
        total = sum(qutrit_mub_likelihood(l, phi, params, nu) for l in range(3))
        assert abs(total - 1.0) < 1e-12


def test_bayes_update_flat_likelihood_is_identity():
    prior = PhaseDistribution.flat(512)
    post = bayes_update(prior, lambda x: np.full(x.shape, 0.37))
    assert np.max(np.abs(post.weights - prior.weights)) < 1e-14


def test_bayes_update_failure_modes():
    prior = PhaseDistribution.flat(256)
    with pytest.raises(ZeroEvidenceError):
        bayes_update(prior, lambda x: np.zeros(x.shape))
    with pytest.raises(ValueError):
        bayes_update(prior, lambda x: -np.ones(x.shape))
    with pytest.raises(ValueError):
        bayes_update(prior, lambda x: np.ones(3))


def test_estimator_conventions():
    phi = grid_angles(512)[101]
    point = PhaseDistribution.point_mass(phi, 512)
    assert angle_gap(estimate_phase(point), phi) < 1e-12
    flat = PhaseDistribution.flat(512)
    with pytest.raises(UndefinedEstimatorError):
        estimate_phase(flat)
    assert estimate_phase_default(flat) == 0.0


def test_posterior_rotation_covariance():
    # shifting the measurement offset by whole grid cells rolls the posterior
    a, grid_size = 2.0 ** -0.5, 512
    cell = 2.0 * math.pi / grid_size
    prior = PhaseDistribution.flat(grid_size)
    base = bayes_update(prior, lambda x: parity_likelihood(ODD, x, a, 3.0 * cell))
    for shift in (1, 17, 200):
        rolled = bayes_update(
            prior, lambda x: parity_likelihood(ODD, x, a, (3.0 + shift) * cell))
        assert np.max(np.abs(rolled.weights - np.roll(base.weights, shift))) < 1e-12
        assert angle_gap(estimate_phase(rolled), estimate_phase(base) + shift * cell) < 1e-9


def test_quadrature_offset_beats_in_phase_offset():
    # expected next-round distance, averaged exactly over both outcomes
    a = 2.0 ** -0.5
    prior = PhaseDistribution.flat(1024)
    post = bayes_update(prior, lambda x: parity_likelihood(EVEN, x, a, 0.0))
    est = estimate_phase_default(post)

    def expected_distance(chi: float) -> float:
        total = 0.0
        for m in (EVEN, ODD):
            w = post.weights * parity_likelihood(m, post.phis, a, chi)
            prob = float(w.sum())
            nxt = PhaseDistribution(w / prob)
            e = estimate_phase_default(nxt)
            total += prob * trace_distance(corrected_state(nxt, e, 3), ghz_projector(3))
        return total

    in_phase = expected_distance(est)
    quadrature = expected_distance(est + math.pi / 2.0)
    assert quadrature < in_phase - 1e-9


def test_strategy_schedules():
    est = 1.1
    assert next_measurement(StrategySpec(FIXED), 5, est).chi == 0.0
    assert angle_gap(next_measurement(StrategySpec(ALTERNATING), 0, est).chi, 0.0) < 1e-12
    assert angle_gap(next_measurement(StrategySpec(ALTERNATING), 1, est).chi, math.pi / 2) < 1e-12
    assert angle_gap(next_measurement(StrategySpec(ALTERNATING), 2, est).chi, 0.0) < 1e-12
    step = math.pi / 8.0
    assert angle_gap(next_measurement(StrategySpec(ROTATING), 3, est).chi, 3 * step) < 1e-12
    assert angle_gap(next_measurement(StrategySpec(ROTATING), 17, est).chi, 17 * step) < 1e-12
    assert angle_gap(next_measurement(StrategySpec(ADAPTIVE), 9, est).chi,
                     est + math.pi / 2.0) < 1e-12
    wide = StrategySpec(ROTATING, rotating_step=1.0)
    assert angle_gap(next_measurement(wide, 2, est).chi, 2.0) < 1e-12


def test_strategy_validation():
    with pytest.raises(ValueError):
        StrategySpec("spiral")
    with pytest.raises(ValueError):
        StrategySpec(ROTATING, rotating_step=0.0)
    with pytest.raises(ValueError):
        StrategySpec(ROTATING, rotating_step=7.0)


def test_estimator_tracks_true_phase():
    # after 30 adaptive rounds the estimate should sit near the true phase
    from mendsim.runner import TrialConfig, run_failure_branch_trial

    rng = np.random.default_rng(23)
    cfg = TrialConfig(mode="failure-branch", copies=30, strategy=StrategySpec(ADAPTIVE),
                      a=2.0 ** -0.5, grid_size=1024)
    trials = 400
    hits = 0
    for t in range(trials):
        true_phi = float(rng.uniform(0.0, 2.0 * math.pi))
        record = run_failure_branch_trial(cfg, true_phi, seed=t)
        hits += angle_gap(record.entries[-1].estimate, true_phi) <= 0.4
    assert hits / trials >= 0.90
