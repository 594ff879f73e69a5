import math

import numpy as np
import pytest

from conftest import draw_params
from mendsim.phase_space import (
    DEFAULT_GRID_SIZE,
    MIN_GRID_SIZE,
    TAU,
    EffectiveDensityMatrix,
    GhzPhaseState,
    PhaseDistribution,
    TwoParamQutrit,
    circular_moment,
    corrected_state,
    ghz_projector,
    grid_angles,
    hermitian_eigenvalues,
    make_vendor_qutrit,
    state_from_moments,
    trace_distance,
    wrap_phase,
)


def random_posterior(rng, grid_size=256):
    w = rng.random(grid_size) ** 2
    return PhaseDistribution(w / w.sum())


def test_wrap_phase_range_and_periodicity():
    rng = np.random.default_rng(0)
    for x in rng.uniform(-50.0, 50.0, 500):
        w = wrap_phase(float(x))
        assert 0.0 <= w < TAU
        assert abs(wrap_phase(float(x) + TAU) - w) < 1e-9
    assert wrap_phase(0.0) == 0.0
    assert wrap_phase(-1e-9) < TAU


def test_grid_angles_layout():
    g = grid_angles(256)
    assert g.shape == (256,)
    assert g[0] == 0.0
    assert np.allclose(np.diff(g), TAU / 256, atol=1e-15)
    assert grid_angles(256) is g
    with pytest.raises(ValueError):
        g[0] = 1.0


def test_distribution_grid_validation():
    with pytest.raises(ValueError):
        PhaseDistribution(np.full(300, 1.0 / 300))
    with pytest.raises(ValueError):
        PhaseDistribution(np.full(128, 1.0 / 128))
    with pytest.raises(ValueError):
        PhaseDistribution(np.full(256, 1.0))
    neg = np.full(256, 1.0 / 256)
    neg[3] = -neg[3]
    with pytest.raises(ValueError):
        PhaseDistribution(neg)
    assert PhaseDistribution.flat(256).grid_size == 256
    assert PhaseDistribution.flat().grid_size == DEFAULT_GRID_SIZE
    assert MIN_GRID_SIZE == 256


def test_vendor_amps_normalized_and_ordered():
    rng = np.random.default_rng(1)
    for _ in range(200):
        amps = draw_params(rng).amps
        assert abs(np.sum(amps * amps) - 1.0) < 1e-12
        assert np.all(np.diff(amps) <= 1e-12)
        assert np.all(amps > 0.0)


def test_vendor_domain_rejected():
    with pytest.raises(ValueError):
        TwoParamQutrit(1.4, math.pi / 3.0)
    with pytest.raises(ValueError):
        TwoParamQutrit(0.3, math.pi / 8.0)
    with pytest.raises(ValueError):
        TwoParamQutrit.from_cos2_alpha(1.1, math.pi / 4.0)
    with pytest.raises(ValueError):
        TwoParamQutrit.from_cos2_alpha(-0.1, math.pi / 4.0)


def test_vendor_reference_point(vendor_params):
    expect = np.sqrt(np.array([11.0, 11.0, 8.0]) / 30.0)
    assert np.max(np.abs(vendor_params.amps - expect)) < 1e-12


def test_ghz_state_validation():
    flat3 = np.full(3, 3.0 ** -0.5)
    state = GhzPhaseState(flat3, -1.0, 3)
    assert 0.0 <= state.phi < TAU
    assert state.dim == 3
    with pytest.raises(ValueError):
        GhzPhaseState(np.array([0.3, 0.9]), 0.0, 2)
    with pytest.raises(ValueError):
        GhzPhaseState(np.array([0.9, 0.6]), 0.0, 2)
    with pytest.raises(ValueError):
        GhzPhaseState(flat3, 0.0, 1)
    vendor = make_vendor_qutrit(TwoParamQutrit.from_cos2_alpha(4.0 / 15.0, math.pi / 4.0), 5)
    assert vendor.parties == 5 and vendor.dim == 3


def test_flat_and_point_mass_moments():
    flat = PhaseDistribution.flat(512)
    assert abs(circular_moment(flat, 1)) < 1e-12
    assert abs(circular_moment(flat, 2)) < 1e-12
    phi = grid_angles(512)[77]
    point = PhaseDistribution.point_mass(phi, 512)
    assert abs(circular_moment(point, 1) - np.exp(1j * phi)) < 1e-12


def test_circular_moment_bounded():
    rng = np.random.default_rng(2)
    for _ in range(50):
        p = random_posterior(rng)
        for order in (1, 2, 3):
            assert abs(circular_moment(p, order)) <= 1.0 + 1e-12
    with pytest.raises(ValueError):
        circular_moment(PhaseDistribution.flat(256), 0)


def test_corrected_state_structure():
    rng = np.random.default_rng(3)
    for _ in range(25):
        p = random_posterior(rng)
        rho = corrected_state(p, rng.uniform(0.0, TAU), 3)
        m = rho.matrix
        assert abs(np.trace(m) - 1.0) < 1e-12
        assert np.max(np.abs(m - m.conj().T)) < 1e-12
        assert np.min(np.linalg.eigvalsh(m)) > -1e-10


def test_corrected_state_limits():
    flat = PhaseDistribution.flat(1024)
    ghz = ghz_projector(3)
    assert abs(trace_distance(corrected_state(flat, 0.0, 3), ghz) - 2.0 / 3.0) < 1e-12
    phi = grid_angles(1024)[300]
    point = PhaseDistribution.point_mass(phi, 1024)
    assert trace_distance(corrected_state(point, phi, 3), ghz) < 1e-10
    # correcting with the wrong phase leaves a visible distance
    assert trace_distance(corrected_state(point, phi + 1.0, 3), ghz) > 0.1


def test_state_from_moments_validation():
    with pytest.raises(ValueError):
        state_from_moments([1.0 + 0j], 0.0, 3)
    rho = state_from_moments([0.0j, 0.0j], 0.0, 3)
    assert abs(trace_distance(rho, ghz_projector(3)) - 2.0 / 3.0) < 1e-12


def test_hermitian_eigenvalues_match_reference():
    rng = np.random.default_rng(4)
    worst = 0.0
    for d in range(2, 7):
        for _ in range(40):
            x = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
            h = (x + x.conj().T) / 2.0
            ours = hermitian_eigenvalues(h)
            ref = np.linalg.eigvalsh(h)
            worst = max(worst, float(np.max(np.abs(ours - ref))))
    assert worst < 1e-10


def test_trace_distance_properties():
    ghz = ghz_projector(3)
    assert trace_distance(ghz, ghz) < 1e-14
    rng = np.random.default_rng(5)
    p, q = random_posterior(rng), random_posterior(rng)
    a = corrected_state(p, 0.3, 3)
    b = corrected_state(q, 1.1, 3)
    d_ab, d_ba = trace_distance(a, b), trace_distance(b, a)
    assert abs(d_ab - d_ba) < 1e-12
    assert 0.0 <= d_ab <= 1.0


def test_density_matrix_validation():
    with pytest.raises(ValueError):
        EffectiveDensityMatrix(np.array([[0.5, 0.5j], [0.5j, 0.5]]))
    with pytest.raises(ValueError):
        EffectiveDensityMatrix(np.eye(3, dtype=complex))
