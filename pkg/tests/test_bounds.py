import math

import numpy as np
import pytest

from conftest import draw_params
from mendsim.bounds import (
    BoundReport,
    YieldReport,
    bound_report,
    distance_floor_crossing,
    distillation_rate,
    quantum_fisher_information,
    van_trees_distance_floor,
    van_trees_sigma_sq,
    yield_comparison,
)
from mendsim.phase_space import TwoParamQutrit

QFI_REFERENCE = 2.493333333333333
FLOOR_REFERENCE = {7: 0.040469400155091005, 8: 0.03562425778037538}
CROSSING_REFERENCE = 7.477815173065169


def fd_fisher_information(params: TwoParamQutrit, parties: int) -> float:
    """4(<d psi|d psi> - |<psi|d psi>|^2) by central differences."""
    levels = np.arange(3)

    def psi(theta: float) -> np.ndarray:
        return params.amps * np.exp(1j * levels * parties * theta)

    h = 1e-6
    dpsi = (psi(h) - psi(-h)) / (2.0 * h)
    return 4.0 * (np.vdot(dpsi, dpsi).real - abs(np.vdot(psi(0.0), dpsi)) ** 2)


def test_qfi_reference(vendor_params):
    assert abs(quantum_fisher_information(vendor_params, 1) - QFI_REFERENCE) < 1e-12
    assert abs(quantum_fisher_information(vendor_params, 2) - 4.0 * QFI_REFERENCE) < 1e-12


def test_qfi_matches_finite_difference():
    rng = np.random.default_rng(30)
    for _ in range(100):
        params = draw_params(rng)
        parties = int(rng.integers(1, 4))
        exact = quantum_fisher_information(params, parties)
        approx = fd_fisher_information(params, parties)
        assert abs(exact - approx) <= 1e-5 * max(exact, 1e-6)


def test_qfi_nonnegative():
    rng = np.random.default_rng(31)
    for _ in range(300):
        assert quantum_fisher_information(draw_params(rng), 1) >= 0.0


def test_sigma_sq():
    assert abs(van_trees_sigma_sq(10.0, QFI_REFERENCE) - 1.0 / (10.0 * QFI_REFERENCE)) < 1e-15
    with pytest.raises(ValueError):
        van_trees_sigma_sq(0.0, QFI_REFERENCE)
    with pytest.raises(ValueError):
        van_trees_sigma_sq(5.0, 0.0)


def test_floor_reference_values():
    for k, expect in FLOOR_REFERENCE.items():
        assert abs(van_trees_distance_floor(k, QFI_REFERENCE) - expect) < 1e-12


def test_floor_monotone_and_bounded():
    previous = 2.0 / 3.0
    for k in range(1, 61):
        floor = van_trees_distance_floor(k, QFI_REFERENCE)
        assert 0.0 < floor < previous
        previous = floor
    assert van_trees_distance_floor(1e9, QFI_REFERENCE) < 1e-4


def test_crossing_reference():
    crossing = distance_floor_crossing(0.038, QFI_REFERENCE)
    assert abs(crossing - CROSSING_REFERENCE) < 1e-9
    assert 7.0 < crossing < 8.0
    assert abs(van_trees_distance_floor(crossing, QFI_REFERENCE) - 0.038) < 1e-9


def test_crossing_validation():
    with pytest.raises(ValueError):
        distance_floor_crossing(0.0, QFI_REFERENCE)
    with pytest.raises(ValueError):
        distance_floor_crossing(0.7, QFI_REFERENCE)


def test_distillation_rate(vendor_params):
    assert abs(distillation_rate(vendor_params.amps) - 0.9905433564265174) < 1e-12
    assert abs(distillation_rate(np.full(3, 3.0 ** -0.5)) - 1.0) < 1e-12
    with pytest.raises(ValueError):
        distillation_rate(np.array([0.9, 0.9, 0.1]))


def test_yield_comparison():
    report = yield_comparison(100.0, 0.8, 9.0, 7.5)
    assert abs(report.failure_branch_yield - 80.0) < 1e-9
    assert abs(report.naive_yield - 72.8) < 1e-9
    assert abs(report.optimal_naive_yield - 74.0) < 1e-9
    with pytest.raises(ValueError):
        yield_comparison(100.0, 1.2, 9.0, 7.5)
    with pytest.raises(ValueError):
        yield_comparison(100.0, 0.8, 120.0, 7.5)


def test_bound_report(vendor_params):
    report = bound_report(vendor_params)
    assert isinstance(report, BoundReport)
    assert abs(report.p_success - 0.8) < 1e-12
    assert abs(report.vidal_rate - 0.8) < 1e-12
    assert abs(report.qfi_per_copy - QFI_REFERENCE) < 1e-12
    assert abs(report.distillation_rate - 0.9905433564265174) < 1e-12
    assert abs(report.sigma_sq(25.0) - van_trees_sigma_sq(25.0, report.qfi_per_copy)) < 1e-15
    assert abs(report.distance_floor(7) - FLOOR_REFERENCE[7]) < 1e-12
    assert abs(report.crossing(0.038) - CROSSING_REFERENCE) < 1e-9
    assert not report.in_approximation_regime(100)


def test_approximation_regime_flag():
    # a barely informative vendor state pushes sigma above pi/4 at small k
    weak = TwoParamQutrit(1.55, 0.05)
    report = bound_report(weak)
    assert report.in_approximation_regime(1)
    assert not report.in_approximation_regime(10_000)
