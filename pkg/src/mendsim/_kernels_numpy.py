"""Pure-numpy Monte Carlo kernels, the fallback backend.

Vectorized over trials in fixed-size chunks to bound memory.  Consumes the
same pre-drawn uniforms in the same order as the JIT backend, so both
backends walk identical sample paths.
"""

from __future__ import annotations

import numpy as np

# Target elements per (trials x grid) working block.
CHUNK_ELEMENTS = 1 << 22

ESTIMATOR_MODULUS_FLOOR = 1e-12


def distances_from_moments(m1: np.ndarray, m2: np.ndarray, est: np.ndarray) -> np.ndarray:
    """Trace distances to GHZ_3 of states built from posterior moments.

    The corrected state has constant diagonal 1/d and off-diagonals from the
    phase-shifted moments, so only the moments and the estimate are needed.
    """
    w1 = np.exp(-1j * est) * m1
    w2 = np.exp(-2j * est) * m2
    n = len(m1)
    delta = np.zeros((n, 3, 3), dtype=complex)
    lower = (w1 - 1.0) / 3.0
    skip = (w2 - 1.0) / 3.0
    delta[:, 1, 0] = lower
    delta[:, 2, 1] = lower
    delta[:, 0, 1] = np.conj(lower)
    delta[:, 1, 2] = np.conj(lower)
    delta[:, 2, 0] = skip
    delta[:, 0, 2] = np.conj(skip)
    eigs = np.linalg.eigvalsh(delta)
    return 0.5 * np.abs(eigs).sum(axis=1)


def _grid(grid_size: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    phis = 2.0 * np.pi * np.arange(grid_size) / grid_size
    return phis, np.exp(1j * phis), np.exp(2j * phis)


def _estimates(m1: np.ndarray) -> np.ndarray:
    return np.where(np.abs(m1) > ESTIMATOR_MODULUS_FLOOR, np.angle(m1), 0.0)


def parity_curve(u: np.ndarray, phis_true: np.ndarray, b: float,
                 strat_code: int, step: float, grid_size: int) -> np.ndarray:
    """Per-trial corrected distances after each of k parity rounds.

    u has shape (trials, k); row t supplies the outcome draws of trial t.
    Strategy codes: 0 fixed, 1 alternating, 2 rotating(step), 3 adaptive.
    """
    trials, k = u.shape
    out = np.empty((trials, k))
    chunk = max(1, CHUNK_ELEMENTS // grid_size)
    for start in range(0, trials, chunk):
        stop = min(trials, start + chunk)
        _parity_chunk(u[start:stop], phis_true[start:stop], b,
                      strat_code, step, grid_size, out[start:stop])
    return out


def _parity_chunk(u: np.ndarray, phis_true: np.ndarray, b: float,
                  strat_code: int, step: float, grid_size: int, out: np.ndarray) -> None:
    n, k = u.shape
    phis, e1, e2 = _grid(grid_size)
    w = np.full((n, grid_size), 1.0 / grid_size)
    est = np.zeros(n)
    for r in range(k):
        if strat_code == 0:
            chi = np.zeros(n)
        elif strat_code == 1:
            chi = np.full(n, (r % 2) * (np.pi / 2.0))
        elif strat_code == 2:
            chi = np.full(n, (r * step) % (2.0 * np.pi))
        else:
            chi = est + np.pi / 2.0
        p_even = 0.5 + b * np.cos(phis_true - chi)
        sgn = np.where(u[:, r] < p_even, 1.0, -1.0)
        w *= 0.5 + sgn[:, None] * b * np.cos(phis[None, :] - chi[:, None])
        w /= w.sum(axis=1, keepdims=True)
        m1 = w @ e1
        m2 = w @ e2
        est = _estimates(m1)
        out[:, r] = distances_from_moments(m1, m2, est)


def mub_curve(u: np.ndarray, phis_true: np.ndarray, coef_single: float,
              coef_double: float, grid_size: int) -> np.ndarray:
    """Per-trial corrected distances after each of k three-outcome MUB rounds.

    The basis offset follows the adaptive schedule nu = estimate + pi/3.
    """
    trials, k = u.shape
    out = np.empty((trials, k))
    chunk = max(1, CHUNK_ELEMENTS // grid_size)
    for start in range(0, trials, chunk):
        stop = min(trials, start + chunk)
        _mub_chunk(u[start:stop], phis_true[start:stop], coef_single,
                   coef_double, grid_size, out[start:stop])
    return out


def _mub_chunk(u: np.ndarray, phis_true: np.ndarray, cs: float, cd: float,
               grid_size: int, out: np.ndarray) -> None:
    n, k = u.shape
    third = 2.0 * np.pi / 3.0
    phis, e1, e2 = _grid(grid_size)
    w = np.full((n, grid_size), 1.0 / grid_size)
    est = np.zeros(n)
    for r in range(k):
        nu = est + np.pi / 3.0
        x = phis_true - nu
        p0 = (1.0 + 2.0 * cs * np.cos(x) + 2.0 * cd * np.cos(2.0 * x)) / 3.0
        p1 = (1.0 + 2.0 * cs * np.cos(third - x) + 2.0 * cd * np.cos(2.0 * third - 2.0 * x)) / 3.0
        l_out = np.where(u[:, r] < p0, 0, np.where(u[:, r] < p0 + p1, 1, 2))
        x_grid = phis[None, :] - nu[:, None]
        w *= (1.0 + 2.0 * cs * np.cos(third * l_out[:, None] - x_grid)
              + 2.0 * cd * np.cos(2.0 * third * l_out[:, None] - 2.0 * x_grid)) / 3.0
        w /= w.sum(axis=1, keepdims=True)
        m1 = w @ e1
        m2 = w @ e2
        est = _estimates(m1)
        out[:, r] = distances_from_moments(m1, m2, est)


def distance_from_moments_single(m1: complex, m2: complex, est: float) -> float:
    """Scalar convenience wrapper around distances_from_moments."""
    return float(distances_from_moments(np.array([m1]), np.array([m2]), np.array([est]))[0])
