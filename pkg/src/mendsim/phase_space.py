"""Collective-phase states, grid distributions, and trace-distance machinery.

Dephasing by an angle theta advances level l of a GHZ-class state by
exp(i*l*N*theta), so only the collective phase phi = N*theta mod 2pi is
identifiable.  Everything downstream (likelihoods, posteriors, corrections)
works directly in phi; the party count N never enters the estimation numerics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

TAU = 2.0 * math.pi

DEFAULT_GRID_SIZE = 4096
MIN_GRID_SIZE = 256

AMP_NORM_TOL = 1e-12
WEIGHT_SUM_TOL = 1e-10
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-10
EIGENVALUE_FLOOR = -1e-10
JACOBI_OFFDIAG_TOL = 1e-13
FLAT_MOMENT_TOL = 1e-12


def wrap_phase(phi: float) -> float:
    """Wrap an angle into [0, 2pi)."""
    phi = math.fmod(phi, TAU)
    if phi < 0.0:
        phi += TAU
    return phi


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


@lru_cache(maxsize=8)
def grid_angles(grid_size: int) -> np.ndarray:
    """Uniform angles phi_g = 2pi*g/G, shared and immutable."""
    return _readonly(TAU * np.arange(grid_size) / grid_size)


@dataclass(frozen=True)
class GhzPhaseState:
    """GHZ-class state sum_l amps[l] e^{i l phi} |l..l> in the effective picture."""

    amps: np.ndarray
    phi: float
    parties: int

    def __post_init__(self) -> None:
        amps = _readonly(np.asarray(self.amps, dtype=float))
        if amps.ndim != 1 or amps.size < 2:
            raise ValueError("amps must be a vector of length >= 2")
        if self.parties < 2:
            raise ValueError("parties must be >= 2")
        if np.any(amps < -AMP_NORM_TOL):
            raise ValueError("amps must be non-negative")
        if np.any(np.diff(amps) > AMP_NORM_TOL):
            raise ValueError("amps must be sorted non-increasing")
        norm = float(np.sum(amps * amps))
        if abs(norm - 1.0) > AMP_NORM_TOL:
            raise ValueError(f"amps norm {norm} deviates from 1 beyond {AMP_NORM_TOL}")
        object.__setattr__(self, "amps", amps)
        object.__setattr__(self, "phi", wrap_phase(float(self.phi)))

    @property
    def dim(self) -> int:
        return int(self.amps.size)


@dataclass(frozen=True)
class TwoParamQutrit:
    """Vendor qutrit family: amplitudes (sin a cos b, sin a sin b, cos a).

    The domain beta in [0, pi/4], alpha in [arctan(csc beta), pi/2] is exactly
    the region where the amplitudes come out ordered non-increasing.
    """

    alpha: float
    beta: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.beta <= math.pi / 4 + AMP_NORM_TOL:
            raise ValueError("beta must lie in [0, pi/4]")
        alpha_min = math.atan2(1.0, math.sin(self.beta))
        if not alpha_min - 1e-9 <= self.alpha <= math.pi / 2 + AMP_NORM_TOL:
            raise ValueError("alpha must lie in [arctan(csc beta), pi/2]")

    @classmethod
    def from_cos2_alpha(cls, cos2_alpha: float, beta: float) -> "TwoParamQutrit":
        """Build from cos^2(alpha), the parameterization used for benchmarks."""
        if not 0.0 <= cos2_alpha <= 1.0:
            raise ValueError("cos^2 alpha must lie in [0, 1]")
        return cls(math.acos(math.sqrt(cos2_alpha)), beta)

    @property
    def amps(self) -> np.ndarray:
        sa, ca = math.sin(self.alpha), math.cos(self.alpha)
        return np.array([sa * math.cos(self.beta), sa * math.sin(self.beta), ca])


@dataclass(frozen=True)
class FailureBranchState:
    """Effective two-level state a|0..0> + sqrt(1-a^2) e^{i phi} |1..1>."""

    a: float
    phi: float

    def __post_init__(self) -> None:
        if not -AMP_NORM_TOL <= self.a <= 1.0 + AMP_NORM_TOL:
            raise ValueError("a must lie in [0, 1]")
        object.__setattr__(self, "a", min(max(float(self.a), 0.0), 1.0))
        object.__setattr__(self, "phi", wrap_phase(float(self.phi)))


@dataclass(frozen=True)
class PhaseDistribution:
    """Probability weights over the uniform angle grid phi_g = 2pi*g/G.

    The rectangle rule on this grid integrates trigonometric polynomials of
    degree < G exactly, so every moment used downstream is quadrature-exact.
    """

    weights: np.ndarray

    def __post_init__(self) -> None:
        w = _readonly(np.asarray(self.weights, dtype=float))
        g = w.size
        if g < MIN_GRID_SIZE or g & (g - 1):
            raise ValueError(f"grid size must be a power of two >= {MIN_GRID_SIZE}")
        if np.any(w < 0.0):
            raise ValueError("weights must be non-negative")
        total = float(w.sum())
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"weights sum {total} deviates from 1 beyond {WEIGHT_SUM_TOL}")
        object.__setattr__(self, "weights", w)

    @property
    def grid_size(self) -> int:
        return int(self.weights.size)

    @property
    def phis(self) -> np.ndarray:
        return grid_angles(self.grid_size)

    @classmethod
    def flat(cls, grid_size: int = DEFAULT_GRID_SIZE) -> "PhaseDistribution":
        return cls(np.full(grid_size, 1.0 / grid_size))

    @classmethod
    def point_mass(cls, phi: float, grid_size: int = DEFAULT_GRID_SIZE) -> "PhaseDistribution":
        """All mass on the grid point nearest to phi."""
        w = np.zeros(grid_size)
        w[int(round(wrap_phase(phi) * grid_size / TAU)) % grid_size] = 1.0
        return cls(w)


@dataclass(frozen=True)
class EffectiveDensityMatrix:
    """d x d density matrix in the effective basis {|l..l>}."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("matrix must be square")
        if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
            raise ValueError("matrix must be Hermitian")
        if abs(m.trace().real - 1.0) > TRACE_TOL:
            raise ValueError("trace must equal 1")
        if hermitian_eigenvalues(m)[0] < EIGENVALUE_FLOOR:
            raise ValueError("matrix must be positive semidefinite")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])


def make_vendor_qutrit(params: TwoParamQutrit, parties: int = 2) -> GhzPhaseState:
    """Vendor state of the two-parameter family at collective phase 0."""
    return GhzPhaseState(params.amps, 0.0, parties)


def ghz_projector(d: int) -> EffectiveDensityMatrix:
    """Pure GHZ_d target: every matrix entry equals 1/d."""
    return EffectiveDensityMatrix(np.full((d, d), 1.0 / d, dtype=complex))


def circular_moment(p: PhaseDistribution, order: int) -> complex:
    """Grid moment sum_g w_g e^{i*order*phi_g}; modulus <= 1."""
    if order < 1:
        raise ValueError("order must be >= 1")
    return complex(np.sum(p.weights * np.exp(1j * order * p.phis)))


def state_from_moments(moments: Sequence[complex], estimate: float, d: int) -> EffectiveDensityMatrix:
    """Corrected GHZ_d state from circular moments M_1..M_{d-1}.

    Entry (j, l) is (1/d) e^{-i*estimate*(j-l)} M_{j-l}; negative orders are
    conjugates.  The result is the posterior average of pure GHZ_d states at
    phase (phi - estimate), hence positive semidefinite by construction.
    """
    if len(moments) != d - 1:
        raise ValueError("need exactly d-1 moments")
    rho = np.empty((d, d), dtype=complex)
    shifted = [complex(m) * np.exp(-1j * estimate * (r + 1)) for r, m in enumerate(moments)]
    for j in range(d):
        for l in range(d):
            if j == l:
                rho[j, l] = 1.0 / d
            elif j > l:
                rho[j, l] = shifted[j - l - 1] / d
            else:
                rho[j, l] = np.conj(shifted[l - j - 1]) / d
    return EffectiveDensityMatrix(rho)


def corrected_state(p: PhaseDistribution, estimate: float, d: int) -> EffectiveDensityMatrix:
    """Success-branch state after the phase correction by `estimate`."""
    return state_from_moments([circular_moment(p, r) for r in range(1, d)], estimate, d)


def hermitian_eigenvalues(matrix: np.ndarray) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix by cyclic Jacobi rotations.

    Iterates until the off-diagonal Frobenius norm drops below 1e-13; ascending.
    """
    h = np.array(matrix, dtype=complex)
    n = h.shape[0]
    if n == 1:
        return np.array([h[0, 0].real])
    for _ in range(60):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += abs(h[p, q]) ** 2
        if math.sqrt(2.0 * off) <= JACOBI_OFFDIAG_TOL:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = h[p, q]
                mag = abs(apq)
                if mag == 0.0:
                    continue
                phase = apq / mag
                tau = (h[q, q].real - h[p, p].real) / (2.0 * mag)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                app = h[p, p].real
                aqq = h[q, q].real
                h[p, p] = app - t * mag
                h[q, q] = aqq + t * mag
                h[p, q] = 0.0
                h[q, p] = 0.0
                for r in range(n):
                    if r == p or r == q:
                        continue
                    hrp = h[r, p]
                    hrq = h[r, q]
                    h[r, p] = c * hrp - s * np.conj(phase) * hrq
                    h[r, q] = s * phase * hrp + c * hrq
                    h[p, r] = np.conj(h[r, p])
                    h[q, r] = np.conj(h[r, q])
    return np.sort(np.real(np.diag(h)))


def trace_distance(rho: EffectiveDensityMatrix, sigma: EffectiveDensityMatrix) -> float:
    """Half the absolute eigenvalue sum of rho - sigma; in [0, 1]."""
    if rho.dim != sigma.dim:
        raise ValueError("dimension mismatch")
    eigs = hermitian_eigenvalues(rho.matrix - sigma.matrix)
    return 0.5 * float(np.sum(np.abs(eigs)))
