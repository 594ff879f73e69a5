"""JIT-compiled Monte Carlo kernels (numba backend).

Per-trial loops parallelized with prange; every trial writes only its own
output row, so results do not depend on the thread count or schedule.  The
sampling logic mirrors the numpy backend exactly: same uniforms, same order,
same strategy codes (0 fixed, 1 alternating, 2 rotating, 3 adaptive).
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit, prange

ESTIMATOR_MODULUS_FLOOR = 1e-12


@njit(cache=True)
def _hermitian_eigenvalues(h):
    # Cyclic complex Jacobi on a small Hermitian matrix, in place.
    n = h.shape[0]
    for _ in range(60):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += abs(h[p, q]) ** 2
        if math.sqrt(2.0 * off) <= 1e-13:
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
                    h[r, p] = c * hrp - s * phase.conjugate() * hrq
                    h[r, q] = s * phase * hrp + c * hrq
                    h[p, r] = h[r, p].conjugate()
                    h[q, r] = h[r, q].conjugate()
    ev = np.empty(n)
    for i in range(n):
        ev[i] = h[i, i].real
    return np.sort(ev)


@njit(cache=True)
def _distance3(m1r, m1i, m2r, m2i, est):
    # Trace distance to GHZ_3 of the moment-built state corrected by est.
    ce = math.cos(est)
    se = math.sin(est)
    w1r = m1r * ce + m1i * se
    w1i = m1i * ce - m1r * se
    c2 = math.cos(2.0 * est)
    s2 = math.sin(2.0 * est)
    w2r = m2r * c2 + m2i * s2
    w2i = m2i * c2 - m2r * s2
    h = np.zeros((3, 3), np.complex128)
    low = complex((w1r - 1.0) / 3.0, w1i / 3.0)
    skip = complex((w2r - 1.0) / 3.0, w2i / 3.0)
    h[1, 0] = low
    h[2, 1] = low
    h[0, 1] = low.conjugate()
    h[1, 2] = low.conjugate()
    h[2, 0] = skip
    h[0, 2] = skip.conjugate()
    ev = _hermitian_eigenvalues(h)
    return 0.5 * (abs(ev[0]) + abs(ev[1]) + abs(ev[2]))


@njit(cache=True, parallel=True)
def parity_curve(u, phis_true, b, strat_code, step, grid_size):
    trials, k = u.shape
    out = np.empty((trials, k))
    c1 = np.empty(grid_size)
    s1 = np.empty(grid_size)
    c2 = np.empty(grid_size)
    s2 = np.empty(grid_size)
    for g in range(grid_size):
        ph = 2.0 * math.pi * g / grid_size
        c1[g] = math.cos(ph)
        s1[g] = math.sin(ph)
        c2[g] = math.cos(2.0 * ph)
        s2[g] = math.sin(2.0 * ph)
    half_pi = 0.5 * math.pi
    for t in prange(trials):
        w = np.full(grid_size, 1.0 / grid_size)
        est = 0.0
        pt = phis_true[t]
        for r in range(k):
            if strat_code == 0:
                chi = 0.0
            elif strat_code == 1:
                chi = (r % 2) * half_pi
            elif strat_code == 2:
                chi = (r * step) % (2.0 * math.pi)
            else:
                chi = est + half_pi
            p_even = 0.5 + b * math.cos(pt - chi)
            sgn = 1.0 if u[t, r] < p_even else -1.0
            cc = math.cos(chi)
            sc = math.sin(chi)
            tot = 0.0
            for g in range(grid_size):
                w[g] *= 0.5 + sgn * b * (c1[g] * cc + s1[g] * sc)
                tot += w[g]
            inv = 1.0 / tot
            m1r = 0.0
            m1i = 0.0
            m2r = 0.0
            m2i = 0.0
            for g in range(grid_size):
                w[g] *= inv
                m1r += w[g] * c1[g]
                m1i += w[g] * s1[g]
                m2r += w[g] * c2[g]
                m2i += w[g] * s2[g]
            if math.sqrt(m1r * m1r + m1i * m1i) > ESTIMATOR_MODULUS_FLOOR:
                est = math.atan2(m1i, m1r)
            else:
                est = 0.0
            out[t, r] = _distance3(m1r, m1i, m2r, m2i, est)
    return out


@njit(cache=True, parallel=True)
def mub_curve(u, phis_true, coef_single, coef_double, grid_size):
    trials, k = u.shape
    out = np.empty((trials, k))
    third = 2.0 * math.pi / 3.0
    c1 = np.empty(grid_size)
    s1 = np.empty(grid_size)
    c2 = np.empty(grid_size)
    s2 = np.empty(grid_size)
    for g in range(grid_size):
        ph = 2.0 * math.pi * g / grid_size
        c1[g] = math.cos(ph)
        s1[g] = math.sin(ph)
        c2[g] = math.cos(2.0 * ph)
        s2[g] = math.sin(2.0 * ph)
    for t in prange(trials):
        w = np.full(grid_size, 1.0 / grid_size)
        est = 0.0
        pt = phis_true[t]
        for r in range(k):
            nu = est + math.pi / 3.0
            x = pt - nu
            p0 = (1.0 + 2.0 * coef_single * math.cos(x)
                  + 2.0 * coef_double * math.cos(2.0 * x)) / 3.0
            p1 = (1.0 + 2.0 * coef_single * math.cos(third - x)
                  + 2.0 * coef_double * math.cos(2.0 * third - 2.0 * x)) / 3.0
            uu = u[t, r]
            if uu < p0:
                l = 0
            elif uu < p0 + p1:
                l = 1
            else:
                l = 2
            # cos(third*l - (phi - nu)) = cos((third*l + nu) - phi)
            ang1 = third * l + nu
            ca = math.cos(ang1)
            sa = math.sin(ang1)
            ang2 = 2.0 * third * l + 2.0 * nu
            cb = math.cos(ang2)
            sb = math.sin(ang2)
            tot = 0.0
            for g in range(grid_size):
                w[g] *= (1.0 + 2.0 * coef_single * (ca * c1[g] + sa * s1[g])
                         + 2.0 * coef_double * (cb * c2[g] + sb * s2[g])) / 3.0
                tot += w[g]
            inv = 1.0 / tot
            m1r = 0.0
            m1i = 0.0
            m2r = 0.0
            m2i = 0.0
            for g in range(grid_size):
                w[g] *= inv
                m1r += w[g] * c1[g]
                m1i += w[g] * s1[g]
                m2r += w[g] * c2[g]
                m2i += w[g] * s2[g]
            if math.sqrt(m1r * m1r + m1i * m1i) > ESTIMATOR_MODULUS_FLOOR:
                est = math.atan2(m1i, m1r)
            else:
                est = 0.0
            out[t, r] = _distance3(m1r, m1i, m2r, m2i, est)
    return out
