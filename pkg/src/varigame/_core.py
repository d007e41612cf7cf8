"""Compiled inner loops for backward shooting.

Everything here works in reversed time ``tau = 1 - t`` so that the terminal
conditions ``f(1) = c, f'(1) = 0`` become initial conditions.  The opponent
mixture enters only through tables sampled on the half-step grid
``tau_s = s * dt / 2`` (``s = 0 .. 2n``), which is what RK4 needs.

Force evaluation, kind codes as in :mod:`varigame.kernel`:

* HARMONIC: ``phi'(x) = sum_j w_j cos(m_j x)``; tables ``C[s, j]`` and
  ``S[s, j]`` hold ``sum_k P_k cos(m_j g_k)`` and ``sum_k P_k sin(m_j g_k)``.
* ARCTAN / POLY: tables ``G[s, k]`` hold the opponent functions themselves.

Harmonic kernels use a branch-free polynomial ``sincos`` (|error| < 1e-14
for |x| < 200) so that the multi-shot loop vectorizes; the single-shot path
uses the same routine, which keeps scan and refinement arithmetic identical.
"""

import numpy as np
from numba import njit

HARMONIC, ARCTAN, POLY = 0, 1, 2
EULER, RK4 = 0, 1

# FMA contraction only: no reassociation, the range reduction relies on it
_FM = {"contract"}

_PIO2_HI = 1.57079632679489655800e00
_PIO2_LO = 6.12323399573676603587e-17
_TWO_OVER_PI = 0.636619772367581343076


@njit(fastmath=_FM, inline="always")
def sincos(x):
    k = np.floor(x * _TWO_OVER_PI + 0.5)
    r = (x - k * _PIO2_HI) - k * _PIO2_LO
    z = r * r
    s = r + r * z * (
        -1.6666666666666632e-01
        + z * (8.3333333332248946e-03
               + z * (-1.9841269834414642e-04
                      + z * (2.7557316103728802e-06
                             + z * (-2.5051132068021698e-08 + z * 1.5896230157221844e-10))))
    )
    c = 1.0 - 0.5 * z + z * z * (
        4.16666666666666019037e-02
        + z * (-1.38888888888741095749e-03
               + z * (2.48015872894767294178e-05
                      + z * (-2.75573143513906633035e-07
                             + z * (2.08757232129817482790e-09 + z * -1.13596475577881948265e-11))))
    )
    q = int(k) & 3
    sn = s if q == 0 else (c if q == 1 else (-s if q == 2 else -c))
    cs = c if q == 0 else (-s if q == 1 else (-c if q == 2 else s))
    return sn, cs


@njit(fastmath=_FM, inline="always")
def _harmonic(f, s, half_a, mult, w, C, S):
    acc = 0.0
    for j in range(mult.shape[0]):
        sn, cs = sincos(mult[j] * f)
        acc += cs * (w[j] * C[s, j]) + sn * (w[j] * S[s, j])
    return -half_a * acc


@njit(fastmath=_FM, inline="always")
def _pointwise(f, s, kind, half_a, G, P, dpoly):
    acc = 0.0
    if kind == ARCTAN:
        for k in range(P.shape[0]):
            x = f - G[s, k]
            acc += P[k] / (1.0 + x * x)
    else:
        for k in range(P.shape[0]):
            x = f - G[s, k]
            d = 0.0
            for i in range(dpoly.shape[0] - 1, -1, -1):
                d = d * x + dpoly[i]
            acc += P[k] * d
    return -half_a * acc


@njit(fastmath=_FM, inline="always")
def _accel(f, s, kind, half_a, mult, w, C, S, G, P, dpoly):
    if kind == HARMONIC:
        return _harmonic(f, s, half_a, mult, w, C, S)
    return _pointwise(f, s, kind, half_a, G, P, dpoly)


@njit(fastmath=_FM, inline="always")
def _step(f, v, j, h, method, kind, half_a, mult, w, C, S, G, P, dpoly):
    s = 2 * j
    if method == RK4:
        a1 = _accel(f, s, kind, half_a, mult, w, C, S, G, P, dpoly)
        f2 = f + 0.5 * h * v
        v2 = v + 0.5 * h * a1
        a2 = _accel(f2, s + 1, kind, half_a, mult, w, C, S, G, P, dpoly)
        f3 = f + 0.5 * h * v2
        v3 = v + 0.5 * h * a2
        a3 = _accel(f3, s + 1, kind, half_a, mult, w, C, S, G, P, dpoly)
        f4 = f + h * v3
        v4 = v + h * a3
        a4 = _accel(f4, s + 2, kind, half_a, mult, w, C, S, G, P, dpoly)
        return (f + h / 6.0 * (v + 2.0 * v2 + 2.0 * v3 + v4),
                v + h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4))
    a1 = _accel(f, s, kind, half_a, mult, w, C, S, G, P, dpoly)
    return f + h * v, v + h * a1


@njit(fastmath=_FM, cache=True)
def trajectory(c, n, method, kind, half_a, mult, w, C, S, G, P, dpoly):
    """Integrate one shot; returns (f, df/dtau, first bad index or -1)."""
    h = 1.0 / n
    F = np.empty(n + 1)
    V = np.empty(n + 1)
    F[0] = c
    V[0] = 0.0
    f = c
    v = 0.0
    for j in range(n):
        f, v = _step(f, v, j, h, method, kind, half_a, mult, w, C, S, G, P, dpoly)
        F[j + 1] = f
        V[j + 1] = v
        if not (np.isfinite(f) and np.isfinite(v)):
            F[j + 1:] = np.nan
            V[j + 1:] = np.nan
            return F, V, j + 1
    return F, V, -1


@njit(fastmath=_FM, inline="always")
def _harmonic_many(f, s, half_a, mult, w, C, S, out):
    m = f.shape[0]
    for i in range(m):
        out[i] = 0.0
    for j in range(mult.shape[0]):
        mj = mult[j]
        cw = w[j] * C[s, j]
        sw = w[j] * S[s, j]
        for i in range(m):
            sn, cs = sincos(mj * f[i])
            out[i] += cs * cw + sn * sw
    for i in range(m):
        out[i] *= -half_a


@njit(fastmath=_FM, cache=True)
def _endpoints_harmonic(cs, n, method, half_a, mult, w, C, S):
    m = cs.shape[0]
    h = 1.0 / n
    f = cs.copy()
    v = np.zeros(m)
    a1 = np.empty(m)
    a2 = np.empty(m)
    a3 = np.empty(m)
    a4 = np.empty(m)
    ft = np.empty(m)
    for j in range(n):
        s = 2 * j
        _harmonic_many(f, s, half_a, mult, w, C, S, a1)
        if method == RK4:
            for i in range(m):
                ft[i] = f[i] + 0.5 * h * v[i]
            _harmonic_many(ft, s + 1, half_a, mult, w, C, S, a2)
            for i in range(m):
                ft[i] = f[i] + 0.5 * h * (v[i] + 0.5 * h * a1[i])
            _harmonic_many(ft, s + 1, half_a, mult, w, C, S, a3)
            for i in range(m):
                ft[i] = f[i] + h * (v[i] + 0.5 * h * a2[i])
            _harmonic_many(ft, s + 2, half_a, mult, w, C, S, a4)
            for i in range(m):
                vi = v[i]
                v2 = vi + 0.5 * h * a1[i]
                v3 = vi + 0.5 * h * a2[i]
                v4 = vi + h * a3[i]
                f[i] = f[i] + h / 6.0 * (vi + 2.0 * v2 + 2.0 * v3 + v4)
                v[i] = vi + h / 6.0 * (a1[i] + 2.0 * a2[i] + 2.0 * a3[i] + a4[i])
        else:
            for i in range(m):
                f[i] = f[i] + h * v[i]
                v[i] = v[i] + h * a1[i]
    return f, v


@njit(fastmath=_FM, cache=True)
def _endpoints_pointwise(cs, n, method, kind, half_a, G, P, dpoly):
    m = cs.shape[0]
    h = 1.0 / n
    f = cs.copy()
    v = np.zeros(m)
    e1 = np.zeros(0)
    e2 = np.zeros((0, 0))
    for i in range(m):
        fi = f[i]
        vi = 0.0
        for j in range(n):
            fi, vi = _step(fi, vi, j, h, method, kind, half_a, e1, e1, e2, e2, G, P, dpoly)
            if not (np.isfinite(fi) and np.isfinite(vi)):
                break
        f[i] = fi
        v[i] = vi
    return f, v


def endpoints(cs, n, method, kind, half_a, mult, w, C, S, G, P, dpoly):
    """Many shots at once; returns f(tau=1), df/dtau(tau=1), bad indices.

    The harmonic path keeps the shot index innermost so it vectorizes.  A
    diverged shot reports ``n`` as its bad index (the step is not tracked).
    """
    if kind == HARMONIC:
        f, v = _endpoints_harmonic(cs, n, method, half_a, mult, w, C, S)
    else:
        f, v = _endpoints_pointwise(cs, n, method, kind, half_a, G, P, dpoly)
    bad = np.where(np.isfinite(f) & np.isfinite(v), -1, n)
    f = np.where(bad < 0, f, np.nan)
    v = np.where(bad < 0, v, np.nan)
    return f, v, bad
