"""Compiled right-hand sides and fixed-step loops.

Models are selected by an integer ``kind`` rather than by passing jitted
functions around, which keeps every kernel eligible for numba's on-disk cache.

Parameter vector layouts (``p``):

    LOTKA_VOLTERRA  beta1, beta2, gamma
    TWO_VAR         alpha, y0, beta1, beta2, gamma
    THREE_VAR       alpha1, alpha2, y0, z0, b12, b13, b21, b23, b31, b32, g1, g2, g3
    LOG_THREE_VAR   as THREE_VAR
    DIRECT_SDE      THREE_VAR + sigma1, sigma2, sigma3
    INTERACTION     DIRECT_SDE + c1, c2, T1, T2
"""

import numpy as np
from numba import njit

LOTKA_VOLTERRA = 0
TWO_VAR = 1
THREE_VAR = 2
LOG_THREE_VAR = 3
DIRECT_SDE = 4
INTERACTION = 5

N_THREE = 13


@njit(cache=True)
def brackets_three(x, y, z, p):
    a1, a2, y0, z0 = p[0], p[1], p[2], p[3]
    b1 = (1.0 - x) * (x - a1) + p[4] * (y - y0) + p[5] * (z - z0)
    b2 = y0 - y + p[6] * x + p[7] * (z - z0)
    b3 = (z0 - z) * (z - a2) + p[8] * x + p[9] * (y - y0)
    return b1, b2, b3


@njit(cache=True)
def evaluate(kind, t, s, p):
    out = np.empty(s.shape[0])
    if kind == LOTKA_VOLTERRA:
        x, y = s[0], s[1]
        out[0] = x * (1.0 - x + p[0] * y)
        out[1] = p[2] * y * (1.0 - y + p[1] * x)
    elif kind == TWO_VAR:
        x, y = s[0], s[1]
        alpha, y0 = p[0], p[1]
        out[0] = x * ((1.0 - x) * (x - alpha) + p[2] * (y - y0))
        out[1] = p[4] * y * (y0 - y + p[3] * x)
    elif kind == THREE_VAR:
        b1, b2, b3 = brackets_three(s[0], s[1], s[2], p)
        out[0] = s[0] * (p[10] * b1)
        out[1] = s[1] * (p[11] * b2)
        out[2] = s[2] * (p[12] * b3)
    elif kind == LOG_THREE_VAR:
        b1, b2, b3 = brackets_three(np.exp(s[0]), np.exp(s[1]), np.exp(s[2]), p)
        out[0] = p[10] * b1
        out[1] = p[11] * b2
        out[2] = p[12] * b3
    elif kind == DIRECT_SDE:
        b1, b2, b3 = brackets_three(s[0], s[1], s[2], p)
        out[0] = s[0] * (p[10] * b1 + 0.5 * p[13] * p[13])
        out[1] = s[1] * (p[11] * b2 + 0.5 * p[14] * p[14])
        out[2] = s[2] * (p[12] * b3 + 0.5 * p[15] * p[15])
    elif kind == INTERACTION:
        c1, c2, t1, t2 = p[16], p[17], p[18], p[19]
        coupled = 1.0 if t >= t1 + t2 else 0.0
        h1 = 0.5 * p[13] * p[13]
        h2 = 0.5 * p[14] * p[14]
        h3 = 0.5 * p[15] * p[15]
        b1, b2, b3 = brackets_three(s[0], s[1], s[2], p)
        out[0] = s[0] * (p[10] * (b1 - c1 * coupled * s[3]) + h1)
        out[1] = s[1] * (p[11] * b2 + h2)
        out[2] = s[2] * (p[12] * b3 + h3)
        if t >= t1:
            b1, b2, b3 = brackets_three(s[3], s[4], s[5], p)
            out[3] = s[3] * (p[10] * (b1 - c2 * coupled * s[0]) + h1)
            out[4] = s[4] * (p[11] * b2 + h2)
            out[5] = s[5] * (p[12] * b3 + h3)
        else:
            out[3] = 0.0
            out[4] = 0.0
            out[5] = 0.0
    else:
        out[:] = np.nan
    return out


@njit(cache=True)
def _all_finite(v):
    for i in range(v.shape[0]):
        if not np.isfinite(v[i]):
            return False
    return True


@njit(cache=True)
def _all_positive(v):
    # exp() of a very negative log state underflows to 0.0
    for i in range(v.shape[0]):
        if not (np.isfinite(v[i]) and v[i] > 0.0):
            return False
    return True


@njit(cache=True)
def rk4(kind, times, y0, p):
    """Classical RK4 over an explicit time array; returns (samples, failed_step)."""
    n = times.shape[0]
    d = y0.shape[0]
    out = np.empty((n, d))
    out[0] = y0
    y = y0.copy()
    for i in range(n - 1):
        t = times[i]
        h = times[i + 1] - t
        k1 = evaluate(kind, t, y, p)
        k2 = evaluate(kind, t + 0.5 * h, y + 0.5 * h * k1, p)
        k3 = evaluate(kind, t + 0.5 * h, y + 0.5 * h * k2, p)
        k4 = evaluate(kind, t + h, y + h * k3, p)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not _all_finite(y):
            return out[: i + 1], i + 1
        out[i + 1] = y
    return out, -1


@njit(cache=True)
def em_log(times, v0, p, sigma, dw):
    """Euler-Maruyama in log coordinates; returns exp of the path."""
    n = times.shape[0]
    out = np.empty((n, 3))
    v = v0.copy()
    out[0] = np.exp(v)
    for i in range(n - 1):
        h = times[i + 1] - times[i]
        b1, b2, b3 = brackets_three(np.exp(v[0]), np.exp(v[1]), np.exp(v[2]), p)
        v[0] += h * p[10] * b1 + sigma[0] * dw[i, 0]
        v[1] += h * p[11] * b2 + sigma[1] * dw[i, 1]
        v[2] += h * p[12] * b3 + sigma[2] * dw[i, 2]
        e = np.exp(v)
        if not _all_positive(e):
            return out[: i + 1], i + 1
        out[i + 1] = e
    return out, -1


@njit(cache=True)
def em_direct(times, x0, p, dw):
    """Euler-Maruyama on the population-coordinate SDE (drift kind DIRECT_SDE)."""
    n = times.shape[0]
    out = np.empty((n, 3))
    x = x0.copy()
    out[0] = x
    for i in range(n - 1):
        h = times[i + 1] - times[i]
        f = evaluate(DIRECT_SDE, times[i], x, p)
        for j in range(3):
            x[j] = x[j] + h * f[j] + p[13 + j] * x[j] * dw[i, j]
        for j in range(3):
            if not (x[j] > 0.0) or not np.isfinite(x[j]):
                return out[: i + 1], i + 1
        out[i + 1] = x
    return out, -1


@njit(cache=True)
def em_interaction_log(times, v0, p, dw):
    """Euler-Maruyama of the coupled six-variable system in log coordinates.

    Ethnos 2 is not advanced at all while t < T1. The suppression term enters
    the log-drift of x as -c * (other ethnos' x), gated at t >= T1 + T2.
    """
    n = times.shape[0]
    out = np.empty((n, 6))
    v = v0.copy()
    out[0] = np.exp(v)
    c1, c2, t1, t2 = p[16], p[17], p[18], p[19]
    for i in range(n - 1):
        t = times[i]
        h = times[i + 1] - t
        e = np.exp(v)
        coupled = 1.0 if t >= t1 + t2 else 0.0
        b1, b2, b3 = brackets_three(e[0], e[1], e[2], p)
        v[0] += h * p[10] * (b1 - c1 * coupled * e[3]) + p[13] * dw[i, 0]
        v[1] += h * p[11] * b2 + p[14] * dw[i, 1]
        v[2] += h * p[12] * b3 + p[15] * dw[i, 2]
        if t >= t1:
            b1, b2, b3 = brackets_three(e[3], e[4], e[5], p)
            v[3] += h * p[10] * (b1 - c2 * coupled * e[0]) + p[13] * dw[i, 3]
            v[4] += h * p[11] * b2 + p[14] * dw[i, 4]
            v[5] += h * p[12] * b3 + p[15] * dw[i, 5]
        e = np.exp(v)
        if not _all_positive(e):
            return out[: i + 1], i + 1
        out[i + 1] = e
    return out, -1


@njit(cache=True)
def jacobian_fd(kind, s, p, rel_step):
    d = s.shape[0]
    jac = np.empty((d, d))
    for j in range(d):
        h = rel_step * max(1.0, abs(s[j]))
        sp = s.copy()
        sm = s.copy()
        sp[j] += h
        sm[j] -= h
        fp = evaluate(kind, 0.0, sp, p)
        fm = evaluate(kind, 0.0, sm, p)
        for i in range(d):
            jac[i, j] = (fp[i] - fm[i]) / (2.0 * h)
    return jac


@njit(cache=True)
def newton_batch(kind, seeds, p, max_iter, tol):
    """Plain Newton from every seed row.

    status: 0 converged, 1 singular Jacobian, 2 blew up, 3 iteration cap.
    """
    m, d = seeds.shape
    roots = seeds.copy()
    status = np.full(m, 3, dtype=np.int64)
    for k in range(m):
        s = seeds[k].copy()
        for _ in range(max_iter + 1):
            f = evaluate(kind, 0.0, s, p)
            if np.sqrt(np.sum(f * f)) < tol:
                status[k] = 0
                break
            jac = jacobian_fd(kind, s, p, 1e-7)
            if abs(np.linalg.det(jac)) < 1e-300:
                status[k] = 1
                break
            s = s - np.linalg.solve(jac, f)
            if not _all_finite(s) or np.max(np.abs(s)) > 1e6:
                status[k] = 2
                break
        roots[k] = s
    return roots, status


@njit(cache=True)
def count_busts(x, level, reset):
    """Excursions above ``level``; a new one needs a dip below ``reset`` first."""
    count = 0
    armed = True
    for i in range(x.shape[0]):
        if armed and x[i] >= level:
            count += 1
            armed = False
        elif not armed and x[i] < reset:
            armed = True
    return count
