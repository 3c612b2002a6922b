"""Pure-Python Dormand-Prince kernel for the H^3_1 Kepler flow.

Mirrors ``_ckernel.pyx`` operation for operation; used when the compiled
extension is unavailable.
"""

import math

import numpy as np

from ._tableau import A, D, E

OK, ESCAPED, STEP_FAILURE, SINGULAR, MAX_STEPS = 0, 1, 2, 3, 4

_EPS = 2.220446049250313e-16


def rhs(y, alpha, R):
    tau, theta, _, p_tau, p_theta, p_phi = y
    R2 = R * R
    ch = math.cosh(tau)
    sech2 = 1.0 / (ch * ch)
    th = math.tanh(tau)
    if p_phi == 0.0:
        L2 = p_theta * p_theta
        phidot = 0.0
        pthdot = 0.0
    else:
        st = math.sin(theta)
        if st == 0.0:
            return [math.nan] * 6
        st2 = st * st
        L2 = p_theta * p_theta + p_phi * p_phi / st2
        phidot = -p_phi * sech2 / (R2 * st2)
        pthdot = -p_phi * p_phi * math.cos(theta) * sech2 / (R2 * st2 * st)
    return [
        p_tau / R2,
        -p_theta * sech2 / R2,
        phidot,
        (alpha / R - L2 * th / R2) * sech2,
        pthdot,
        0.0,
    ]


def _stages(y, k1, h, alpha, R):
    """Stages k1..k7; the last stage point is the 5th-order solution (FSAL)."""
    ks = [k1]
    for i in range(1, 7):
        a = A[i]
        yi = [y[j] + h * sum(a[m] * ks[m][j] for m in range(i)) for j in range(6)]
        ks.append(rhs(yi, alpha, R))
    return ks, yi


def step(y, h, alpha, R):
    """One 5th-order Dormand-Prince step of size ``h`` from ``y``."""
    y = [float(v) for v in y]
    _, y_new = _stages(y, rhs(y, alpha, R), h, alpha, R)
    return np.array(y_new)


def _norm(v, y0, y1, rtol, atol):
    acc = 0.0
    for j in range(6):
        sc = atol + rtol * max(abs(y0[j]), abs(y1[j]))
        acc += (v[j] / sc) ** 2
    return math.sqrt(acc / 6.0)


def _initial_step(y, f, t_span, rtol, atol, max_step, alpha, R):
    d0 = _norm(y, y, y, rtol, atol)
    d1 = _norm(f, y, y, rtol, atol)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, t_span)
    y1 = [y[j] + h0 * f[j] for j in range(6)]
    f1 = rhs(y1, alpha, R)
    d2 = _norm([f1[j] - f[j] for j in range(6)], y, y, rtol, atol) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100.0 * h0, h1, max_step, t_span)


def integrate(y0, t0, t_end, rtol, atol, max_step, first_step, tau_escape, alpha, R, max_steps):
    """Adaptive propagation from ``t0`` to ``t_end``.

    Returns ``(t, y, dense, status, nfev)``; ``dense[i]`` holds the five
    interpolation vectors for step ``[t[i], t[i+1]]``.
    """
    y = [float(v) for v in y0]
    t = float(t0)
    ts = [t]
    ys = [list(y)]
    dense = []
    k1 = rhs(y, alpha, R)
    nfev = 1
    if not all(math.isfinite(v) for v in k1):
        return _pack(ts, ys, dense, SINGULAR, nfev)
    if first_step > 0.0:
        h = min(first_step, max_step, t_end - t)
    else:
        h = _initial_step(y, k1, t_end - t, rtol, atol, max_step, alpha, R)
        nfev += 1
    status = OK
    rejected = False
    nsteps = 0
    while t < t_end:
        if nsteps >= max_steps:
            status = MAX_STEPS
            break
        last = False
        if t + h >= t_end:
            h = t_end - t
            last = True
        ks, y_new = _stages(y, k1, h, alpha, R)
        nfev += 6
        k7 = ks[6]
        err_vec = [h * sum(E[m] * ks[m][j] for m in range(7)) for j in range(6)]
        err = _norm(err_vec, y, y_new, rtol, atol)
        if not math.isfinite(err) or not all(math.isfinite(v) for v in k7):
            status = SINGULAR
            break
        if err <= 1.0:
            nsteps += 1
            r2 = [y_new[j] - y[j] for j in range(6)]
            r3 = [h * k1[j] - r2[j] for j in range(6)]
            r4 = [r2[j] - h * k7[j] - r3[j] for j in range(6)]
            r5 = [h * sum(D[m] * ks[m][j] for m in range(7)) for j in range(6)]
            dense.append([list(y), r2, r3, r4, r5])
            t = t_end if last else t + h
            y = y_new
            k1 = k7
            ts.append(t)
            ys.append(list(y))
            if abs(y[0]) >= tau_escape:
                status = ESCAPED
                break
            fac = 10.0 if err == 0.0 else min(10.0, max(0.2, 0.9 * err ** -0.2))
            if rejected:
                fac = min(fac, 1.0)
            rejected = False
            h = min(h * fac, max_step)
        else:
            rejected = True
            h *= max(0.2, 0.9 * err ** -0.2)
        if h <= 16.0 * _EPS * max(abs(t), 1.0):
            status = STEP_FAILURE
            break
    return _pack(ts, ys, dense, status, nfev)


def _pack(ts, ys, dense, status, nfev):
    rc = np.array(dense, dtype=float).reshape(len(dense), 5, 6)
    return np.array(ts), np.array(ys, dtype=float).reshape(len(ys), 6), rc, status, nfev
