# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Dormand-Prince kernel for the H^3_1 Kepler flow.

Same algorithm and operation order as ``_pykernel``.
"""

from libc.math cimport cosh, tanh, sin, cos, sqrt, fabs, pow, isfinite, NAN
from libc.stdlib cimport malloc, realloc, free

import numpy as np

from ._tableau import A as _A, D as _D, E as _E

cdef double A[7][6]
cdef double Dc[7]
cdef double Ec[7]

cdef int _i, _m
for _i in range(7):
    for _m in range(6):
        A[_i][_m] = _A[_i][_m] if _m < len(_A[_i]) else 0.0
    Dc[_i] = _D[_i]
    Ec[_i] = _E[_i]

DEF OK = 0
DEF ESCAPED = 1
DEF STEP_FAILURE = 2
DEF SINGULAR = 3
DEF MAX_STEPS = 4
DEF EPS = 2.220446049250313e-16


cdef void _rhs(const double *y, double alpha, double R, double *out) noexcept nogil:
    cdef double R2 = R * R
    cdef double ch = cosh(y[0])
    cdef double sech2 = 1.0 / (ch * ch)
    cdef double th = tanh(y[0])
    cdef double L2, phidot, pthdot, st, st2
    cdef double p_phi = y[5]
    cdef int k
    if p_phi == 0.0:
        L2 = y[4] * y[4]
        phidot = 0.0
        pthdot = 0.0
    else:
        st = sin(y[1])
        if st == 0.0:
            for k in range(6):
                out[k] = NAN
            return
        st2 = st * st
        L2 = y[4] * y[4] + p_phi * p_phi / st2
        phidot = -p_phi * sech2 / (R2 * st2)
        pthdot = -p_phi * p_phi * cos(y[1]) * sech2 / (R2 * st2 * st)
    out[0] = y[3] / R2
    out[1] = -y[4] * sech2 / R2
    out[2] = phidot
    out[3] = (alpha / R - L2 * th / R2) * sech2
    out[4] = pthdot
    out[5] = 0.0


cdef void _stages(const double *y, double h, double alpha, double R,
                  double ks[7][6], double *y_new) noexcept nogil:
    # ks[0] must hold f(y) on entry
    cdef double yi[6]
    cdef double acc
    cdef int i, j, m
    for i in range(1, 7):
        for j in range(6):
            acc = 0.0
            for m in range(i):
                acc += A[i][m] * ks[m][j]
            yi[j] = y[j] + h * acc
        _rhs(yi, alpha, R, ks[i])
    for j in range(6):
        y_new[j] = yi[j]


cdef double _norm(const double *v, const double *y0, const double *y1,
                  double rtol, double atol) noexcept nogil:
    cdef double acc = 0.0, sc, q
    cdef int j
    for j in range(6):
        sc = atol + rtol * max(fabs(y0[j]), fabs(y1[j]))
        q = v[j] / sc
        acc += q * q
    return sqrt(acc / 6.0)


cdef bint _finite6(const double *v) noexcept nogil:
    cdef int j
    for j in range(6):
        if not isfinite(v[j]):
            return False
    return True


def rhs(y, double alpha, double R):
    cdef double yy[6]
    cdef double out[6]
    for j in range(6):
        yy[j] = y[j]
    _rhs(yy, alpha, R, out)
    return [out[j] for j in range(6)]


def step(y, double h, double alpha, double R):
    """One 5th-order Dormand-Prince step of size ``h`` from ``y``."""
    cdef double yy[6]
    cdef double ks[7][6]
    cdef double y_new[6]
    for j in range(6):
        yy[j] = y[j]
    _rhs(yy, alpha, R, ks[0])
    _stages(yy, h, alpha, R, ks, y_new)
    return np.array([y_new[j] for j in range(6)])


cdef double _initial_step(const double *y, const double *f, double t_span, double rtol,
                          double atol, double max_step, double alpha, double R) noexcept nogil:
    cdef double d0 = _norm(y, y, y, rtol, atol)
    cdef double d1 = _norm(f, y, y, rtol, atol)
    cdef double h0, h1, d2
    cdef double y1[6]
    cdef double f1[6]
    cdef double df[6]
    cdef int j
    if d0 < 1e-5 or d1 < 1e-5:
        h0 = 1e-6
    else:
        h0 = 0.01 * d0 / d1
    h0 = min(h0, t_span)
    for j in range(6):
        y1[j] = y[j] + h0 * f[j]
    _rhs(y1, alpha, R, f1)
    for j in range(6):
        df[j] = f1[j] - f[j]
    d2 = _norm(df, y, y, rtol, atol) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = pow(0.01 / max(d1, d2), 0.2)
    return min(min(100.0 * h0, h1), min(max_step, t_span))


def integrate(y0, double t0, double t_end, double rtol, double atol, double max_step,
              double first_step, double tau_escape, double alpha, double R, long max_steps):
    """Adaptive propagation from ``t0`` to ``t_end``; see ``_pykernel.integrate``."""
    cdef double y[6]
    cdef double y_new[6]
    cdef double ks[7][6]
    cdef double errv[6]
    cdef double t = t0, h, err, fac, acc
    cdef long cap = 1024, n = 1, nsteps = 0, nfev = 1
    cdef int status = OK, j, m
    cdef bint rejected = False, last
    cdef double *tbuf = <double *> malloc(cap * sizeof(double))
    cdef double *ybuf = <double *> malloc(cap * 6 * sizeof(double))
    cdef double *dbuf = <double *> malloc(cap * 30 * sizeof(double))
    cdef double *row
    if tbuf == NULL or ybuf == NULL or dbuf == NULL:
        free(tbuf); free(ybuf); free(dbuf)
        raise MemoryError()
    try:
        for j in range(6):
            y[j] = y0[j]
            ybuf[j] = y[j]
        tbuf[0] = t
        with nogil:
            _rhs(y, alpha, R, ks[0])
            if not _finite6(ks[0]):
                status = SINGULAR
            else:
                if first_step > 0.0:
                    h = min(min(first_step, max_step), t_end - t)
                else:
                    h = _initial_step(y, ks[0], t_end - t, rtol, atol, max_step, alpha, R)
                    nfev += 1
            while status == OK and t < t_end:
                if nsteps >= max_steps:
                    status = MAX_STEPS
                    break
                last = False
                if t + h >= t_end:
                    h = t_end - t
                    last = True
                _stages(y, h, alpha, R, ks, y_new)
                nfev += 6
                for j in range(6):
                    acc = 0.0
                    for m in range(7):
                        acc += Ec[m] * ks[m][j]
                    errv[j] = h * acc
                err = _norm(errv, y, y_new, rtol, atol)
                if not isfinite(err) or not _finite6(ks[6]):
                    status = SINGULAR
                    break
                if err <= 1.0:
                    nsteps += 1
                    if n + 1 > cap:
                        cap *= 2
                        tbuf = <double *> realloc(tbuf, cap * sizeof(double))
                        ybuf = <double *> realloc(ybuf, cap * 6 * sizeof(double))
                        dbuf = <double *> realloc(dbuf, cap * 30 * sizeof(double))
                        if tbuf == NULL or ybuf == NULL or dbuf == NULL:
                            with gil:
                                raise MemoryError()
                    row = dbuf + (n - 1) * 30
                    for j in range(6):
                        row[j] = y[j]
                        row[6 + j] = y_new[j] - y[j]
                        row[12 + j] = h * ks[0][j] - row[6 + j]
                        row[18 + j] = row[6 + j] - h * ks[6][j] - row[12 + j]
                        acc = 0.0
                        for m in range(7):
                            acc += Dc[m] * ks[m][j]
                        row[24 + j] = h * acc
                    if last:
                        t = t_end
                    else:
                        t = t + h
                    for j in range(6):
                        y[j] = y_new[j]
                        ks[0][j] = ks[6][j]
                        ybuf[n * 6 + j] = y[j]
                    tbuf[n] = t
                    n += 1
                    if fabs(y[0]) >= tau_escape:
                        status = ESCAPED
                        break
                    if err == 0.0:
                        fac = 10.0
                    else:
                        fac = min(10.0, max(0.2, 0.9 * pow(err, -0.2)))
                    if rejected:
                        fac = min(fac, 1.0)
                    rejected = False
                    h = min(h * fac, max_step)
                else:
                    rejected = True
                    h *= max(0.2, 0.9 * pow(err, -0.2))
                if h <= 16.0 * EPS * max(fabs(t), 1.0):
                    status = STEP_FAILURE
                    break
        ts = np.empty(n)
        ys = np.empty((n, 6))
        rc = np.empty((n - 1, 5, 6))
        _copy(tbuf, ts, ybuf, ys, dbuf, rc, n)
    finally:
        free(tbuf); free(ybuf); free(dbuf)
    return ts, ys, rc, status, nfev


cdef void _copy(double *tbuf, double[::1] ts, double *ybuf, double[:, ::1] ys,
                double *dbuf, double[:, :, ::1] rc, long n):
    cdef long i
    cdef int j, r
    for i in range(n):
        ts[i] = tbuf[i]
        for j in range(6):
            ys[i, j] = ybuf[i * 6 + j]
    for i in range(n - 1):
        for r in range(5):
            for j in range(6):
                rc[i, r, j] = dbuf[i * 30 + r * 6 + j]
