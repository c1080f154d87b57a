# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops: Airy evaluation, Airy kernel matrices, LPP dynamic programs.

The algorithms mirror the numpy versions in airyfun.py and _fallback.py
line for line; tests compare the two backends.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, exp, sin, cos, fabs, fmod, M_PI, pow, round

cnp.import_array()

cdef double _SQPI = sqrt(M_PI)
cdef double X_POS = 9.0
cdef double X_NEG = -10.0
cdef int N_TAYLOR = 28

cdef double[::1] _tab_ai
cdef double[::1] _tab_aip
cdef double[::1] _U
cdef double[::1] _V
cdef double _x0 = -10.0
cdef double _step = 0.125
cdef int _ntab = 0


def set_table(double[::1] tab_ai, double[::1] tab_aip, double x0, double step,
              double[::1] U, double[::1] V):
    global _tab_ai, _tab_aip, _U, _V, _x0, _step, _ntab
    _tab_ai = tab_ai
    _tab_aip = tab_aip
    _U = U
    _V = V
    _x0 = x0
    _step = step
    _ntab = tab_ai.shape[0]


cdef double _series(double[::1] c, int offset, int stride, double z, double sign) nogil:
    cdef double total = 0.0, p = 1.0, term, a, prev = 1e308
    cdef int k = offset
    while k < c.shape[0]:
        term = c[k] * p
        a = fabs(term)
        if a >= prev:
            break
        total += term
        prev = a
        if a <= 1e-17 * fabs(total):
            break
        p *= sign / z
        k += stride
    return total


cdef void _airy1(double x, int scaled, double* ai, double* aip) nogil:
    cdef double zeta, q, e, ph, s, c, ue, uo, ve, vo, z, z2
    cdef double x0, h, am1, an, an1, ak, y, dy, hp, hpm
    cdef int idx, k
    if x >= X_POS:
        zeta = 2.0 / 3.0 * x * sqrt(x)
        q = pow(x, 0.25)
        ai[0] = _series(_U, 0, 1, zeta, -1.0) / (2 * _SQPI * q)
        aip[0] = -q * _series(_V, 0, 1, zeta, -1.0) / (2 * _SQPI)
        if not scaled:
            e = exp(-zeta)
            ai[0] *= e
            aip[0] *= e
        return
    if x <= X_NEG:
        z = -x
        zeta = 2.0 / 3.0 * z * sqrt(z)
        q = pow(z, 0.25)
        ph = fmod(zeta, 2 * M_PI) + M_PI / 4
        s = sin(ph)
        c = cos(ph)
        z2 = zeta * zeta
        ue = _series(_U, 0, 2, z2, -1.0)
        uo = _series(_U, 1, 2, z2, -1.0) / zeta
        ve = _series(_V, 0, 2, z2, -1.0)
        vo = _series(_V, 1, 2, z2, -1.0) / zeta
        ai[0] = (s * ue - c * uo) / (_SQPI * q)
        aip[0] = -q * (c * ve + s * vo) / _SQPI
        return
    idx = <int>round((x - _x0) / _step)
    if idx < 0:
        idx = 0
    if idx > _ntab - 1:
        idx = _ntab - 1
    x0 = _x0 + idx * _step
    h = x - x0
    am1 = 0.0
    an = _tab_ai[idx]
    an1 = _tab_aip[idx]
    y = an + an1 * h
    dy = an1
    hp = h
    for k in range(2, N_TAYLOR):
        ak = (x0 * an + am1) / (k * (k - 1.0))
        hpm = hp
        hp = hp * h
        y += ak * hp
        dy += k * ak * hpm
        am1 = an
        an = an1
        an1 = ak
    if scaled and x > 0:
        e = exp(2.0 / 3.0 * x * sqrt(x))
        y *= e
        dy *= e
    ai[0] = y
    aip[0] = dy


def airy_eval(double[::1] x, int scaled, double[::1] out_ai, double[::1] out_aip):
    cdef Py_ssize_t i, n = x.shape[0]
    cdef double a, d
    with nogil:
        for i in range(n):
            _airy1(x[i], scaled, &a, &d)
            out_ai[i] = a
            out_aip[i] = d


def airy_kernel_matrix(double[::1] x, double[::1] y):
    """K_Ai(x_i, y_j) with the series form near the diagonal."""
    cdef Py_ssize_t i, j, n = x.shape[0], m = y.shape[0]
    out = np.empty((n, m))
    cdef double[:, ::1] K = out
    cdef double[::1] ax = np.empty(n), dx = np.empty(n), ay = np.empty(m), dy = np.empty(m)
    cdef double a, d, c, e, diff
    with nogil:
        for i in range(n):
            _airy1(x[i], 0, &ax[i], &dx[i])
        for j in range(m):
            _airy1(y[j], 0, &ay[j], &dy[j])
        for i in range(n):
            for j in range(m):
                diff = x[i] - y[j]
                if fabs(diff) < 1e-4:
                    c = 0.5 * (x[i] + y[j])
                    e = -0.5 * diff
                    _airy1(c, 0, &a, &d)
                    K[i, j] = d * d - c * a * a + e * e * (2 * c * d * d - 2 * c * c * a * a + a * d) / 3.0
                else:
                    K[i, j] = (ax[i] * dy[j] - dx[i] * ay[j]) / (x[i] - y[j])
    return out


def lpp_point(long[:, ::1] w):
    """L(i,j) = w(i,j) + max(L(i-1,j), L(i,j-1)) with zero boundary."""
    cdef Py_ssize_t i, j, n = w.shape[0], m = w.shape[1]
    out = np.zeros((n, m), dtype=np.int64)
    cdef long[:, ::1] L = out
    cdef long up, left
    with nogil:
        for i in range(n):
            for j in range(m):
                up = L[i - 1, j] if i > 0 else 0
                left = L[i, j - 1] if j > 0 else 0
                L[i, j] = w[i, j] + (up if up > left else left)
    return out


def lpp_line(long[::1] w, long N):
    """Point-to-line DP on the triangle i + j <= 2N (1-based).

    w holds the triangle row by row: row i (i = 1..2N-1) has 2N - i entries.
    Returns the endpoint values L(i, 2N-i), i = 1..2N-1.
    """
    cdef Py_ssize_t i, j, off = 0, width
    cdef long M = 2 * N
    buf_arr = np.zeros(M + 1, dtype=np.int64)
    end_arr = np.empty(M - 1, dtype=np.int64)
    cdef long[::1] buf = buf_arr
    cdef long[::1] end = end_arr
    cdef long left, up
    with nogil:
        for i in range(1, M):
            width = M - i
            left = 0
            for j in range(1, width + 1):
                up = buf[j]
                if left > up:
                    up = left
                left = w[off + j - 1] + up
                buf[j] = left
            buf[width + 1] = 0
            end[i - 1] = buf[width]
            off += width
    return end_arr
