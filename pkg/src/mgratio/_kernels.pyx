# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: complex log-gamma and log-sum-exp of gamma products.

Same contracts as ``_kernels_py``; see that module for the reference code.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport ceil, fabs

cnp.import_array()

cdef extern from "complex.h" nogil:
    double complex clog(double complex)
    double complex cexp(double complex)
    double creal(double complex)
    double cimag(double complex)

cdef double _HALF_LOG_2PI = 0.91893853320467274178
cdef double _SHIFT = 10.0
cdef double[8] _STIRLING = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
]


cdef inline double complex _lgamma(double complex z) noexcept nogil:
    cdef int n = 0
    cdef int k
    cdef double re = creal(z)
    cdef double complex corr = 0.0
    cdef double complex w, winv, winv2, series
    # far from the real axis in the right half-plane |z| >= 10 already
    if re < _SHIFT and not (re >= 0.0 and fabs(cimag(z)) >= _SHIFT):
        n = <int>ceil(_SHIFT - re)
    for k in range(n):
        corr = corr + clog(z + k)
    w = z + n
    winv = 1.0 / w
    winv2 = winv * winv
    series = 0.0
    for k in range(7, -1, -1):
        series = series * winv2 + _STIRLING[k]
    series = series * winv
    return (w - 0.5) * clog(w) - w + _HALF_LOG_2PI + series - corr


def loggamma(z):
    zin = np.ascontiguousarray(np.asarray(z, dtype=np.complex128).ravel())
    cdef Py_ssize_t i, n = zin.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.empty(n, dtype=np.complex128)
    cdef const double complex[::1] zv = zin
    cdef double complex[::1] ov = out
    with nogil:
        for i in range(n):
            ov[i] = _lgamma(zv[i])
    return out.reshape(np.shape(z))


def log_gamma_sum(t, base, slope, offset, double eps):
    tin = np.ascontiguousarray(np.asarray(t, dtype=np.complex128).ravel())
    cdef const double[::1] cv = np.ascontiguousarray(base, dtype=np.float64)
    cdef const double[::1] sv = np.ascontiguousarray(slope, dtype=np.float64)
    cdef const double[::1] fv = np.ascontiguousarray(offset, dtype=np.float64)
    cdef Py_ssize_t nt = tin.shape[0], nl = cv.shape[0], i, l
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.empty(nt, dtype=np.complex128)
    cdef const double complex[::1] tv = tin
    cdef double complex[::1] ov = out
    cdef double complex[::1] buf = np.empty(nl, dtype=np.complex128)
    cdef double peak
    cdef double complex acc, s
    with nogil:
        for i in range(nt):
            s = tv[i]
            peak = -1e308
            for l in range(nl):
                buf[l] = cv[l] + sv[l] * s + _lgamma(fv[l] + eps * s)
                if creal(buf[l]) > peak:
                    peak = creal(buf[l])
            acc = 0.0
            for l in range(nl):
                acc = acc + cexp(buf[l] - peak)
            ov[i] = clog(acc) + peak
    return out
