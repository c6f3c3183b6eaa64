# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for half-stored Hermitian spectra.

Rows of the input arrays hold coefficients c_0..c_N of a real periodic
field; c_{-n} = conj(c_n) is implied. Batch rows are independent and may
be processed in parallel; each row is reduced in a fixed order so the
result does not depend on the thread count.
"""
import numpy as np
from cython.parallel cimport prange


cdef void _conv_row(const double[:, ::1] ar, const double[:, ::1] ai,
                    const double[:, ::1] br, const double[:, ::1] bi,
                    double[:, ::1] pr, double[:, ::1] pi,
                    Py_ssize_t r, Py_ssize_t N) noexcept nogil:
    cdef Py_ssize_t n, k, m
    cdef double xr, xi, yr, yi, sr, si
    for n in range(N + 1):
        sr = 0.0
        si = 0.0
        for k in range(n - N, N + 1):
            m = n - k
            if k >= 0:
                xr = ar[r, k]
                xi = ai[r, k]
            else:
                xr = ar[r, -k]
                xi = -ai[r, -k]
            if m >= 0:
                yr = br[r, m]
                yi = bi[r, m]
            else:
                yr = br[r, -m]
                yi = -bi[r, -m]
            sr = sr + (xr * yr - xi * yi)
            si = si + (xr * yi + xi * yr)
        pr[r, n] = sr
        pi[r, n] = si


def conv_direct(a, b, int threads=1):
    """Galerkin-truncated convolution of two (R, N+1) complex arrays."""
    cdef double[:, ::1] ar = np.ascontiguousarray(a.real, dtype=np.float64)
    cdef double[:, ::1] ai = np.ascontiguousarray(a.imag, dtype=np.float64)
    cdef double[:, ::1] br = np.ascontiguousarray(b.real, dtype=np.float64)
    cdef double[:, ::1] bi = np.ascontiguousarray(b.imag, dtype=np.float64)
    cdef Py_ssize_t R = ar.shape[0]
    cdef Py_ssize_t N = ar.shape[1] - 1
    out_r = np.empty((R, N + 1), dtype=np.float64)
    out_i = np.empty((R, N + 1), dtype=np.float64)
    cdef double[:, ::1] pr = out_r
    cdef double[:, ::1] pi = out_i
    cdef Py_ssize_t r
    if threads < 1:
        threads = 1
    if R > 1 and threads > 1:
        for r in prange(R, nogil=True, num_threads=threads, schedule="static"):
            _conv_row(ar, ai, br, bi, pr, pi, r, N)
    else:
        with nogil:
            for r in range(R):
                _conv_row(ar, ai, br, bi, pr, pi, r, N)
    return out_r + 1j * out_i


def weighted_sq_sum(c, int power):
    """Neumaier-compensated sum over n = 1..N of n**power * |c_n|**2, per row."""
    cdef double[:, ::1] cr = np.ascontiguousarray(c.real, dtype=np.float64)
    cdef double[:, ::1] ci = np.ascontiguousarray(c.imag, dtype=np.float64)
    cdef Py_ssize_t R = cr.shape[0]
    cdef Py_ssize_t N = cr.shape[1] - 1
    out = np.empty(R, dtype=np.float64)
    cdef double[::1] res = out
    cdef Py_ssize_t r, n
    cdef double s, comp, term, t, w
    with nogil:
        for r in range(R):
            s = 0.0
            comp = 0.0
            for n in range(1, N + 1):
                w = 1.0
                if power == 2:
                    w = <double>(n * n)
                elif power == 1:
                    w = <double>n
                elif power != 0:
                    w = (<double>n) ** power
                term = w * (cr[r, n] * cr[r, n] + ci[r, n] * ci[r, n])
                t = s + term
                if (s if s >= 0 else -s) >= (term if term >= 0 else -term):
                    comp = comp + ((s - t) + term)
                else:
                    comp = comp + ((term - t) + s)
                s = t
            res[r] = s + comp
    return out
