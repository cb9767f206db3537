# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the double sine strip integral.

Mirrors ``_kernels_py`` exactly; see there for the formulas.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sin, cos, exp, expm1, log, atan2, hypot, M_PI

cnp.import_array()


cdef inline double complex _neg_cexpm1(double complex z) nogil:
    # 1 - e^z, accurate for small |z|
    cdef double s = sin(0.5 * z.imag)
    cdef double re = expm1(z.real) * cos(z.imag) - 2.0 * s * s
    return -re - 1j * exp(z.real) * sin(z.imag)


cdef inline double complex _cexp(double complex z) nogil:
    cdef double e = exp(z.real)
    return e * cos(z.imag) + 1j * e * sin(z.imag)


def strip_weights(double w1, double w2, double h, Py_ssize_t count):
    from ._kernels_py import strip_weights as _sw
    return _sw(w1, w2, h, count)


def strip_integral(x, double w, double h, P, double C):
    cdef double complex[::1] xv = np.ascontiguousarray(x, dtype=complex).ravel()
    cdef double[::1] p = np.ascontiguousarray(P, dtype=float)
    cdef Py_ssize_t nx = xv.shape[0], nt = p.shape[0], i, k
    out = np.empty(nx, dtype=complex)
    cdef double complex[::1] o = out
    cdef double complex a, step, istep, ep, em, acc
    with nogil:
        for i in range(nx):
            a = w - 2.0 * xv[i]
            # e^{+-a t_k} by recurrence: one complex product per node and sign
            ep = _cexp(0.5 * h * a)
            em = 1.0 / ep
            step = ep * ep
            istep = em * em
            acc = 0.0
            for k in range(nt):
                acc = acc + p[k] * (ep - em)
                ep = ep * step
                em = em * istep
            o[i] = 0.5 * acc - a * C
    return out.reshape(np.shape(x))


def q_series(x, double w1, double w2, c1, c2):
    cdef double complex[::1] xv = np.ascontiguousarray(x, dtype=complex).ravel()
    cdef double complex[::1] a1 = np.ascontiguousarray(c1, dtype=complex)
    cdef double complex[::1] a2 = np.ascontiguousarray(c2, dtype=complex)
    cdef Py_ssize_t nx = xv.shape[0], nk = a1.shape[0], i, k
    out = np.empty(nx, dtype=complex)
    cdef double complex[::1] o = out
    cdef double complex e1, e2, p1, p2, acc
    with nogil:
        for i in range(nx):
            e1 = _cexp(2j * M_PI * xv[i] / w1)
            e2 = _cexp(2j * M_PI * xv[i] / w2)
            p1 = e1
            p2 = e2
            acc = 0.0
            for k in range(nk):
                acc = acc + a2[k] * p2 + a1[k] * p1
                p1 = p1 * e1
                p2 = p2 * e2
            o[i] = acc
    return out.reshape(np.shape(x))


def log_2sin(z):
    cdef double complex[::1] zv = np.ascontiguousarray(z, dtype=complex).ravel()
    cdef Py_ssize_t n = zv.shape[0], i
    out = np.empty(n, dtype=complex)
    cdef double complex[::1] o = out
    cdef double complex e, s
    cdef double re, im
    with nogil:
        for i in range(n):
            s = zv[i]
            if s.imag >= 0:
                e = _neg_cexpm1(2j * s)
                o[i] = 0.5j * M_PI - 1j * s + (log(hypot(e.real, e.imag)) + 1j * atan2(e.imag, e.real))
            else:
                e = _neg_cexpm1(-2j * s)
                o[i] = -0.5j * M_PI + 1j * s + (log(hypot(e.real, e.imag)) + 1j * atan2(e.imag, e.real))
    return out.reshape(np.shape(z))
