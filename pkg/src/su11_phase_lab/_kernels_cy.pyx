# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled field kernels: same arithmetic as _kernels_py, C loops.

Per point the work is ~n^2/2 complex closed-form evaluations; this loop
dominates grid sweeps and ray scans, hence the compiled core.
"""
import numpy as np

cimport numpy as cnp

cnp.import_array()

cdef extern from "complex.h" nogil:
    double complex cexp(double complex)
    double complex clog(double complex)
    double complex conj(double complex)
    double carg(double complex)
    double cabs(double complex)
    double creal(double complex)
    double cimag(double complex)

ctypedef double complex dcomplex

from libc.math cimport log as clog_real


def wigner_points(double k, comps, zs):
    """Unnormalized Wigner sum over component pairs; returns
    (float64 values, max |Im| discarded from the diagonal terms)."""
    cdef cnp.ndarray[dcomplex, ndim=1] c_arr = np.ascontiguousarray(comps, dtype=complex)
    cdef cnp.ndarray[dcomplex, ndim=1] z_arr = np.ascontiguousarray(
        np.asarray(zs, dtype=complex).ravel())
    cdef Py_ssize_t n = c_arr.shape[0]
    cdef Py_ssize_t m = z_arr.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.zeros(m, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] one_m_c2 = \
        1.0 - np.abs(np.asarray(c_arr)) ** 2

    cdef Py_ssize_t t, i, j
    cdef dcomplex z, zc, zi, zj, A, B, uj, ui, term
    cdef double one_m_z2, gj, gi, max_imag = 0.0, acc, im
    with nogil:
        for t in range(m):
            z = z_arr[t]
            zc = conj(z)
            one_m_z2 = 1.0 - creal(z) * creal(z) - cimag(z) * cimag(z)
            acc = 0.0
            for i in range(n):
                zi = c_arr[i]
                for j in range(i, n):
                    zj = c_arr[j]
                    A = 1.0 - zj * zc
                    B = 1.0 - zi * zc
                    uj = (zj - z) / A
                    ui = (zi - z) / B
                    gj = one_m_c2[j] * one_m_z2 / (creal(A) * creal(A) + cimag(A) * cimag(A))
                    gi = one_m_c2[i] * one_m_z2 / (creal(B) * creal(B) + cimag(B) * cimag(B))
                    term = cexp(
                        k * (clog_real(gj) + clog_real(gi))
                        - 2.0 * k * clog(1.0 + conj(uj) * ui)
                        + 2j * k * carg(A * conj(B))
                    )
                    if i == j:
                        im = cimag(term)
                        if im < 0.0:
                            im = -im
                        if im > max_imag:
                            max_imag = im
                        acc += creal(term)
                    else:
                        acc += 2.0 * creal(term)
            out[t] = acc
    return out, max_imag


def overlap_sums(double k, comps, ds):
    """Unnormalized sum_ij <z_i| D(d) |z_j> per displacement."""
    cdef cnp.ndarray[dcomplex, ndim=1] c_arr = np.ascontiguousarray(comps, dtype=complex)
    cdef cnp.ndarray[dcomplex, ndim=1] d_arr = np.ascontiguousarray(
        np.asarray(ds, dtype=complex).ravel())
    cdef Py_ssize_t n = c_arr.shape[0]
    cdef Py_ssize_t m = d_arr.shape[0]
    cdef cnp.ndarray[dcomplex, ndim=1] out = np.zeros(m, dtype=complex)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] one_m_c2 = \
        1.0 - np.abs(np.asarray(c_arr)) ** 2
    cdef cnp.ndarray[cnp.float64_t, ndim=1] log_one_m_c2 = \
        np.log(np.asarray(one_m_c2))

    cdef Py_ssize_t t, i, j
    cdef dcomplex d, den, zjp, acc, phase_j
    cdef double one_m_d2, gjp, log_gjp
    with nogil:
        for t in range(m):
            d = d_arr[t]
            one_m_d2 = 1.0 - creal(d) * creal(d) - cimag(d) * cimag(d)
            acc = 0.0
            for j in range(n):
                den = 1.0 + conj(d) * c_arr[j]
                zjp = (c_arr[j] + d) / den
                gjp = one_m_c2[j] * one_m_d2 / (creal(den) * creal(den) + cimag(den) * cimag(den))
                log_gjp = clog_real(gjp)
                phase_j = cexp(-2j * k * carg(den))
                for i in range(n):
                    acc = acc + phase_j * cexp(
                        k * (log_one_m_c2[i] + log_gjp)
                        - 2.0 * k * clog(1.0 - conj(c_arr[i]) * zjp)
                    )
            out[t] = acc
    return out
