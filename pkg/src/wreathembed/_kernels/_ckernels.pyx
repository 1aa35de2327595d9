# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled dense kernels over int32 element codes on a 3-axis torus."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

ctypedef cnp.int32_t code_t

BACKEND = "cython"


cdef cnp.ndarray _offsets(Py_ssize_t n, Py_ssize_t s):
    cdef cnp.ndarray[cnp.intp_t, ndim=1] out = np.empty(n, dtype=np.intp)
    cdef Py_ssize_t i
    s = ((s % n) + n) % n
    for i in range(n):
        out[i] = (i + s) % n
    return out


def table_mul(const code_t[:, ::1] table, const code_t[::1] a, const code_t[::1] b):
    cdef Py_ssize_t i, n = a.shape[0]
    out = np.empty(n, dtype=np.int32)
    cdef code_t[::1] o = out
    for i in range(n):
        o[i] = table[a[i], b[i]]
    return out


def shifted_product(const code_t[:, ::1] table,
                    const code_t[:, :, ::1] f, fshift,
                    const code_t[:, :, ::1] g, gshift):
    """out[p] = table[f[p + fshift], g[p + gshift]] with wraparound."""
    cdef Py_ssize_t n0 = f.shape[0], n1 = f.shape[1], n2 = f.shape[2]
    cdef cnp.intp_t[::1] fi0 = _offsets(n0, fshift[0])
    cdef cnp.intp_t[::1] fi1 = _offsets(n1, fshift[1])
    cdef cnp.intp_t[::1] fi2 = _offsets(n2, fshift[2])
    cdef cnp.intp_t[::1] gi0 = _offsets(n0, gshift[0])
    cdef cnp.intp_t[::1] gi1 = _offsets(n1, gshift[1])
    cdef cnp.intp_t[::1] gi2 = _offsets(n2, gshift[2])
    out = np.empty((n0, n1, n2), dtype=np.int32)
    cdef code_t[:, :, ::1] o = out
    cdef Py_ssize_t i, j, k
    for i in range(n0):
        for j in range(n1):
            for k in range(n2):
                o[i, j, k] = table[f[fi0[i], fi1[j], fi2[k]], g[gi0[i], gi1[j], gi2[k]]]
    return out


def scan_axis(const code_t[:, ::1] table, const code_t[:, :, ::1] d,
              const code_t[:, ::1] start, int axis):
    """Prefix products along ``axis`` (moved to the last position by the caller).

    ``x[.., 0] = start``, ``x[.., i+1] = x[.., i] * d[.., i]``.  Returns ``x``
    and the array of wrap-around values ``x[.., n-1] * d[.., n-1]``.
    """
    cdef Py_ssize_t n0 = d.shape[0], n1 = d.shape[1], n = d.shape[2]
    out = np.empty((n0, n1, n), dtype=np.int32)
    wrap = np.empty((n0, n1), dtype=np.int32)
    cdef code_t[:, :, ::1] x = out
    cdef code_t[:, ::1] w = wrap
    cdef Py_ssize_t i, j, k
    cdef code_t cur
    for i in range(n0):
        for j in range(n1):
            cur = start[i, j]
            for k in range(n):
                x[i, j, k] = cur
                cur = table[cur, d[i, j, k]]
            w[i, j] = cur
    return out, wrap
