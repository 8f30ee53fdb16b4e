# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels for the exhaustive grid search.

pairwise_min_sum dominates the oracle's runtime: for m candidate
subspaces and n points it reduces the (m, m, n) min-tensor without
materializing it.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "cython"


def pairwise_min_sum(object dp_obj):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] dp = np.ascontiguousarray(dp_obj, dtype=np.float64)
    cdef Py_ssize_t m = dp.shape[0]
    cdef Py_ssize_t n = dp.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((m, m), dtype=np.float64)
    cdef Py_ssize_t i, j, k
    cdef double acc, a, b
    cdef double[:, ::1] d = dp
    cdef double[:, ::1] o = out
    for i in range(m):
        for j in range(i, m):
            acc = 0.0
            for k in range(n):
                a = d[i, k]
                b = d[j, k]
                acc += a if a < b else b
            o[i, j] = acc
            o[j, i] = acc
    return out


def cross_min_sum(object da_obj, object db_obj):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] da = np.ascontiguousarray(da_obj, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] db = np.ascontiguousarray(db_obj, dtype=np.float64)
    cdef Py_ssize_t ma = da.shape[0]
    cdef Py_ssize_t mb = db.shape[0]
    cdef Py_ssize_t n = da.shape[1]
    if db.shape[1] != n:
        raise ValueError("column counts differ")
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((ma, mb), dtype=np.float64)
    cdef Py_ssize_t i, j, k
    cdef double acc, a, b
    cdef double[:, ::1] x = da
    cdef double[:, ::1] y = db
    cdef double[:, ::1] o = out
    for i in range(ma):
        for j in range(mb):
            acc = 0.0
            for k in range(n):
                a = x[i, k]
                b = y[j, k]
                acc += a if a < b else b
            o[i, j] = acc
    return out
