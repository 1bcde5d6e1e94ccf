# cython: boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled kernel for batch orthogonal matching pursuit.

Streams one sample at a time: BLAS dgemv for the correlation scan, a fresh
normal-equations factorization (LAPACK dposv) per selection, and an explicit
residual rebuild. Same greedy rule and return contract as ecdl._omp_numpy.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs
from libc.string cimport memcpy
from scipy.linalg.cython_blas cimport daxpy, ddot, dgemv
from scipy.linalg.cython_lapack cimport dposv

cnp.import_array()

KERNEL_NAME = "compiled"


def encode_batch(D, Y, int k, double tol):
    """Greedy OMP on every column of Y against unit-norm atoms D.

    Returns (idx, coef, lens) exactly as ecdl._omp_numpy.encode_batch.
    """
    cdef cnp.ndarray[double, ndim=2, mode="c"] Dt = np.ascontiguousarray(np.asarray(D, dtype=np.float64).T)
    cdef cnp.ndarray[double, ndim=2, mode="c"] Yt = np.ascontiguousarray(np.asarray(Y, dtype=np.float64).T)
    cdef int K = Dt.shape[0]
    cdef int n = Dt.shape[1]
    cdef int M = Yt.shape[0]
    if Yt.shape[1] != n:
        raise ValueError("D and Y row counts differ")
    if k < 0:
        raise ValueError("k must be non-negative")

    idx_arr = np.full((M, k), -1, dtype=np.int32)
    coef_arr = np.zeros((M, k), dtype=np.float64)
    lens_arr = np.zeros(M, dtype=np.int32)
    if k == 0 or M == 0:
        return idx_arr, coef_arr, lens_arr

    cdef cnp.int32_t[:, ::1] idx = idx_arr
    cdef double[:, ::1] coef = coef_arr
    cdef cnp.int32_t[::1] lens = lens_arr

    cdef cnp.ndarray[double, ndim=1] r_arr = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] c_arr = np.empty(K, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] G_arr = np.empty(k * k, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] rhs_arr = np.empty(k, dtype=np.float64)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] S_arr = np.empty(k, dtype=np.int32)
    cdef double[::1] r = r_arr
    cdef double[::1] c = c_arr
    cdef double[::1] G = G_arr
    cdef double[::1] rhs = rhs_arr
    cdef cnp.int32_t[::1] S = S_arr

    cdef int col, t, j, p, q, best, info, nrhs
    cdef int inc = 1
    cdef double one = 1.0, zero = 0.0
    cdef double ynorm2, thresh2, rnorm2, a, bestabs, neg, g
    cdef double *dptr = &Dt[0, 0]
    cdef double *yrow

    for col in range(M):
        yrow = &Yt[col, 0]
        memcpy(&r[0], yrow, n * sizeof(double))
        ynorm2 = ddot(&n, yrow, &inc, yrow, &inc)
        thresh2 = tol * tol * ynorm2
        rnorm2 = ynorm2
        t = 0
        while t < k and rnorm2 > thresh2:
            # correlations c = D^T r; Dt's buffer is D in column-major order
            dgemv("T", &n, &K, &one, dptr, &n, &r[0], &inc, &zero, &c[0], &inc)
            best = -1
            bestabs = 0.0
            for j in range(K):
                a = fabs(c[j])
                if a > bestabs:
                    bestabs = a
                    best = j
            if best < 0:
                break
            S[t] = best
            t += 1
            # least squares on the selected atoms via normal equations
            for p in range(t):
                rhs[p] = ddot(&n, &Dt[S[p], 0], &inc, yrow, &inc)
                for q in range(p, t):
                    g = ddot(&n, &Dt[S[p], 0], &inc, &Dt[S[q], 0], &inc)
                    G[p * t + q] = g
                    G[q * t + p] = g
            nrhs = 1
            dposv("U", &t, &nrhs, &G[0], &t, &rhs[0], &t, &info)
            if info != 0:
                raise np.linalg.LinAlgError(
                    f"singular atom subsystem for sample {col}, "
                    f"support {[int(S[p]) for p in range(t)]}"
                )
            memcpy(&r[0], yrow, n * sizeof(double))
            for p in range(t):
                neg = -rhs[p]
                daxpy(&n, &neg, &Dt[S[p], 0], &inc, &r[0], &inc)
            rnorm2 = ddot(&n, &r[0], &inc, &r[0], &inc)
        for p in range(t):
            idx[col, p] = S[p]
            coef[col, p] = rhs[p]
        lens[col] = t

    return idx_arr, coef_arr, lens_arr
