# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled history kernels; see ``_kernels_py`` for the reference semantics."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def nabla_coefficients(double n, Py_ssize_t K):
    cdef cnp.ndarray[double, ndim=1] out = np.empty(K + 1)
    cdef double[::1] c = out
    cdef Py_ssize_t j
    c[0] = 1.0
    for j in range(K):
        c[j + 1] = c[j] * (j - n) / (j + 1)
    return out


def history_sum(c_in, Y_in, Py_ssize_t k, Py_ssize_t start):
    cdef double[::1] c = np.ascontiguousarray(c_in, dtype=np.float64)
    cdef double[:, ::1] Y = np.ascontiguousarray(Y_in, dtype=np.float64)
    cdef Py_ssize_t m = Y.shape[1], j, i
    cdef cnp.ndarray[double, ndim=1] out = np.zeros(m)
    cdef double[::1] o = out
    cdef double w
    for j in range(start, k + 1):
        w = c[k - j]
        for i in range(m):
            o[i] += w * Y[j, i]
    return out


def nabla_all(c_in, Y_in):
    cdef double[::1] c = np.ascontiguousarray(c_in, dtype=np.float64)
    cdef double[:, ::1] Y = np.ascontiguousarray(Y_in, dtype=np.float64)
    cdef Py_ssize_t N = Y.shape[0], m = Y.shape[1], k, j, i
    cdef cnp.ndarray[double, ndim=2] out = np.zeros((N, m))
    cdef double[:, ::1] o = out
    cdef double w
    for k in range(N):
        for j in range(k + 1):
            w = c[k - j]
            for i in range(m):
                o[k, i] += w * Y[j, i]
    return out


def fractional_march(c_in, SinvF_in, W_in, Y0_in):
    cdef double[::1] c = np.ascontiguousarray(c_in, dtype=np.float64)
    cdef double[:, ::1] S = np.ascontiguousarray(SinvF_in, dtype=np.float64)
    cdef double[:, ::1] W = np.ascontiguousarray(W_in, dtype=np.float64)
    cdef double[::1] Y0 = np.ascontiguousarray(Y0_in, dtype=np.float64).reshape(-1)
    cdef Py_ssize_t K = W.shape[0] - 1, m = W.shape[1], k, j, i, l
    cdef cnp.ndarray[double, ndim=2] out = np.zeros((K + 1, m))
    cdef double[:, ::1] Y = out
    cdef double[::1] h = np.zeros(m)
    cdef double w, acc
    for i in range(m):
        Y[0, i] = Y0[i]
    for k in range(1, K + 1):
        for i in range(m):
            h[i] = 0.0
        for j in range(k):
            w = c[k - j]
            for i in range(m):
                h[i] += w * Y[j, i]
        for i in range(m):
            acc = 0.0
            for l in range(m):
                acc += S[i, l] * h[l]
            Y[k, i] = W[k, i] - acc
    return out


def telescope(A_in, U_in, Y0_in, Py_ssize_t K):
    cdef double[:, ::1] A = np.ascontiguousarray(A_in, dtype=np.float64)
    cdef double[:, ::1] U = np.ascontiguousarray(U_in, dtype=np.float64).reshape(-1, A.shape[0])
    cdef double[::1] Y0 = np.ascontiguousarray(Y0_in, dtype=np.float64).reshape(-1)
    cdef Py_ssize_t m = A.shape[0], k, j, i, l
    cdef cnp.ndarray[double, ndim=2] out = np.zeros((K + 1, m))
    cdef double[:, ::1] Y = out
    cdef double acc
    for i in range(m):
        Y[0, i] = Y0[i]
    for k in range(1, K + 1):
        for i in range(m):
            acc = 0.0
            for l in range(m):
                acc += A[i, l] * Y[0, l]
            for j in range(1, k):
                for l in range(m):
                    acc += A[i, l] * Y[j, l]
                acc -= Y[j, i]
            for j in range(k):
                acc += U[j, i]
            Y[k, i] = acc
    return out
