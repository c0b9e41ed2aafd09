# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for batched matrix arithmetic over finite rings given by tables."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def batch_matmul(const int[:, :, ::1] A, const int[:, :, ::1] B,
                 const int[:, ::1] add, const int[:, ::1] mul, int zero):
    """C[m] = A[m] @ B[m] with ring operations read from add/mul tables."""
    cdef Py_ssize_t M = A.shape[0], n = A.shape[1], k = A.shape[2], l = B.shape[2]
    cdef Py_ssize_t m, i, j, s
    cdef int acc
    out = np.empty((M, n, l), dtype=np.int32)
    cdef int[:, :, ::1] C = out
    for m in range(M):
        for i in range(n):
            for j in range(l):
                acc = zero
                for s in range(k):
                    acc = add[acc, mul[A[m, i, s], B[m, s, j]]]
                C[m, i, j] = acc
    return out


def matrix_keys(const int[:, :, ::1] A, long long base):
    """Integer keys sum_k entry_k * base^(size-1-k), row-major, most significant first."""
    cdef Py_ssize_t M = A.shape[0], n = A.shape[1], l = A.shape[2]
    cdef Py_ssize_t m, i, j
    cdef long long key
    out = np.empty(M, dtype=np.int64)
    cdef long long[::1] K = out
    for m in range(M):
        key = 0
        for i in range(n):
            for j in range(l):
                key = key * base + A[m, i, j]
        K[m] = key
    return out


def keys_to_matrices(const long long[::1] keys, long long base, int n):
    """Inverse of matrix_keys for square n x n matrices."""
    cdef Py_ssize_t M = keys.shape[0], m, idx
    cdef long long key
    out = np.empty((M, n, n), dtype=np.int32)
    cdef int[:, :, ::1] A = out
    for m in range(M):
        key = keys[m]
        for idx in range(n * n - 1, -1, -1):
            A[m, idx // n, idx % n] = key % base
            key = key // base
    return out
