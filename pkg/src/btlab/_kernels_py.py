"""Pure-Python (numpy) versions of the compiled kernels."""

from __future__ import annotations

import numpy as np


def batch_matmul(A, B, add, mul, zero):
    A = np.asarray(A)
    B = np.asarray(B)
    M, n, k = A.shape
    out = np.full((M, n, B.shape[2]), zero, dtype=np.int32)
    for s in range(k):
        prod = mul[A[:, :, s, None], B[:, None, s, :]]
        out = add[out, prod]
    return out.astype(np.int32)


def matrix_keys(A, base):
    A = np.asarray(A, dtype=np.int64)
    flat = A.reshape(A.shape[0], -1)
    keys = np.zeros(A.shape[0], dtype=np.int64)
    for k in range(flat.shape[1]):
        keys = keys * base + flat[:, k]
    return keys


def keys_to_matrices(keys, base, n):
    keys = np.asarray(keys, dtype=np.int64).copy()
    out = np.empty((len(keys), n * n), dtype=np.int32)
    for idx in range(n * n - 1, -1, -1):
        out[:, idx] = keys % base
        keys //= base
    return out.reshape(len(out), n, n)
