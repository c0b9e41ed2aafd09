"""Kernel selection: the compiled extension when available, numpy otherwise.

Set BTLAB_PURE_PYTHON=1 to force the fallback.
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_py

_compiled = None
if not os.environ.get("BTLAB_PURE_PYTHON"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        _compiled = None

BACKEND = "cython" if _compiled is not None else "python"


def _c32(a):
    return np.ascontiguousarray(a, dtype=np.int32)


def batch_matmul(A, B, add, mul, zero=0, backend=None):
    """Batched products over a ring given by int32 add/mul tables; A, B broadcast on axis 0."""
    A = np.asarray(A)
    B = np.asarray(B)
    if A.ndim == 2:
        A = A[None]
    if B.ndim == 2:
        B = B[None]
    if A.shape[0] != B.shape[0]:
        M = max(A.shape[0], B.shape[0])
        A = np.broadcast_to(A, (M,) + A.shape[1:])
        B = np.broadcast_to(B, (M,) + B.shape[1:])
    use = backend or BACKEND
    if use == "cython" and _compiled is not None:
        return _compiled.batch_matmul(_c32(A), _c32(B), _c32(add), _c32(mul), int(zero))
    return _kernels_py.batch_matmul(A, B, add, mul, zero)


def matrix_keys(A, base, backend=None):
    A = np.asarray(A)
    if A.ndim == 2:
        A = A[None]
    use = backend or BACKEND
    if use == "cython" and _compiled is not None:
        return _compiled.matrix_keys(_c32(A), int(base))
    return _kernels_py.matrix_keys(A, base)


def keys_to_matrices(keys, base, n, backend=None):
    keys = np.ascontiguousarray(keys, dtype=np.int64)
    use = backend or BACKEND
    if use == "cython" and _compiled is not None:
        return _compiled.keys_to_matrices(keys, int(base), int(n))
    return _kernels_py.keys_to_matrices(keys, base, n)
