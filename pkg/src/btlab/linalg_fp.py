"""Small dense linear algebra over a prime field F_p."""

from __future__ import annotations

import numpy as np


def row_reduce(matrix, p: int):
    """Reduced row echelon form mod p; returns (rref, pivot_columns)."""
    m = np.array(matrix, dtype=np.int64) % p
    if m.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    rows, cols = m.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            m[[r, piv]] = m[[piv, r]]
        inv = pow(int(m[r, c]), -1, p)
        m[r] = (m[r] * inv) % p
        for i in range(rows):
            if i != r and m[i, c]:
                m[i] = (m[i] - m[i, c] * m[r]) % p
        pivots.append(c)
        r += 1
    return m, pivots


def rank(matrix, p: int) -> int:
    m = np.asarray(matrix)
    if m.size == 0:
        return 0
    return len(row_reduce(m, p)[1])


def nullspace(matrix, p: int) -> np.ndarray:
    """Basis (as rows) of the right kernel {v : M v = 0} mod p."""
    m = np.asarray(matrix, dtype=np.int64)
    cols = m.shape[1]
    rref, pivots = row_reduce(m, p)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = np.zeros(cols, dtype=np.int64)
        v[f] = 1
        for i, c in enumerate(pivots):
            v[c] = (-rref[i, f]) % p
        basis.append(v)
    if not basis:
        return np.zeros((0, cols), dtype=np.int64)
    return np.array(basis, dtype=np.int64)


def solve(matrix, rhs, p: int):
    """One solution x of M x = rhs mod p, or None when inconsistent."""
    m = np.asarray(matrix, dtype=np.int64) % p
    b = np.asarray(rhs, dtype=np.int64).reshape(-1, 1) % p
    aug = np.hstack([m, b])
    rref, pivots = row_reduce(aug, p)
    cols = m.shape[1]
    if cols in pivots:
        return None
    x = np.zeros(cols, dtype=np.int64)
    for i, c in enumerate(pivots):
        x[c] = rref[i, cols]
    return x


def inverse(matrix, p: int) -> np.ndarray:
    m = np.asarray(matrix, dtype=np.int64) % p
    n = m.shape[0]
    aug = np.hstack([m, np.eye(n, dtype=np.int64)])
    rref, pivots = row_reduce(aug, p)
    if pivots[:n] != list(range(n)):
        raise ValueError("matrix is singular mod p")
    return rref[:, n:]
