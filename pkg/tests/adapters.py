"""Turn library rings into oracle TableRings."""

from __future__ import annotations

import numpy as np

from oracles import TableRing


def ring_table(R, conj=None):
    return TableRing(R.add_table, R.mul_table, R.one, conj)


def pair_table(pair, r):
    ctx = pair.conj_context(r)
    return ring_table(ctx.ring, ctx.table)


def algebra_table(A):
    n = A.N
    add = np.array([[A.add(a, b) for b in range(n)] for a in range(n)], dtype=np.int64)
    mul = np.array([[A.mul(a, b) for b in range(n)] for a in range(n)], dtype=np.int64)
    return TableRing(add, mul, A.one)
