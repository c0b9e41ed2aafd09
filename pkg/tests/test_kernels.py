from __future__ import annotations

import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import btlab.builtins as B
from btlab import kernels
from btlab.trunc_ring import make_ring

R = make_ring(B.field("Q2"), 4)
ADD = np.asarray(R.add_table, dtype=np.int32)
MUL = np.asarray(R.mul_table, dtype=np.int32)

needs_compiled = pytest.mark.skipif(kernels.BACKEND != "cython", reason="compiled extension not built")


def _naive(A, Bm):
    n = A.shape[-1]
    out = np.zeros((A.shape[0], n, n), dtype=np.int64)
    for b in range(A.shape[0]):
        for i in range(n):
            for j in range(n):
                acc = 0
                for k in range(n):
                    acc = ADD[acc, MUL[A[b, i, k], Bm[b, k, j]]]
                out[b, i, j] = acc
    return out


def _mats(n):
    return st.lists(st.integers(0, R.N - 1), min_size=n * n * 3, max_size=n * n * 3).map(
        lambda xs: np.array(xs, dtype=np.int32).reshape(3, n, n)
    )


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([2, 3]).flatmap(lambda n: st.tuples(_mats(n), _mats(n))))
def test_python_matmul_matches_naive(pair):
    A, Bm = pair
    got = kernels.batch_matmul(A, Bm, ADD, MUL, backend="python")
    assert np.array_equal(got, _naive(A, Bm))


@needs_compiled
@settings(max_examples=40, deadline=None)
@given(st.sampled_from([2, 3]).flatmap(lambda n: st.tuples(_mats(n), _mats(n))))
def test_backends_agree_on_matmul(pair):
    A, Bm = pair
    py = kernels.batch_matmul(A, Bm, ADD, MUL, backend="python")
    cy = kernels.batch_matmul(A, Bm, ADD, MUL, backend="cython")
    assert np.array_equal(np.asarray(py), np.asarray(cy))


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([2, 3]).flatmap(_mats))
def test_keys_round_trip(A):
    n = A.shape[-1]
    for backend in ("python", "cython"):
        keys = kernels.matrix_keys(A, R.N, backend=backend)
        back = kernels.keys_to_matrices(keys, R.N, n, backend=backend)
        assert np.array_equal(np.asarray(back), A)
    assert np.array_equal(
        np.asarray(kernels.matrix_keys(A, R.N, backend="python")),
        np.asarray(kernels.matrix_keys(A, R.N, backend="cython")),
    )


def test_key_order_is_lexicographic():
    A = np.array([[[0, 0], [0, 1]], [[0, 0], [1, 0]], [[1, 0], [0, 0]]], dtype=np.int32)
    keys = np.asarray(kernels.matrix_keys(A, R.N))
    assert list(keys) == sorted(keys) and keys[0] == 1


def test_broadcasting_single_matrix():
    A = np.array([[1, 2], [3, 4]], dtype=np.int32)
    Bm = np.stack([np.eye(2, dtype=np.int32) * R.one] * 5)
    out = kernels.batch_matmul(A, Bm, ADD, MUL)
    assert np.asarray(out).shape == (5, 2, 2)
    assert all(np.array_equal(o, A) for o in np.asarray(out))


def test_pure_python_switch():
    code = "import btlab.kernels as k; print(k.BACKEND)"
    out = subprocess.run(
        [sys.executable, "-c", code], capture_output=True, text=True, env={"BTLAB_PURE_PYTHON": "1", "PATH": ""}, check=True
    )
    assert out.stdout.strip() == "python"
