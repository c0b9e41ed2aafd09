"""Compare the compiled kernels with the numpy fallback.

Run with ``python3 benchmarks/bench_kernels.py``; results go to stdout.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from btlab import kernels
from btlab.builtins import field
from btlab.trunc_ring import make_ring


def workload(radius: int, batch: int, n: int, seed: int = 0):
    R = make_ring(field("Q2"), radius)
    add = np.asarray(R.add_table, dtype=np.int32)
    mul = np.asarray(R.mul_table, dtype=np.int32)
    rng = np.random.default_rng(seed)
    A = rng.integers(0, R.N, size=(batch, n, n), dtype=np.int32)
    B = rng.integers(0, R.N, size=(batch, n, n), dtype=np.int32)
    return R, A, B, add, mul


def bench(radius: int, batch: int, n: int, repeat: int):
    R, A, B, add, mul = workload(radius, batch, n)
    rows = []
    for backend in ("python", "cython"):
        if backend == "cython" and kernels.BACKEND != "cython":
            continue
        mm = min(timeit.repeat(lambda: kernels.batch_matmul(A, B, add, mul, 0, backend=backend), number=1, repeat=repeat))
        ks = min(timeit.repeat(lambda: kernels.matrix_keys(A, R.N, backend=backend), number=1, repeat=repeat))
        rows.append((backend, mm, ks))
    ref = kernels.batch_matmul(A, B, add, mul, 0, backend="python")
    same = np.array_equal(ref, kernels.batch_matmul(A, B, add, mul, 0))
    return rows, same


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--batch", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    print(f"default backend: {kernels.BACKEND}")
    for radius, n in ((4, 2), (4, 3)):
        rows, same = bench(radius, args.batch, n, args.repeat)
        print(f"ring Z/{2 ** radius}, {n}x{n}, batch {args.batch}, backends agree: {same}")
        base = rows[0][1:]
        for backend, mm, ks in rows:
            print(f"  {backend:7s} matmul {mm * 1e3:8.1f} ms ({base[0] / mm:4.1f}x)  keys {ks * 1e3:8.1f} ms ({base[1] / ks:4.1f}x)")


if __name__ == "__main__":
    main()
