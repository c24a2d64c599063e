#!/usr/bin/env python3
"""Benchmark the numba-compiled kernels against the pure-Python/numpy
fallbacks selected by FISHDBC_NO_NUMBA=1.

Run from the repository root:

    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --pairs 200000 --edges 500000
"""

import argparse
import time

import numpy as np

from fishdbc import _accel

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False


def timeit(fn, *args, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def numpy_euclidean(a, b):
    d = a - b
    return float(np.sqrt(np.dot(d, d)))


def bench_euclidean(jit_fn, pairs, dim, rng):
    data = rng.random((pairs, 2, dim))

    def run(fn):
        total = 0.0
        for a, b in data:
            total += fn(a, b)
        return total

    return timeit(run, jit_fn), timeit(run, numpy_euclidean)


def bench_edges(jit_fn, py_fn, n_edges, n_nodes, rng):
    lo = rng.integers(0, n_nodes - 1, size=n_edges)
    hi = rng.integers(1, n_nodes, size=n_edges)
    clash = lo >= hi
    lo[clash] = hi[clash] - 1
    w = rng.random(n_edges)
    order = np.lexsort((hi, lo, w))
    lo = np.ascontiguousarray(lo[order], dtype=np.int64)
    hi = np.ascontiguousarray(hi[order], dtype=np.int64)
    return timeit(jit_fn, lo, hi, n_nodes), timeit(py_fn, lo, hi, n_nodes)


def bench_linkage(jit_fn, py_fn, n_nodes, rng):
    lo = np.empty(n_nodes - 1, dtype=np.int64)
    hi = np.empty(n_nodes - 1, dtype=np.int64)
    for i in range(1, n_nodes):
        j = int(rng.integers(0, i))
        lo[i - 1], hi[i - 1] = min(i, j), max(i, j)
    w = np.sort(rng.random(n_nodes - 1))
    return timeit(jit_fn, lo, hi, w, n_nodes), timeit(py_fn, lo, hi, w, n_nodes)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--pairs", type=int, default=50_000)
    parser.add_argument("--dim", type=int, default=100)
    parser.add_argument("--edges", type=int, default=200_000)
    parser.add_argument("--nodes", type=int, default=20_000)
    args = parser.parse_args()
    rng = np.random.default_rng(0)

    if not (HAVE_NUMBA and _accel.HAVE_NUMBA):
        print("numba unavailable or disabled; benchmarking fallback against itself")

    jit_euclid = _accel.euclidean
    jit_kruskal = _accel.kruskal_mask
    jit_linkage = _accel.linkage_merges
    if HAVE_NUMBA and not _accel.HAVE_NUMBA:
        # Package imported with the fallback selected; compile here so both
        # sides are still comparable.
        jit_euclid = njit(cache=True)(_accel._euclidean)
        jit_kruskal = njit(cache=True)(_accel._kruskal_mask)
        jit_linkage = njit(cache=True)(_accel._linkage_merges)

    # Warm-up triggers compilation outside the timed region.
    a = rng.random(args.dim)
    jit_euclid(a, a)
    warm = np.array([0], dtype=np.int64), np.array([1], dtype=np.int64)
    jit_kruskal(*warm, 2)
    jit_linkage(*warm, np.array([1.0]), 2)

    rows = []
    jit_t, py_t = bench_euclidean(jit_euclid, args.pairs, args.dim, rng)
    rows.append((f"euclidean ({args.pairs} pairs, dim {args.dim})", jit_t, py_t))
    jit_t, py_t = bench_edges(
        jit_kruskal, _accel._kruskal_mask, args.edges, args.nodes, rng
    )
    rows.append((f"kruskal ({args.edges} edges, {args.nodes} nodes)", jit_t, py_t))
    jit_t, py_t = bench_linkage(jit_linkage, _accel._linkage_merges, args.nodes, rng)
    rows.append((f"single-linkage ({args.nodes} nodes)", jit_t, py_t))

    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{width}}  {'numba':>10}  {'fallback':>10}  {'speedup':>8}")
    for name, jit_t, py_t in rows:
        speedup = py_t / jit_t if jit_t > 0 else float("inf")
        print(f"{name:<{width}}  {jit_t:>9.4f}s  {py_t:>9.4f}s  {speedup:>7.1f}x")


if __name__ == "__main__":
    main()
