"""Hot numeric kernels, JIT-compiled with numba when available.

Set ``FISHDBC_NO_NUMBA=1`` to force the pure-Python/numpy fallback path
(useful for debugging and for the kernel benchmark in ``benchmarks/``).
"""

import math
import os

import numpy as np

_DISABLED = os.environ.get("FISHDBC_NO_NUMBA", "").lower() in ("1", "true", "yes")

try:
    if _DISABLED:
        raise ImportError("numba disabled via FISHDBC_NO_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        # Signature-compatible no-op decorator.
        if args and callable(args[0]):
            return args[0]

        def wrap(fn):
            return fn

        return wrap


def _euclidean(a, b):
    acc = 0.0
    for i in range(a.shape[0]):
        d = a[i] - b[i]
        acc += d * d
    return math.sqrt(acc)


def _kruskal_mask(lo, hi, n):
    """Accept/reject mask for edges already sorted by (weight, lo, hi).

    Plain Kruskal sweep with union-find (path halving + union by rank).
    """
    parent = np.arange(n, dtype=np.int64)
    rank = np.zeros(n, dtype=np.int64)
    keep = np.zeros(lo.shape[0], dtype=np.bool_)
    for k in range(lo.shape[0]):
        a = lo[k]
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        b = hi[k]
        while parent[b] != b:
            parent[b] = parent[parent[b]]
            b = parent[b]
        if a == b:
            continue
        keep[k] = True
        if rank[a] < rank[b]:
            a, b = b, a
        parent[b] = a
        if rank[a] == rank[b]:
            rank[a] += 1
    return keep


def _linkage_merges(lo, hi, weight, n):
    """Single-linkage merge rows from an acyclic edge list sorted ascending.

    Returns (left, right, size, n_merges); n_merges == -1 signals a cycle.
    Internal dendrogram nodes are numbered n, n+1, ... in merge order.
    """
    m = lo.shape[0]
    parent = np.arange(n, dtype=np.int64)
    rank = np.zeros(n, dtype=np.int64)
    comp_node = np.arange(n, dtype=np.int64)
    comp_size = np.ones(n, dtype=np.int64)
    left = np.empty(m, dtype=np.int64)
    right = np.empty(m, dtype=np.int64)
    size = np.empty(m, dtype=np.int64)
    count = 0
    for k in range(m):
        a = lo[k]
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        b = hi[k]
        while parent[b] != b:
            parent[b] = parent[parent[b]]
            b = parent[b]
        if a == b:
            return left, right, size, -1
        left[count] = comp_node[a]
        right[count] = comp_node[b]
        merged = comp_size[a] + comp_size[b]
        size[count] = merged
        if rank[a] < rank[b]:
            a, b = b, a
        parent[b] = a
        if rank[a] == rank[b]:
            rank[a] += 1
        comp_node[a] = n + count
        comp_size[a] = merged
        count += 1
    return left, right, size, count


if HAVE_NUMBA:
    euclidean = njit("float64(float64[::1], float64[::1])", cache=True)(_euclidean)
    kruskal_mask = njit(cache=True)(_kruskal_mask)
    linkage_merges = njit(cache=True)(_linkage_merges)
else:

    def euclidean(a, b):
        d = a - b
        return float(np.sqrt(np.dot(d, d)))

    kruskal_mask = _kruskal_mask
    linkage_merges = _linkage_merges
