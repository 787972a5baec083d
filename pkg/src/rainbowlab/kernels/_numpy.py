"""Pure-numpy fallbacks.

Data-parallel kernels are vectorised; the search kernel runs the loop form
uncompiled.
"""
from itertools import combinations

import numpy as np

from ._loops import hc_search  # noqa: F401


def batch_contains(present, colors, structs, c, cells=1 << 22):
    T, S = present.shape[0], structs.shape[0]
    m = structs.shape[1]
    out = np.zeros(T, dtype=bool)
    if c < m or S == 0:
        return out
    # vectorised over copies too, in chunks of about `cells` entries
    step = max(1, cells // max(1, T * m))
    for s0 in range(0, S, step):
        st = structs[s0:s0 + step]
        ok = present[:, st].all(axis=2)
        cols = colors[:, st]
        for a in range(m):
            for b in range(a):
                ok &= (cols[..., a] < 0) | (cols[..., a] != cols[..., b])
        out |= ok.any(axis=1)
    return out


def subset_hits_by_size(masks, nbits, chunk=1 << 20):
    counts = np.zeros(nbits + 1, dtype=np.int64)
    total = 1 << nbits
    for start in range(0, total, chunk):
        subs = np.arange(start, min(start + chunk, total), dtype=np.uint64)
        hit = np.zeros(subs.shape[0], dtype=bool)
        for mk in masks:
            hit |= (subs & mk) == mk
        sizes = np.bitwise_count(subs[hit]).astype(np.int64)
        counts += np.bincount(sizes, minlength=nbits + 1)
    return counts


def induced_edge_counts(masks, edges):
    if edges.shape[0] == 0:
        return np.zeros(masks.shape[0], dtype=np.int64)
    return (masks[:, edges[:, 0]] & masks[:, edges[:, 1]]).sum(axis=1).astype(np.int64)


def expansion_exhaustive(adj, k_bound, d):
    n = adj.shape[0]
    ints = [int(a) for a in adj]
    for size in range(1, min(k_bound, n) + 1):
        for X in combinations(range(n), size):
            xm = 0
            nb = 0
            for v in X:
                xm |= 1 << v
                nb |= ints[v]
            if bin(nb & ~xm).count("1") < d * size:
                return np.uint64(xm)
    return np.uint64(0)
