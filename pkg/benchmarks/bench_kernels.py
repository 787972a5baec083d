"""Time the numba kernels against the numpy fallback on identical inputs.

    python benchmarks/bench_kernels.py [--repeat 3]

Each kernel's outputs are compared between backends before timing is
reported; a mismatch aborts the run.
"""
import argparse
import math
import time
from contextlib import contextmanager

import numpy as np

from rainbowlab import kernels
from rainbowlab.core import ModelParams, generate, generate_arrays
from rainbowlab.kernels import _numba, _numpy
from rainbowlab.oracle import enumerate_copies, find_rainbow_hamilton_cycle

BACKENDS = {"numba": _numba, "numpy": _numpy}


@contextmanager
def backend(mod):
    saved = {name: getattr(kernels, name) for name in kernels.__all__ if hasattr(mod, name)}
    for name in saved:
        setattr(kernels, name, getattr(mod, name))
    try:
        yield
    finally:
        for name, fn in saved.items():
            setattr(kernels, name, fn)


def best_of(fn, repeat):
    out, times = None, []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return out, min(times)


def cases():
    # batch containment: 20k hybrids of K_6 against all perfect matchings
    params = ModelParams(6, 2, 0.5, 5, seed=1)
    present, colors = generate_arrays(params, 20_000)
    structs = np.ascontiguousarray(enumerate_copies(6, 2, "perfect-matching"))
    yield "batch_contains", lambda m: m.batch_contains(present, colors, structs, 5)

    # the opposite shape: 2520 Hamilton cycles of K_8 against 16 rows
    p8, c8 = generate_arrays(ModelParams(8, 2, 0.8, 9, seed=6), 16)
    hc8 = np.ascontiguousarray(enumerate_copies(8, 2, "hamilton-cycle"))
    yield "batch_contains_wide", lambda m: m.batch_contains(p8, c8, hc8, 9)

    # subset counting over the 2^20 edge subsets of K_7 minus its last edge
    rows = [row for row in enumerate_copies(7, 2, "triangle") if row.max() < 20]
    masks = np.array([sum(1 << int(i) for i in row) for row in rows], dtype=np.uint64)
    yield "subset_hits_by_size", lambda m: m.subset_hits_by_size(masks, 20)

    # edge counts inside 5k random vertex sets of G(200, 0.05)
    G = generate(ModelParams(200, 2, 0.05, 240, seed=2))
    rng = np.random.default_rng(3)
    vmasks = rng.random((5_000, 200)) < 0.1
    edges = np.ascontiguousarray(G.edges, dtype=np.int64)
    yield "induced_edge_counts", lambda m: m.induced_edge_counts(vmasks, edges)

    # exhaustive expansion on G(40, 0.2), |X| <= 4
    H = generate(ModelParams(40, 2, 0.2, 1000, seed=4))
    adj = np.zeros(40, dtype=np.uint64)
    for a, b in H.edges.tolist():
        adj[a] |= np.uint64(1 << b)
        adj[b] |= np.uint64(1 << a)
    yield "expansion_exhaustive", lambda m: m.expansion_exhaustive(adj, 4, 2)

    # full oracle search on a sparse coloured graph
    n = 16
    F = generate(ModelParams(n, 2, 0.35, 2 * n, seed=5))

    def hc(m):
        with backend(m):
            cert = find_rainbow_hamilton_cycle(F)
        return None if cert is None else cert.vertices
    yield "hc_search", hc


def same(a, b):
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        return np.array_equal(np.asarray(a), np.asarray(b))
    return a == b


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print(f"{'kernel':<22}{'numba ms':>12}{'numpy ms':>12}{'speedup':>10}")
    for name, fn in cases():
        fn(_numba)  # compile outside the timed region
        out_jit, t_jit = best_of(lambda: fn(_numba), args.repeat)
        out_np, t_np = best_of(lambda: fn(_numpy), args.repeat)
        if not same(out_jit, out_np):
            raise SystemExit(f"{name}: backends disagree")
        speed = t_np / t_jit if t_jit > 0 else math.inf
        print(f"{name:<22}{t_jit * 1e3:>12.2f}{t_np * 1e3:>12.2f}{speed:>9.1f}x")


if __name__ == "__main__":
    main()
