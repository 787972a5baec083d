import os
import subprocess
import sys

import numpy as np

from rainbowlab import kernels
from rainbowlab.core import ModelParams, generate, generate_arrays
from rainbowlab.kernels import _numba, _numpy
from rainbowlab.oracle import enumerate_copies


def test_default_backend_is_numba():
    if os.environ.get("RAINBOWLAB_BACKEND", "numba") == "numba":
        assert kernels.BACKEND == "numba"


def test_batch_contains_agrees():
    present, colors = generate_arrays(ModelParams(6, 2, 0.5, 5, seed=1), 3000)
    structs = np.ascontiguousarray(enumerate_copies(6, 2, "perfect-matching"))
    a = _numba.batch_contains(present, colors, structs, 5)
    b = _numpy.batch_contains(present, colors, structs, 5)
    assert np.array_equal(a, b) and a.any() and not a.all()


def test_subset_hits_agrees():
    rows = [r for r in enumerate_copies(6, 2, "triangle") if r.max() < 12]
    masks = np.array([sum(1 << int(i) for i in r) for r in rows], dtype=np.uint64)
    assert np.array_equal(_numba.subset_hits_by_size(masks, 12),
                          _numpy.subset_hits_by_size(masks, 12))


def test_induced_counts_and_expansion_agree():
    G = generate(ModelParams(30, 2, 0.2, 40, seed=2))
    edges = np.ascontiguousarray(G.edges, dtype=np.int64)
    vm = np.random.default_rng(0).random((200, 30)) < 0.3
    assert np.array_equal(_numba.induced_edge_counts(vm, edges),
                          _numpy.induced_edge_counts(vm, edges))
    adj = np.zeros(30, dtype=np.uint64)
    for a, b in G.edges.tolist():
        adj[a] |= np.uint64(1 << b)
        adj[b] |= np.uint64(1 << a)
    for k, d in ((2, 1), (3, 2)):
        assert _numba.expansion_exhaustive(adj, k, d) == _numpy.expansion_exhaustive(adj, k, d)


def test_oracle_same_under_numpy(monkeypatch):
    from rainbowlab.oracle import find_rainbow_hamilton_cycle

    graphs = [generate(ModelParams(9, 2, 0.7, 12, seed=s)) for s in range(20)]
    jit = [find_rainbow_hamilton_cycle(G) for G in graphs]
    for name in ("hc_search", "batch_contains"):
        monkeypatch.setattr(kernels, name, getattr(_numpy, name))
    plain = [find_rainbow_hamilton_cycle(G) for G in graphs]
    assert [c and c.vertices for c in jit] == [c and c.vertices for c in plain]
    assert any(jit) and not all(jit)


def test_env_flag_selects_numpy():
    code = ("import rainbowlab.kernels as k, rainbowlab.kernels._numpy as n;"
            "print(k.BACKEND, k.batch_contains is n.batch_contains)")
    env = dict(os.environ, RAINBOWLAB_BACKEND="numpy")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True,
                         check=True).stdout.split()
    assert out == ["numpy", "True"]


def test_cli_output_identical_across_backends(tmp_path):
    outs = []
    for backend in ("numba", "numpy"):
        env = dict(os.environ, RAINBOWLAB_BACKEND=backend)
        path = tmp_path / f"{backend}.json"
        subprocess.run([sys.executable, "-m", "rainbowlab.cli", "sweep", "--n", "7", "--p",
                        "0.6", "--c", "8", "--trials", "30", "--out", str(path)],
                       env=env, check=True)
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
