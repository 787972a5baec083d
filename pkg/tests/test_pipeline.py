import json
import math
from itertools import combinations

import numpy as np
import pytest

from rainbowlab.core import ColoredHypergraph, ModelParams, generate, rainbow_complete
from rainbowlab.pipeline import (STAGES, Failure, PipelineConfig, PipelineTrace, Windows,
                                 booster_close, check_plan, partition, rainbow_expander,
                                 rainbow_long_path, run_pipeline, run_pipeline_on, star_matching)
from rainbowlab.verify import (HAMILTON_CYCLE, HAMILTON_PATH, check_certificate, is_D_matching,
                               is_expander, make_certificate)

from conftest import graph


def _path_graph(n, colors):
    return graph(n, [(i, i + 1) for i in range(n - 1)], colors, c=max(colors) + 1)


# -- partition ---------------------------------------------------------------------

def test_partition_failures():
    assert isinstance(partition(ColoredHypergraph(30, 2, 1, np.zeros((0, 2)), []), seed=0),
                      Failure)
    f = partition(rainbow_complete(30), alpha=0.0, seed=0)
    assert isinstance(f, Failure) and not f and f.stage == "partition"
    assert isinstance(partition(rainbow_complete(10), seed=0), Failure)


def test_partition_plan_invariants():
    G = rainbow_complete(60)
    plan = partition(G, alpha=0.3, retries=50, seed=3)
    assert not isinstance(plan, Failure)
    assert not plan.C0 & plan.C1
    assert not check_plan(G, range(60), plan.W, plan.C0, plan.C1, 0.3)


def test_partition_respects_exclusions():
    G = rainbow_complete(60)
    plan = partition(G, alpha=0.3, retries=50, seed=1, exclude={0, 1, 2}, c_small={5, 6})
    assert not isinstance(plan, Failure)
    assert not plan.W & {0, 1, 2}
    assert not (plan.C0 | plan.C1) & {5, 6}
    assert plan.C_small == {5, 6}


def test_partition_k200_size_windows():
    # the colour-class and reservoir sizes stay within +-50% on every sample
    G = rainbow_complete(200)
    for s in range(20):
        r = partition(G, alpha=0.1, retries=20, seed=s)
        violations = r.detail["violations"] if isinstance(r, Failure) else {}
        assert "i" not in violations and "ii" not in violations


@pytest.mark.xfail(strict=True, reason="per-vertex degree windows (1/2, 2) are too tight at "
                                       "n=200; about 10% of seeds verify (see decisions ledger)")
def test_partition_k200_verified_rate():
    G = rainbow_complete(200)
    ok = sum(not isinstance(partition(G, alpha=0.1, retries=20, seed=s), Failure)
             for s in range(20))
    assert ok >= 18


# -- long path -----------------------------------------------------------------------

def test_long_path_rainbow_k10():
    P = rainbow_long_path(rainbow_complete(10), target_deficit=0, seed=0)
    assert len(P.path) == 10 and P.deficit == 0
    assert len(set(P.colors)) == 9


def test_long_path_monochromatic_path_graph():
    G = _path_graph(10, [0] * 9)
    for d in range(8):
        assert isinstance(rainbow_long_path(G, target_deficit=d, seed=0), Failure)
    assert not isinstance(rainbow_long_path(G, target_deficit=8, seed=0), Failure)


def test_long_path_respects_colours_and_forbidden():
    G = rainbow_complete(12)
    allowed = set(range(0, 66, 2))
    P = rainbow_long_path(G, allowed, forbidden_vertices={0, 1}, target_deficit=4, seed=2)
    assert not isinstance(P, Failure)
    assert not {0, 1} & set(P.path)
    assert set(P.colors) <= allowed
    for (a, b), col in zip(zip(P.path, P.path[1:]), P.colors):
        assert G.edge_color((a, b)) == col


def test_long_path_deterministic():
    G = generate(ModelParams(80, 2, 0.1, 100, seed=1))
    a = rainbow_long_path(G, target_deficit=30, seed=4)
    b = rainbow_long_path(G, target_deficit=30, seed=4)
    assert a == b


def _long_path_rate(deficit, seeds):
    n = 300
    p = 1.1 * math.log(n) / n
    ok = 0
    for s in range(seeds):
        G = generate(ModelParams(n, 2, p, 360, seed=s))
        P = rainbow_long_path(G, target_deficit=deficit, seed=s)
        if not isinstance(P, Failure):
            assert len(set(P.colors)) == len(P.colors)
            ok += 1
    return ok


def test_long_path_n300_formula_deficit():
    # deficit n / ln^0.4 n evaluates to 149 at n = 300
    d = int(300 / math.log(300) ** 0.4)
    assert d == 149
    assert _long_path_rate(d, 100) >= 80


@pytest.mark.xfail(strict=True, reason="deficit 60 is reached in about 10% of seeds at n=300")
def test_long_path_n300_deficit_60():
    assert _long_path_rate(60, 20) >= 16


def _far_below_stages():
    n = 300
    p = 0.2 * math.log(n) / n
    stages = []
    for s in range(100):
        out, trace = run_pipeline(ModelParams(n, 2, p, 360, seed=s))
        assert isinstance(out, Failure)
        stages.append(trace.stage)
    return stages


def test_pipeline_far_below_threshold_fails_early():
    # about 170 edges cannot carry n distinct colours, so the first stage refuses
    assert set(_far_below_stages()) == {"partition"}


@pytest.mark.xfail(strict=True, reason="failures are caught at partition before long-path runs")
def test_pipeline_far_below_threshold_stage_mix():
    stages = _far_below_stages()
    assert sum(s in ("long-path", "star-matching") for s in stages) >= 90


# -- star matching --------------------------------------------------------------------

def test_star_matching_examples():
    G = graph(4, [(0, 1), (0, 2), (0, 3)], [5, 6, 7], c=8)
    M = star_matching(G, {0}, {1, 2, 3}, {5, 6, 7}, 2)
    assert not isinstance(M, Failure) and len(M.edges) == 2
    G2 = graph(4, [(0, 1), (0, 2), (0, 3)], [5, 5, 5], c=8)
    f = star_matching(G2, {0}, {1, 2, 3}, {5}, 2)
    assert isinstance(f, Failure) and f.stage == "star-matching"


def test_star_matching_rejects_overlap():
    with pytest.raises(ValueError):
        star_matching(rainbow_complete(4), {0, 1}, {1, 2}, {0}, 1)


def _brute_d_matching(G, S, W, C1, D):
    cand = [e for e, col in zip(G.edge_tuples(), G.colors.tolist())
            if col in C1 and ((e[0] in S and e[1] in W) or (e[1] in S and e[0] in W))]
    need = D * len(S)
    return any(is_D_matching(G, S, W, M, D) for M in combinations(cand, need))


def test_star_matching_matches_brute_force():
    rng = np.random.default_rng(0)
    checked = 0
    for s in range(400):
        n = int(rng.integers(5, 13))
        G = generate(ModelParams(n, 2, 0.5, 6, seed=s))
        verts = rng.permutation(n).tolist()
        S = set(verts[:2])
        W = set(verts[2:2 + int(rng.integers(2, 6))])
        C1 = set(rng.choice(6, size=4, replace=False).tolist())
        D = int(rng.integers(1, 3))
        M = star_matching(G, S, W, C1, D)
        want = _brute_d_matching(G, S, W, C1, D)
        assert (not isinstance(M, Failure)) == want
        if want:
            assert is_D_matching(G, S, W, M.edges, D)
        checked += want
    assert checked > 20


# -- expander --------------------------------------------------------------------------

def test_expander_dense_host():
    G = rainbow_complete(20)
    W, C0 = range(20), range(190)
    ok = 0
    for s in range(50):
        R = rainbow_expander(G, W, C0, 5, 2, d_required=2, seed=s)
        if not isinstance(R, Failure):
            ok += 1
            assert is_expander(R, 2, 2, vertices=W)
            assert len(set(R.colors.tolist())) == R.m
    assert ok >= 45


def test_expander_rejects_colour_repeats():
    # a single colour on every edge: no sample with two edges is rainbow
    G = graph(6, [(a, b) for b in range(6) for a in range(b)], [0] * 15, c=1)
    f = rainbow_expander(G, range(6), [0], 2, 1, d_required=1, retries=5, seed=0)
    assert isinstance(f, Failure) and f.detail["rejected"]["rainbow"] == 3
    assert f.reason == "colour clashes persist after resampling"


def test_expander_resampling_repairs_clashes():
    # K_12 where each colour appears on three edges: raw samples clash, repaired ones do not
    G = rainbow_complete(12)
    H = G.recolored(np.arange(G.m) // 3, c=22)
    ok = 0
    for s in range(10):
        R = rainbow_expander(H, range(12), range(22), 1, 1, d_required=1, seed=s)
        if not isinstance(R, Failure):
            ok += 1
            assert len(set(R.colors.tolist())) == R.m
    assert ok >= 8


def test_expander_d_zero():
    assert isinstance(rainbow_expander(rainbow_complete(10), range(10), range(45), 0, 1), Failure)


# -- boosters --------------------------------------------------------------------------

def test_booster_immediate():
    G = rainbow_complete(10)
    order = list(range(10))
    G1 = G.select([tuple(e) in {tuple(sorted(p)) for p in zip(order, order[1:])}
                   for e in G.edges.tolist()])
    st = {}
    cert = booster_close(G, G1, 0, 9, set(), stats=st)
    assert check_certificate(G, cert) and st["iterations"] == 0 and cert.kind == HAMILTON_PATH


def test_booster_two_paths_merge():
    G = rainbow_complete(10)
    pairs = [(0, 1), (1, 2), (2, 3), (3, 4), (5, 6), (6, 7), (7, 8), (8, 9)]
    G1 = G.select([tuple(e) in pairs for e in G.edges.tolist()])
    avail = set(range(45)) - set(G1.colors.tolist())
    st = {}
    cert = booster_close(G, G1, 0, 9, avail, stats=st)
    assert not isinstance(cert, Failure)
    assert check_certificate(G, cert)
    assert cert.vertices[0] == 0 and cert.vertices[-1] == 9
    assert 1 <= st["iterations"] <= 20
    used = [col for _, col in st["boosters"]]
    assert len(set(used)) == len(used) and not set(used) & set(G1.colors.tolist())
    assert all(G.edge_color(e) == col for e, col in st["boosters"])


def test_booster_no_colours():
    G = rainbow_complete(10)
    pairs = [(0, 1), (1, 2), (2, 3), (3, 4), (5, 6), (6, 7), (7, 8), (8, 9)]
    G1 = G.select([tuple(e) in pairs for e in G.edges.tolist()])
    f = booster_close(G, G1, 0, 9, set())
    assert isinstance(f, Failure) and f.stage == "boosters"


def test_booster_bounds_iterations():
    for s in range(20):
        G = generate(ModelParams(16, 2, 0.6, 200, seed=s))
        G1 = G.select(np.arange(G.m) % 4 == 0)
        if len(set(G1.colors.tolist())) != G1.m:
            continue
        st = {}
        out = booster_close(G, G1, 0, 1, range(200), vertices=range(16), stats=st)
        assert st["iterations"] <= 2 * 16
        if not isinstance(out, Failure):
            assert check_certificate(G, out)


# -- the whole pipeline ------------------------------------------------------------------

def test_pipeline_rainbow_k50():
    cert, trace = run_pipeline_on(rainbow_complete(50), seed=0)
    assert trace.stage == "done" and check_certificate(rainbow_complete(50), cert)
    assert trace.stats["path_length"] > 0


def test_pipeline_pigeonhole():
    G = generate(ModelParams(30, 2, 1.0, 29, seed=0))
    out, trace = run_pipeline_on(G)
    assert isinstance(out, Failure) and trace.stage == "partition"
    assert trace.reason == "fewer colours than cycle edges"


def test_pipeline_requires_graphs():
    with pytest.raises(ValueError):
        run_pipeline(ModelParams(9, 3, 0.5, 10))


def test_trace_order_and_json():
    t = PipelineTrace()
    t.advance("long-path")
    with pytest.raises(AssertionError):
        t.advance("partition")
    doc = json.loads(t.to_json())
    assert doc["stage"] == "long-path"
    assert STAGES[0] == "partition" and STAGES[-1] == "done"


def test_config_text_roundtrip():
    cfg = PipelineConfig(alpha=0.25, D=7)
    assert PipelineConfig.from_text(cfg.to_text()) == cfg
    assert PipelineConfig.from_text("# comment\nD = 5  # trailing\n").D == 5
    with pytest.raises(ValueError, match="unknown key"):
        PipelineConfig.from_text("bogus = 1\n")
    with pytest.raises(ValueError, match="expected"):
        PipelineConfig.from_text("D 5\n")
    assert PipelineConfig().windows == Windows(0.5, 0.5, 2.0, 100.0)


def test_distinct_recolouring_does_not_break_success():
    # giving every edge its own colour keeps each found cycle rainbow and
    # never triggers a structural refusal
    found = 0
    for s in range(10):
        G = generate(ModelParams(40, 2, 1.0, 2000, seed=s))
        H = G.recolored(np.arange(G.m), c=G.m)
        cert, _ = run_pipeline_on(G, seed=s)
        cert_h, trace_h = run_pipeline_on(H, seed=s)
        assert trace_h.reason != "fewer colours than cycle edges"
        if cert:
            found += 1
            assert check_certificate(H, make_certificate(H, HAMILTON_CYCLE, vertices=cert.vertices))
        if cert_h:
            assert check_certificate(H, cert_h)
    assert found > 0
