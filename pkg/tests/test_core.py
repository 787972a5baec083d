import math

import numpy as np
import pytest
from scipy.stats import binomtest, chisquare

from rainbowlab.core import (ColoredHypergraph, ModelError, ModelParams, all_edges, colex_rank,
                             coupled_q, draw_slots, edge_ranks, generate, generate_arrays,
                             ham_ell_edge_count, hc_family_richness, rainbow_complete, stream,
                             threshold_p)


def test_complete_monochromatic():
    G = generate(ModelParams(5, 2, 1.0, 1, seed=3))
    assert G.m == 10 and set(G.colors.tolist()) == {0}


def test_empty():
    assert generate(ModelParams(5, 2, 0.0, 7, seed=3)).m == 0


def test_p_one_is_complete_hypergraph():
    G = generate(ModelParams(7, 3, 1.0, 4, seed=1))
    assert G.m == math.comb(7, 3)


def test_determinism():
    p = ModelParams(40, 2, 0.2, 50, seed=99)
    assert generate(p) == generate(p)
    assert generate(p) != generate(p.replace(seed=100))


def test_palette_invariance():
    a = generate(ModelParams(30, 2, 0.3, 3, seed=5))
    b = generate(ModelParams(30, 2, 0.3, 300, seed=5))
    assert np.array_equal(a.edges, b.edges)


def test_row_zero_matches_single_draw():
    p = ModelParams(9, 2, 0.4, 6, seed=11)
    present, colors = generate_arrays(p, 5)
    G = generate(p)
    assert np.array_equal(G.slot_mask, present[0])
    assert np.array_equal(G.colors, colors[0][present[0]])


def test_edge_count_binomial_over_seeds():
    # total edge count over 10^5 seeds is Binomial(C(30,2) * 10^5, 0.3)
    base = ModelParams(30, 2, 0.3, 2)
    total = 0
    N = 10**5
    for s in range(N):
        u = stream(s, "model/presence").random(base.num_slots)
        total += int((u < base.p).sum())
    pval = binomtest(total, base.num_slots * N, base.p).pvalue
    assert pval > 0.001


def test_colour_frequencies_uniform():
    counts = np.zeros(10, dtype=np.int64)
    edges = 0
    for s in range(300):
        G = generate(ModelParams(100, 2, 0.5, 10, seed=s))
        counts += np.bincount(G.colors, minlength=10)
        edges += G.m
    assert abs(edges / 300 - 2475) < 4 * math.sqrt(4950 * 0.25 / 300)
    assert chisquare(counts).pvalue > 0.001


def test_streams_are_independent_of_tag_order():
    a = stream(1, "model/presence").random(4)
    b = stream(1, "model/color").random(4)
    assert not np.allclose(a, b)
    assert np.array_equal(a, stream(1, "model/presence").random(4))


def test_colex_order():
    E = all_edges(5, 2)
    assert E[:4].tolist() == [[0, 1], [0, 2], [1, 2], [0, 3]]
    assert [colex_rank(e) for e in E.tolist()] == list(range(10))
    E3 = all_edges(6, 3)
    assert edge_ranks(E3).tolist() == list(range(20))
    assert E3[0].tolist() == [0, 1, 2] and E3[-1].tolist() == [3, 4, 5]


def test_hypergraph_validation():
    with pytest.raises(ValueError, match="duplicate"):
        ColoredHypergraph(4, 2, 3, [(0, 1), (1, 0)], [0, 1])
    with pytest.raises(ValueError, match="repeated vertex"):
        ColoredHypergraph(4, 2, 3, [(1, 1)], [0])
    with pytest.raises(ValueError, match="colour"):
        ColoredHypergraph(4, 2, 3, [(0, 1)], [3])
    with pytest.raises(ValueError, match="outside"):
        ColoredHypergraph(4, 2, 3, [(0, 4)], [0])


def test_model_params_validation():
    for bad in [dict(n=5, k=1, p=0.5, c=2), dict(n=2, k=3, p=0.5, c=2),
                dict(n=5, k=2, p=1.5, c=2), dict(n=5, k=2, p=0.5, c=0),
                dict(n=5, k=2, p=0.5, c=2**32), dict(n=5, k=2, p=0.5, c=2, seed=-1)]:
        with pytest.raises(ModelError):
            ModelParams(**bad)


def test_largest_palette_keeps_colours_in_range():
    with pytest.raises(ModelError):
        ModelParams(5, 2, 0.5, 2**31)
    G = generate(ModelParams(5, 2, 1.0, 2**31 - 1, seed=1))
    assert G.colors.min() >= 0 and G.colors.max() < 2**31 - 1


def test_views():
    G = rainbow_complete(5)
    assert G.degrees.tolist() == [4] * 5
    assert G.color_matrix[0, 1] == 0 and G.color_matrix[0, 0] == -1
    assert G.edge_color((1, 0)) == 0 and G.edge_color((0, 9)) is None
    R = G.restrict(vertices=[0, 1, 2], colors=[0, 1])
    assert R.edge_tuples() == [(0, 1), (0, 2)]
    H = G.relabel([4, 3, 2, 1, 0])
    assert H.edge_color((3, 4)) == 0
    assert G.without_edges([(0, 1)]).m == 9


@pytest.mark.parametrize("n, k, ell, m", [(12, 3, 1, 6), (8, 2, 0, 4), (10, 4, 2, 5),
                                           (9, 3, 0, 3), (6, 3, 2, 6)])
def test_ham_ell_edge_count(n, k, ell, m):
    assert ham_ell_edge_count(n, k, ell) == m


@pytest.mark.parametrize("n, k, ell", [(9, 3, 1), (7, 2, 0), (6, 3, 3), (6, 3, -1)])
def test_ham_ell_edge_count_errors(n, k, ell):
    with pytest.raises(ModelError):
        ham_ell_edge_count(n, k, ell)


@pytest.mark.parametrize("c, p, ell, q", [(12, 0.1, 3, 0.4), (5, 0.2, 1, 1.0), (6, 0.0, 2, 0.0)])
def test_coupled_q(c, p, ell, q):
    assert coupled_q(c, p, ell) == pytest.approx(q)


@pytest.mark.parametrize("c, p, ell", [(10, 0.5, 2), (3, 0.5, 0), (3, 0.5, -1)])
def test_coupled_q_errors(c, p, ell):
    with pytest.raises(ModelError):
        coupled_q(c, p, ell)


def test_hc_family_richness():
    assert hc_family_richness(10, 10) == 1
    assert hc_family_richness(10, 15) == 6
    with pytest.raises(ModelError):
        hc_family_richness(10, 9)


def test_threshold_p():
    n = 100
    assert threshold_p(n, 0) == pytest.approx((math.log(n) + math.log(math.log(n))) / n)
    assert threshold_p(10, 100) == 1.0
    assert threshold_p(10, -100) == 0.0


def test_draw_slots_shape():
    u, col = draw_slots(ModelParams(6, 2, 0.5, 3), 4)
    assert u.shape == col.shape == (4, 15)
    assert col.dtype == np.int32 and col.max() < 3
