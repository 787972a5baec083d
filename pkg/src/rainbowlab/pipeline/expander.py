"""Sparse rainbow expanders inside the reservoir."""
from __future__ import annotations

import numpy as np

from ..core import ColoredHypergraph, stream
from ..verify import is_expander
from ._common import Failure


def _clashes(choice, owner, colors):
    """Owners of chosen edges whose colour is shared with another chosen edge."""
    edges = np.unique(choice[choice >= 0])
    cols = colors[edges]
    uniq, counts = np.unique(cols, return_counts=True)
    bad_cols = uniq[counts > 1]
    if bad_cols.size == 0:
        return np.zeros(0, dtype=np.int64)
    bad_edges = edges[np.isin(cols, bad_cols)]
    return np.unique(owner[np.isin(choice, bad_edges).any(axis=1)])


def rainbow_expander(G: ColoredHypergraph, W, C0, d: int, k_bound: int, *,
                     d_required: float = 2, retries: int = 50, seed: int = 0,
                     budget: int = 10**5, samples: int = 2000, resample_rounds: int = 100,
                     give_up: int = 3):
    """Each w in W picks d random incident edges of G[W; C0]; keep the union
    once it is rainbow and every set of at most ``k_bound`` vertices expands
    by ``d_required``.

    Colour clashes are repaired by redrawing only the choices of the
    vertices involved (Moser-Tardos resampling), up to ``resample_rounds``
    rounds; a sample that stays non-rainbow or fails expansion is discarded
    and drawn afresh, up to ``retries`` times.  After ``give_up`` samples in
    a row whose clashes never clear, the palette is taken to be too small.

    Returns the subgraph (labels kept) or a Failure with rejection counts.
    """
    G._require_graph()
    W = sorted({int(v) for v in W})
    H = G.restrict(vertices=W, colors=C0)
    if H.m == 0:
        return Failure("expander", "G[W; C0] has no edges")
    if d <= 0:
        return Failure("expander", "d must be positive", {"d": d})
    inc = [[] for _ in range(G.n)]
    for j, (a, b) in enumerate(H.edges.tolist()):
        inc[a].append(j)
        inc[b].append(j)
    active = [w for w in W if inc[w]]
    owner = np.arange(len(active))
    colors = np.asarray(H.colors)
    rng = stream(seed, "expander")

    def draw(rows):
        for r in rows:
            cand = inc[active[r]]
            choice[r] = np.asarray(cand)[rng.integers(len(cand), size=d)]

    rejected = {"rainbow": 0, "expansion": 0}
    stuck = 0
    for attempt in range(1, max(1, retries) + 1):
        choice = np.full((len(active), d), -1, dtype=np.int64)
        draw(range(len(active)))
        for _ in range(resample_rounds):
            bad = _clashes(choice, owner, colors)
            if bad.size == 0:
                break
            draw(bad.tolist())
        else:
            rejected["rainbow"] += 1
            stuck += 1
            if stuck >= give_up:
                return Failure("expander", "colour clashes persist after resampling",
                               {"attempts": attempt, "rejected": rejected,
                                "choices": d * len(active), "colors": int(np.unique(colors).size)})
            continue
        stuck = 0
        pick = np.zeros(H.m, dtype=bool)
        pick[choice.ravel()] = True
        R = H.select(pick)
        if np.unique(R.colors).size != R.m:
            rejected["rainbow"] += 1
            continue
        rep = is_expander(R, k_bound, d_required, vertices=W, budget=budget,
                          samples=samples, seed=seed + attempt)
        if not rep:
            rejected["expansion"] += 1
            continue
        assert R.m <= d * len(W)
        return R
    return Failure("expander", "no admissible sample within retry budget",
                   {"attempts": max(1, retries), "rejected": rejected})
