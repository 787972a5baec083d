"""Rainbow star matchings: D private reservoir neighbours per vertex."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_flow

from ..core import ColoredHypergraph
from ..verify import is_D_matching
from ._common import Failure, edge_key


@dataclass(frozen=True)
class StarMatching:
    edges: tuple
    colors: tuple
    D: int

    def neighbors(self, s: int) -> list:
        return sorted(b if a == s else a for a, b in self.edges if s in (a, b))


def _flow(S, W, cand, D):
    """Max flow source -> S (cap D) -> W (cap 1) -> sink ignoring colours.

    Returns (value, chosen candidate indices, S vertices left unsaturated).
    """
    si = {s: 1 + i for i, s in enumerate(S)}
    wi = {w: 1 + len(S) + i for i, w in enumerate(W)}
    sink = 1 + len(S) + len(W)
    rows = [0] * len(S) + [si[s] for s, _, _ in cand] + [wi[w] for w in W]
    cols = [si[s] for s in S] + [wi[w] for _, w, _ in cand] + [sink] * len(W)
    caps = [D] * len(S) + [1] * len(cand) + [1] * len(W)
    g = csr_matrix((np.array(caps, dtype=np.int32), (rows, cols)), shape=(sink + 1, sink + 1))
    res = maximum_flow(g, 0, sink)
    fl = res.flow
    chosen = [j for j, (s, w, _) in enumerate(cand) if fl[si[s], wi[w]] > 0]
    short = [s for s in S if fl[0, si[s]] < D]
    return int(res.flow_value), chosen, short


def star_matching(G: ColoredHypergraph, S, W, C1, D: int, *, node_limit: int = 10_000):
    """Rainbow D-matching from S into W using colours of C1, or a Failure.

    The colour-blind flow is an upper bound.  When its optimum repeats a
    colour, the search branches on which single edge of that colour to keep
    (a rainbow solution uses at most one), which makes the search exact.
    """
    G._require_graph()
    S = sorted({int(v) for v in S})
    W = sorted({int(v) for v in W})
    if set(S) & set(W):
        raise ValueError("S and W must be disjoint")
    need = D * len(S)
    if need == 0:
        return StarMatching((), (), D)
    allowed = set(int(x) for x in C1)
    inW = set(W)
    sset = set(S)
    cand = []
    for (a, b), col in zip(G.edges.tolist(), G.colors.tolist()):
        if col not in allowed:
            continue
        if a in sset and b in inW:
            cand.append((a, b, col))
        elif b in sset and a in inW:
            cand.append((b, a, col))
    nodes = 0
    first_short = None

    def solve(pool):
        nonlocal nodes, first_short
        nodes += 1
        if nodes > node_limit:
            return None
        value, chosen, short = _flow(S, W, pool, D)
        if first_short is None:
            first_short = (value, short)
        if value < need:
            return None
        by_color = {}
        for j in chosen:
            by_color.setdefault(pool[j][2], []).append(j)
        clash = sorted(col for col, js in by_color.items() if len(js) > 1)
        if not clash:
            return [pool[j] for j in chosen]
        col = clash[0]
        group = [e for e in pool if e[2] == col]
        rest = [e for e in pool if e[2] != col]
        for e in group:
            found = solve(rest + [e])
            if found:
                return found
        return None

    found = solve(cand)
    if not found:
        value, short = first_short
        if nodes > node_limit:
            reason = "search budget exhausted"
        elif value < need:
            reason = "max flow below D|S|"
        else:
            reason = "colour clashes leave no rainbow D-matching"
        return Failure("star-matching", reason,
                       {"flow": value, "need": need, "deficient": short, "nodes": nodes})
    edges = tuple(edge_key(s, w) for s, w, _ in sorted(found))
    cols = tuple(col for _, _, col in sorted(found))
    assert is_D_matching(G, S, W, edges, D)
    return StarMatching(edges, cols, D)
