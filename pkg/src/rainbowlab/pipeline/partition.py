"""Random reservoir / colour-class partition with explicit verification."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from ..core import ColoredHypergraph, stream
from ._common import Failure, loglog


@dataclass(frozen=True)
class PartitionPlan:
    W: frozenset
    C0: frozenset
    C1: frozenset
    C_small: frozenset
    alpha: float
    attempts: int = 1
    stats: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class Windows:
    """Finite-n stand-ins for the asymptotic conditions.

    ``slack`` widens the size targets of W, C0 and C1 to (1 +- slack) times
    their expectation; ``low``/``high`` bound the reservoir degrees relative to
    alpha * d(v) / ln ln n.
    """
    slack: float = 0.5
    low: float = 0.5
    high: float = 2.0
    color_load: float = 100.0


def palette_of(G: ColoredHypergraph, exclude=()) -> np.ndarray:
    """Distinct colours present in G, minus ``exclude``."""
    cols = np.unique(G.colors)
    if exclude:
        cols = cols[~np.isin(cols, np.fromiter(exclude, dtype=np.int64))]
    return cols


def check_plan(G: ColoredHypergraph, domain, W, C0, C1, alpha: float,
               windows: Windows = Windows(), palette_size: int | None = None) -> Counter:
    """Count violations of the five partition conditions; empty means verified.

    G must already be restricted to ``domain``.
    """
    n = G.n
    ll = loglog(n)
    bad = Counter()
    dom = np.zeros(n, dtype=bool)
    dom[list(domain)] = True
    inW = np.zeros(n, dtype=bool)
    inW[list(W)] = True
    s = windows.slack

    w_target = dom.sum() / ll
    if not (1 - s) * w_target <= inW.sum() <= (1 + s) * w_target:
        bad["i"] += 1

    ncol = len(palette_of(G)) if palette_size is None else palette_size
    c_target = alpha * ncol
    for cls in (C0, C1):
        if not cls or not (1 - s) * c_target <= len(cls) <= (1 + s) * c_target:
            bad["ii"] += 1

    cls = np.zeros(G.c, dtype=np.int8)
    cls[list(C0)] = 1
    cls[list(C1)] = 2
    a, b = G.edges[:, 0], G.edges[:, 1]
    ec = cls[G.colors] if G.m else np.zeros(0, dtype=np.int8)
    deg = np.bincount(G.edges.ravel(), minlength=n)
    lo = windows.low * alpha * deg / ll
    hi = windows.high * alpha * deg / ll

    both_w = inW[a] & inW[b] & (ec == 1)
    d0 = np.bincount(a[both_w], minlength=n) + np.bincount(b[both_w], minlength=n)
    ok0 = (d0 > lo) & (d0 < hi)
    bad["iii"] += int((inW & ~ok0).sum())

    c1 = ec == 2
    d1 = (np.bincount(a[c1], weights=inW[b[c1]], minlength=n)
          + np.bincount(b[c1], weights=inW[a[c1]], minlength=n))
    ok1 = (d1 > lo) & (d1 < hi)
    bad["iv"] += int((dom & ~ok1).sum())

    load = windows.color_load * math.log(n) / ll ** 2
    if both_w.any():
        per = np.bincount(G.colors[both_w])
        bad["v"] += int((per > load).sum())
    return +bad


def partition(G: ColoredHypergraph, alpha: float = 0.1, delta: float = 0.05, retries: int = 20,
              *, seed: int = 0, exclude=(), c_small=(), windows: Windows = Windows()):
    """Sample (W, C0, C1) on G minus ``exclude`` until every condition checks out.

    Returns a PartitionPlan or a Failure carrying the tally of violated
    conditions over all attempts.
    """
    G._require_graph()
    n = G.n
    if n < 16:
        return Failure("partition", "n too small for ln ln n > 1", {"n": n})
    exclude = frozenset(int(v) for v in exclude)
    c_small = frozenset(int(x) for x in c_small)
    domain = sorted(set(range(n)) - exclude)
    H = G.restrict(vertices=domain)
    if alpha <= 0:
        return Failure("partition", "alpha must be positive", {"alpha": alpha})
    deg = np.asarray(H.degrees)[domain]
    if deg.size == 0 or deg.min() < delta * math.log(n) or deg.min() == 0:
        return Failure("partition", "minimum degree below delta ln n",
                       {"min_degree": int(deg.min()) if deg.size else 0})
    palette = palette_of(H, c_small)
    rng = stream(seed, "partition")
    pw = min(1.0, 1.0 / loglog(n))
    tally = Counter()
    for attempt in range(1, max(1, retries) + 1):
        wbits = rng.random(len(domain)) < pw
        coin = rng.random(len(palette)) < 2 * alpha
        side = rng.random(len(palette)) < 0.5
        W = frozenset(np.asarray(domain)[wbits].tolist())
        C0 = frozenset(palette[coin & side].tolist())
        C1 = frozenset(palette[coin & ~side].tolist())
        bad = check_plan(H, domain, W, C0, C1, alpha, windows, len(palette))
        if not bad:
            return PartitionPlan(W, C0, C1, c_small, alpha, attempt,
                                 {"W": len(W), "C0": len(C0), "C1": len(C1),
                                  "palette": int(len(palette))})
        tally.update({k: 1 for k in bad})
    return Failure("partition", "no verified plan within retry budget",
                   {"attempts": max(1, retries), "violations": dict(sorted(tally.items()))})
