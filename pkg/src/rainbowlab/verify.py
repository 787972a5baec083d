"""Certificate checks and structural predicates on coloured graphs."""
from __future__ import annotations

import heapq
import json
import math
from collections import Counter, deque
from dataclasses import asdict, dataclass, field
from itertools import combinations

import numpy as np

from . import kernels
from .core import ColoredHypergraph, stream

HAMILTON_CYCLE = "hamilton-cycle"
HAMILTON_PATH = "hamilton-path"
ELL_CYCLE = "hamilton-ell-cycle"
PERFECT_MATCHING = "perfect-matching"
SUBGRAPH = "subgraph-copy"
KINDS = (HAMILTON_CYCLE, HAMILTON_PATH, ELL_CYCLE, PERFECT_MATCHING, SUBGRAPH)


@dataclass(frozen=True)
class RainbowCertificate:
    """A claimed rainbow structure.

    Cycle and path kinds carry ``vertices`` (the order); matchings and copies
    carry ``edges``.  ``colors`` lists the colour of each structure edge in
    order; ``span`` restricts a Hamilton path to a vertex subset.
    """
    kind: str
    vertices: tuple | None = None
    edges: tuple | None = None
    colors: tuple | None = None
    ell: int | None = None
    span: tuple | None = None

    def structure_edges(self, k: int = 2):
        """Edges (sorted tuples) the certificate claims, in order."""
        if self.kind in (PERFECT_MATCHING, SUBGRAPH):
            return [tuple(sorted(e)) for e in (self.edges or ())]
        order = list(self.vertices or ())
        if self.kind == HAMILTON_CYCLE:
            if len(order) < 3:
                return []
            return [tuple(sorted((order[i], order[(i + 1) % len(order)])))
                    for i in range(len(order))]
        if self.kind == HAMILTON_PATH:
            return [tuple(sorted(p)) for p in zip(order, order[1:])]
        if self.kind == ELL_CYCLE:
            n = len(order)
            step = k - self.ell
            return [tuple(sorted(order[(j * step + t) % n] for t in range(k)))
                    for j in range(n // step)]
        raise ValueError(f"unknown kind {self.kind!r}")

    def to_dict(self):
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in asdict(self).items()}


@dataclass(frozen=True)
class Verdict:
    ok: bool
    reason: str = "ok"

    def __bool__(self):
        return self.ok


def _fail(reason):
    return Verdict(False, reason)


def check_certificate(H: ColoredHypergraph, cert: RainbowCertificate) -> Verdict:
    """Does ``cert`` describe a rainbow structure of the claimed kind in ``H``?"""
    if cert.kind not in KINDS:
        return _fail("unknown-kind")
    if cert.kind in (HAMILTON_CYCLE, HAMILTON_PATH) and H.k != 2:
        return _fail("kind-mismatch")
    n = H.n
    if cert.kind in (HAMILTON_CYCLE, HAMILTON_PATH, ELL_CYCLE):
        order = list(cert.vertices or ())
        if any(not (isinstance(v, (int, np.integer)) and 0 <= v < n) for v in order):
            return _fail("bad-vertex")
        if len(set(order)) != len(order):
            return _fail("repeated-vertex")
        target = set(range(n)) if cert.span is None or cert.kind != HAMILTON_PATH \
            else set(cert.span)
        if set(order) != target:
            return _fail("not-spanning")
        if cert.kind == HAMILTON_CYCLE and n < 3:
            return _fail("bad-structure")
        if cert.kind == ELL_CYCLE:
            ell = cert.ell
            if ell is None or not 0 <= ell < H.k or n % (H.k - ell):
                return _fail("bad-structure")
    edges = cert.structure_edges(H.k)
    if cert.kind == ELL_CYCLE:
        if len(set(edges)) != len(edges):
            return _fail("bad-structure")
        if len(edges) > 1:
            for e, f in zip(edges, edges[1:] + edges[:1]):
                if len(set(e) & set(f)) != cert.ell:
                    return _fail("bad-structure")
    if cert.kind == PERFECT_MATCHING:
        covered = [v for e in edges for v in e]
        if any(len(e) != H.k for e in edges):
            return _fail("bad-structure")
        if len(covered) != len(set(covered)) or set(covered) != set(range(n)):
            return _fail("not-spanning")
    if cert.kind == SUBGRAPH:
        if any(len(e) != H.k or len(set(e)) != H.k for e in edges):
            return _fail("bad-structure")
        if len(set(edges)) != len(edges):
            return _fail("bad-structure")
    actual = []
    for e in edges:
        col = H.edge_color(e)
        if col is None:
            return _fail("missing-edge")
        actual.append(col)
    if cert.colors is not None and list(cert.colors) != actual:
        return _fail("color-mismatch")
    if len(set(actual)) != len(actual):
        return _fail("color-repeat")
    return Verdict(True)


def make_certificate(H: ColoredHypergraph, kind: str, *, vertices=None, edges=None,
                     ell=None, span=None) -> RainbowCertificate:
    """Build a certificate with colours read off ``H``."""
    cert = RainbowCertificate(kind, vertices=tuple(int(v) for v in vertices) if vertices is not None else None,
                              edges=tuple(tuple(int(v) for v in e) for e in edges) if edges is not None else None,
                              ell=ell, span=tuple(sorted(span)) if span is not None else None)
    cols = tuple(H.edge_color(e) for e in cert.structure_edges(H.k))
    return RainbowCertificate(cert.kind, cert.vertices, cert.edges, cols, ell, cert.span)


# -- SMALL ---------------------------------------------------------------------

def small_set(G: ColoredHypergraph, delta: float = 0.05, log=math.log) -> frozenset:
    """Vertices of degree at most delta * log(n)."""
    G._require_graph()
    thr = delta * log(G.n)
    return frozenset(int(v) for v in np.flatnonzero(G.degrees <= thr))


# -- expansion -------------------------------------------------------------------

@dataclass
class ExpansionReport:
    k_bound: int
    d: float
    ok: bool
    witness: tuple | None = None
    mode: str = "exhaustive"
    samples: int = 0

    def __bool__(self):
        return self.ok


def _local_bits(G, verts):
    """Adjacency bitsets of G[verts] in local labels 0..len(verts)-1."""
    pos = {v: i for i, v in enumerate(verts)}
    bits = [0] * len(verts)
    for a, b in G.edges.tolist():
        if a in pos and b in pos:
            ia, ib = pos[a], pos[b]
            bits[ia] |= 1 << ib
            bits[ib] |= 1 << ia
    return bits


def _ext(bits, xmask, members):
    nb = 0
    for i in members:
        nb |= bits[i]
    return (nb & ~xmask).bit_count()


def is_expander(G: ColoredHypergraph, k_bound: int, d: float, *, vertices=None,
                budget: int = 10**6, samples: int = 10**5, seed: int = 0) -> ExpansionReport:
    """Is every X (|X| <= k_bound) satisfying |N(X) \\ X| >= d|X|?

    Runs over all such X when there are at most ``budget`` of them, otherwise
    samples sets (all singletons, vertex neighbourhoods, random and
    BFS-grown sets) and can only refute.
    """
    G._require_graph()
    verts = sorted(range(G.n) if vertices is None else set(vertices))
    nv = len(verts)
    k_bound = min(int(k_bound), nv)
    if k_bound <= 0:
        return ExpansionReport(k_bound, d, True)
    bits = _local_bits(G, verts)
    total = sum(math.comb(nv, s) for s in range(1, k_bound + 1))

    def witness(xmask):
        return tuple(verts[i] for i in range(nv) if xmask >> i & 1)

    if total <= budget:
        if nv <= 64:
            adj = np.array(bits, dtype=np.uint64)
            xm = int(kernels.expansion_exhaustive(adj, k_bound, float(d)))
            return ExpansionReport(k_bound, d, xm == 0, witness(xm) if xm else None,
                                   "exhaustive", total)
        for size in range(1, k_bound + 1):
            for X in combinations(range(nv), size):
                xm = sum(1 << i for i in X)
                if _ext(bits, xm, X) < d * size:
                    return ExpansionReport(k_bound, d, False, witness(xm), "exhaustive", total)
        return ExpansionReport(k_bound, d, True, None, "exhaustive", total)

    rng = stream(seed, "expander-sample")
    tried = 0

    def test(members):
        nonlocal tried
        tried += 1
        xm = 0
        for i in members:
            xm |= 1 << i
        return xm if _ext(bits, xm, members) < d * len(members) else 0

    candidates = [[i] for i in range(nv)]
    for i in range(nv):
        nbrs = [j for j in range(nv) if bits[i] >> j & 1]
        if 0 < len(nbrs) <= k_bound:
            candidates.append(nbrs)
        if len(nbrs) + 1 <= k_bound:
            candidates.append(nbrs + [i])
    for X in candidates:
        xm = test(X)
        if xm:
            return ExpansionReport(k_bound, d, False, witness(xm), "sampled", tried)
    while tried < samples:
        size = int(rng.integers(1, k_bound + 1))
        if rng.random() < 0.5:
            X = rng.choice(nv, size=size, replace=False).tolist()
        else:
            # grow a connected set by BFS from a random root
            root = int(rng.integers(nv))
            X, seen, q = [], {root}, deque([root])
            while q and len(X) < size:
                u = q.popleft()
                X.append(u)
                nb = [j for j in range(nv) if bits[u] >> j & 1 and j not in seen]
                rng.shuffle(nb)
                for j in nb:
                    seen.add(j)
                    q.append(j)
        xm = test(X)
        if xm:
            return ExpansionReport(k_bound, d, False, witness(xm), "sampled", tried)
    return ExpansionReport(k_bound, d, True, None, "sampled", tried)


# -- rainbow pseudorandomness ----------------------------------------------------

@dataclass
class PseudorandomReport:
    k: int
    ok: bool
    witness: tuple | None = None
    mode: str = "exhaustive"
    samples: int = 0
    # with no refutation in N samples, fraction of violating pairs < this at 99%
    violation_fraction_bound: float | None = None

    def __bool__(self):
        return self.ok


def _colors_between(cm, A, B):
    sub = cm[np.ix_(A, B)]
    sub = sub[sub >= 0]
    return int(np.unique(sub).size)


def is_rainbow_pseudorandom(G: ColoredHypergraph, k: int, *, budget: int = 10**6,
                            samples: int = 10**5, seed: int = 0) -> PseudorandomReport:
    """Every two disjoint k-sets see at least n colours between them."""
    G._require_graph()
    n = G.n
    if 2 * k > n or k <= 0:
        return PseudorandomReport(k, True, mode="vacuous")
    cm = np.asarray(G.color_matrix)
    pairs = math.comb(n, k) * math.comb(n - k, k) // 2
    if pairs <= budget:
        for A in combinations(range(n), k):
            rest = [v for v in range(n) if v not in A and v > A[0]]
            for B in combinations(rest, k):
                if _colors_between(cm, list(A), list(B)) < n:
                    return PseudorandomReport(k, False, (A, B), "exhaustive", pairs)
        return PseudorandomReport(k, True, None, "exhaustive", pairs)
    rng = stream(seed, "pseudorandom-sample")
    for t in range(1, samples + 1):
        perm = rng.permutation(n)
        A, B = sorted(perm[:k].tolist()), sorted(perm[k:2 * k].tolist())
        if _colors_between(cm, A, B) < n:
            return PseudorandomReport(k, False, (tuple(A), tuple(B)), "sampled", t)
    return PseudorandomReport(k, True, None, "sampled", samples, 1.0 - 0.01 ** (1.0 / samples))


# -- D-matchings -----------------------------------------------------------------

def is_D_matching(G: ColoredHypergraph, S, W, M, D: int) -> bool:
    """Rainbow M with every s in S having exactly D M-edges into W, W used once."""
    S, W = set(S), set(W)
    if S & W:
        return False
    M = [tuple(sorted(e)) for e in M]
    if len(set(M)) != len(M):
        return False
    cols = []
    deg_s = Counter()
    deg_w = Counter()
    for e in M:
        col = G.edge_color(e)
        if col is None:
            return False
        cols.append(col)
        a, b = e
        if a in S and b in W:
            s, w = a, b
        elif b in S and a in W:
            s, w = b, a
        else:
            return False
        deg_s[s] += 1
        deg_w[w] += 1
    if len(set(cols)) != len(cols):
        return False
    if any(deg_s[s] != D for s in S):
        return False
    return all(v <= 1 for v in deg_w.values())


# -- property audit ----------------------------------------------------------------

@dataclass
class PropertyAuditReport:
    n: int
    m: int
    eps: float
    delta: float
    p: float
    log_n: float
    max_degree: int = 0
    degree_bound: float = 0.0
    small: list = field(default_factory=list)
    small_size: int = 0
    small_bound: float = 0.0
    max_color_deficit: int = 0
    color_deficit_violators: list = field(default_factory=list)
    e0_size: int = 0
    e0_repeated_colors: int = 0
    p5_pairs: list = field(default_factory=list)
    max_color_class: int = 0
    color_class_bound: float = 0.0
    p10_max_ratio: float = 0.0
    p10_witness_size: int = 0
    p11_max_ratio: float = 0.0
    p11_witness_size: int = 0
    sampled_sets: int = 0
    sampled_mode: str = "sampled"
    passes: dict = field(default_factory=dict)

    EXACT = ("P1", "P2", "P3", "P4", "P5", "P9")

    @property
    def exact_ok(self) -> bool:
        return all(self.passes[p] for p in self.EXACT)

    def scalars(self) -> dict:
        """Label-independent measurements."""
        return {k: getattr(self, k) for k in (
            "n", "m", "max_degree", "small_size", "max_color_deficit", "e0_size",
            "e0_repeated_colors", "max_color_class")} | {
            "p5_count": len(self.p5_pairs),
            "deficit_violators": len(self.color_deficit_violators)}

    def to_dict(self) -> dict:
        d = asdict(self)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def _short_cycle_through(G, v) -> bool:
    nb = G.adj[v]
    nbset = G.adj_sets
    for i, a in enumerate(nb):
        for b in nb[i + 1:]:
            if b in nbset[a]:
                return True
            # 4-cycle v-a-x-b-v
            if len((nbset[a] & nbset[b]) - {v}) > 0:
                return True
    return False


def _p5_pairs(G, small):
    pairs = set()
    for x in sorted(small):
        dist = {x: 0}
        q = deque([x])
        while q:
            u = q.popleft()
            if dist[u] == 4:
                continue
            for w in G.adj[u]:
                if w not in dist:
                    dist[w] = dist[u] + 1
                    q.append(w)
        for y, dy in dist.items():
            if y != x and y in small and 1 <= dy <= 4:
                pairs.add((min(x, y), max(x, y)))
        if _short_cycle_through(G, x):
            pairs.add((x, x))
    return sorted(pairs)


def _candidate_sets(G, rng, samples):
    """Boolean masks to audit edge density on: structural candidates then random."""
    n = G.n
    out = []
    for v in range(n):
        row = np.zeros(n, dtype=bool)
        row[G.adj[v]] = True
        row[v] = True
        out.append(row)
    for a, b in G.edges[: min(G.m, 4 * n)].tolist():
        row = out[a] | out[b]
        out.append(row)
    # densest-subgraph peeling: every prefix of the reverse peeling order
    deg = G.degrees.astype(np.int64).copy()
    alive = np.ones(n, dtype=bool)
    order = []
    heap = [(int(deg[v]), v) for v in range(n)]
    heapq.heapify(heap)
    while heap:
        dv, v = heapq.heappop(heap)
        if not alive[v] or dv != deg[v]:
            continue
        alive[v] = False
        order.append(v)
        for w in G.adj[v]:
            if alive[w]:
                deg[w] -= 1
                heapq.heappush(heap, (int(deg[w]), w))
    mask = np.zeros(n, dtype=bool)
    for v in reversed(order):
        mask[v] = True
        out.append(mask.copy())
    structural = np.array(out, dtype=bool) if out else np.zeros((0, n), dtype=bool)
    remaining = max(0, samples - structural.shape[0])
    chunks = [structural]
    while remaining > 0:
        b = min(remaining, 4096)
        frac = np.exp(rng.uniform(math.log(1.0 / n), 0.0, size=(b, 1)))
        chunks.append(rng.random((b, n)) < frac)
        remaining -= b
    return chunks


def audit_properties(G: ColoredHypergraph, eps: float = 0.2, delta: float = 0.05, *,
                     p: float | None = None, samples: int = 10**5, seed: int = 0,
                     log=math.log) -> PropertyAuditReport:
    """Measure the typical-graph properties P1-P5 and P9 exactly, P10/P11 by sampling."""
    G._require_graph()
    n = G.n
    L = log(n)
    if p is None:
        p = G.m / math.comb(n, 2) if n >= 2 else 0.0
    rep = PropertyAuditReport(n=n, m=G.m, eps=eps, delta=delta, p=float(p), log_n=L)
    deg = G.degrees
    rep.max_degree = int(deg.max()) if n else 0
    rep.degree_bound = 10 * L
    small = small_set(G, delta, log)
    rep.small = sorted(small)
    rep.small_size = len(small)
    rep.small_bound = n ** 0.4
    cdeg = G.color_degree()
    deficit = deg - cdeg
    rep.max_color_deficit = int(deficit.max()) if n else 0
    rep.color_deficit_violators = [int(v) for v in np.flatnonzero(deficit > 2)]
    e0 = [i for i, (a, b) in enumerate(G.edges.tolist()) if a in small or b in small]
    e0_cols = Counter(G.colors[e0].tolist())
    rep.e0_size = len(e0)
    rep.e0_repeated_colors = sum(1 for v in e0_cols.values() if v > 1)
    rep.p5_pairs = [list(pq) for pq in _p5_pairs(G, small)]
    class_sizes = np.bincount(G.colors, minlength=G.c) if G.m else np.zeros(1, dtype=np.int64)
    rep.max_color_class = int(class_sizes.max())
    rep.color_class_bound = 10 * L

    rng = stream(seed, "audit-sets")
    thr = n / L ** (4 / 3) if L > 0 else n
    edges = np.ascontiguousarray(G.edges, dtype=np.int64)
    best10 = (0.0, 0)
    best11 = (0.0, 0)
    tested = 0
    for masks in _candidate_sets(G, rng, samples):
        if masks.shape[0] == 0:
            continue
        sizes = masks.sum(axis=1)
        counts = kernels.induced_edge_counts(masks, edges)
        tested += masks.shape[0]
        keep = sizes > 0
        sizes, counts = sizes[keep], counts[keep]
        small_x = sizes <= thr
        if small_x.any():
            r = counts[small_x] / (8.0 * sizes[small_x])
            i = int(np.argmax(r))
            if r[i] > best10[0]:
                best10 = (float(r[i]), int(sizes[small_x][i]))
        big = ~small_x
        if big.any() and p > 0:
            xs = sizes[big].astype(float)
            r = counts[big] / (xs * xs * p * np.sqrt(n / xs))
            i = int(np.argmax(r))
            if r[i] > best11[0]:
                best11 = (float(r[i]), int(sizes[big][i]))
    rep.p10_max_ratio, rep.p10_witness_size = best10
    rep.p11_max_ratio, rep.p11_witness_size = best11
    rep.sampled_sets = tested
    rep.passes = {
        "P1": rep.max_degree <= rep.degree_bound,
        "P2": rep.small_size <= rep.small_bound,
        "P3": not rep.color_deficit_violators,
        "P4": rep.e0_repeated_colors == 0,
        "P5": not rep.p5_pairs,
        "P9": rep.max_color_class <= rep.color_class_bound,
        "P10": rep.p10_max_ratio <= 1.0,
        "P11": rep.p11_max_ratio <= 1.0,
    }
    return rep
