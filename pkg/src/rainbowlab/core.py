"""Edge-coloured hypergraphs and the random model H^k_c(n, p).

Vertices are ``0..n-1`` and colours ``0..c-1`` in memory; the text file
format (:mod:`rainbowlab.graphio`) is 1-based.  Edges are kept sorted in
colexicographic order, which also fixes the enumeration ``e_1..e_N`` used by
the coupling simulator.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import combinations

import numpy as np

# colours are signed 32-bit so that -1 can mark absent or multi-coloured slots
MAX_COLORS = 2**31 - 1


class ModelError(ValueError):
    """A model-level precondition does not hold (divisibility, q > 1, ...)."""


@dataclass(frozen=True)
class ModelParams:
    n: int
    k: int
    p: float
    c: int
    seed: int = 0

    def __post_init__(self):
        if self.k < 2:
            raise ModelError(f"uniformity k must be >= 2, got {self.k}")
        if self.n < self.k:
            raise ModelError(f"need n >= k, got n={self.n}, k={self.k}")
        if not 0.0 <= self.p <= 1.0:
            raise ModelError(f"edge probability must lie in [0, 1], got {self.p}")
        if not 1 <= self.c <= MAX_COLORS:
            raise ModelError(f"palette size must lie in [1, 2^31-1], got {self.c}")
        if not 0 <= self.seed < 2**64:
            raise ModelError("seed must be a 64-bit unsigned integer")

    @property
    def num_slots(self) -> int:
        return math.comb(self.n, self.k)

    def replace(self, **kw) -> "ModelParams":
        d = dict(n=self.n, k=self.k, p=self.p, c=self.c, seed=self.seed)
        d.update(kw)
        return ModelParams(**d)


# -- colex enumeration -------------------------------------------------------

def colex_rank(edge) -> int:
    """Rank of a k-subset of {0..n-1} in colexicographic order."""
    return sum(math.comb(v, i + 1) for i, v in enumerate(sorted(edge)))


@lru_cache(maxsize=64)
def _all_edges(n: int, k: int) -> np.ndarray:
    if k == 2:
        a, b = np.triu_indices(n, 1)
        # colex: by larger vertex, then smaller
        order = np.lexsort((a, b))
        out = np.stack([a[order], b[order]], axis=1)
    else:
        out = np.array(list(combinations(range(n), k)), dtype=np.int64).reshape(-1, k)
        order = np.lexsort(out.T)  # last column is the primary key
        out = out[order]
    out = np.ascontiguousarray(out, dtype=np.int32)
    out.setflags(write=False)
    return out


def all_edges(n: int, k: int) -> np.ndarray:
    """All k-subsets of [n] as an (N, k) array, row i = edge of colex rank i."""
    return _all_edges(n, k)


def edge_ranks(edges: np.ndarray) -> np.ndarray:
    """Vectorised colex ranks for an (m, k) array of sorted edges."""
    edges = np.asarray(edges, dtype=np.int64)
    if edges.size == 0:
        return np.zeros(0, dtype=np.int64)
    k = edges.shape[1]
    ranks = np.zeros(edges.shape[0], dtype=np.int64)
    for i in range(k):
        v = edges[:, i]
        # comb(v, i+1) vectorised via exact integer products
        num = np.ones_like(v)
        for j in range(i + 1):
            num = num * (v - j)
        ranks += num // math.factorial(i + 1)
    return ranks


# -- random streams ------------------------------------------------------------

def stream(seed: int, tag: str) -> np.random.Generator:
    """Independent Philox stream keyed by ``blake2b(seed, tag)``.

    Philox is counter based, so a stream is a pure function of its key.
    """
    h = hashlib.blake2b(f"{int(seed)}/{tag}".encode(), digest_size=16).digest()
    key = np.frombuffer(h, dtype=np.uint64).copy()
    return np.random.Generator(np.random.Philox(key=key))


def draw_slots(params: ModelParams, trials: int = 1, tag: str = "model"):
    """Uniforms deciding presence and colours for every slot, ``trials`` rows.

    Presence and colour use separate streams, so the presence pattern does
    not depend on ``c``.  Row 0 equals a single-trial draw with the same seed.
    """
    N = params.num_slots
    u = stream(params.seed, f"{tag}/presence").random((trials, N))
    col = stream(params.seed, f"{tag}/color").integers(0, params.c, size=(trials, N),
                                                       dtype=np.int64)
    return u, col.astype(np.int32)


def generate_arrays(params: ModelParams, trials: int = 1):
    """Batch form of :func:`generate`: (present, colors) arrays of shape (trials, N)."""
    u, col = draw_slots(params, trials)
    return u < params.p, col


# -- the hypergraph ------------------------------------------------------------

class ColoredHypergraph:
    """Immutable k-uniform hypergraph on [n] with one colour per edge."""

    def __init__(self, n: int, k: int, c: int, edges, colors, *, validate: bool = True):
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, k)
        colors = np.asarray(colors, dtype=np.int64).reshape(-1)
        if validate:
            if k < 2:
                raise ValueError("k must be >= 2")
            if not 1 <= c <= MAX_COLORS:
                raise ValueError(f"palette size out of range: {c}")
            if edges.shape[0] != colors.shape[0]:
                raise ValueError("edges and colors differ in length")
            edges = np.sort(edges, axis=1)
            if edges.size and (edges.min() < 0 or edges.max() >= n):
                raise ValueError("edge vertex outside [0, n)")
            if k > 1 and edges.size and (np.diff(edges, axis=1) == 0).any():
                raise ValueError("edge with repeated vertex")
            if colors.size and (colors.min() < 0 or colors.max() >= c):
                raise ValueError("colour outside [0, c)")
        ranks = edge_ranks(edges)
        order = np.argsort(ranks, kind="stable")
        ranks = ranks[order]
        if validate and ranks.size > 1 and (np.diff(ranks) == 0).any():
            raise ValueError("duplicate edge")
        self.n = int(n)
        self.k = int(k)
        self.c = int(c)
        self.edges = np.ascontiguousarray(edges[order], dtype=np.int32)
        self.colors = np.ascontiguousarray(colors[order], dtype=np.int32)
        self.ranks = ranks
        for a in (self.edges, self.colors, self.ranks):
            a.setflags(write=False)

    # construction helpers
    @classmethod
    def from_slots(cls, n, k, c, present, colors):
        present = np.asarray(present, dtype=bool)
        return cls(n, k, c, all_edges(n, k)[present], np.asarray(colors)[present],
                   validate=False)

    @classmethod
    def from_edge_list(cls, n, edges, colors=None, *, k=None, c=None):
        edges = [tuple(e) for e in edges]
        if k is None:
            k = len(edges[0]) if edges else 2
        if colors is None:
            colors = list(range(len(edges)))
        if c is None:
            c = max(colors) + 1 if len(colors) else 1
        return cls(n, k, c, np.array(edges, dtype=np.int64).reshape(-1, k), colors)

    # basic queries
    @property
    def m(self) -> int:
        return int(self.edges.shape[0])

    def __len__(self):
        return self.m

    def __repr__(self):
        return f"ColoredHypergraph(n={self.n}, k={self.k}, c={self.c}, m={self.m})"

    def __eq__(self, other):
        if not isinstance(other, ColoredHypergraph):
            return NotImplemented
        return (self.n, self.k, self.c) == (other.n, other.k, other.c) and \
            np.array_equal(self.edges, other.edges) and np.array_equal(self.colors, other.colors)

    def __hash__(self):
        return hash((self.n, self.k, self.c, self.edges.tobytes(), self.colors.tobytes()))

    @cached_property
    def color_of(self) -> dict:
        return {tuple(e): int(col) for e, col in zip(self.edges.tolist(), self.colors.tolist())}

    def edge_color(self, edge):
        """Colour of ``edge`` or ``None`` if absent."""
        return self.color_of.get(tuple(sorted(edge)))

    def has_edge(self, edge) -> bool:
        return tuple(sorted(edge)) in self.color_of

    def edge_tuples(self):
        return [tuple(e) for e in self.edges.tolist()]

    @cached_property
    def degrees(self) -> np.ndarray:
        deg = np.bincount(self.edges.ravel(), minlength=self.n).astype(np.int64)
        deg.setflags(write=False)
        return deg

    @cached_property
    def slot_mask(self) -> np.ndarray:
        """Boolean presence vector over all C(n, k) slots (colex order)."""
        mask = np.zeros(math.comb(self.n, self.k), dtype=bool)
        mask[self.ranks] = True
        return mask

    # graph (k = 2) views
    def _require_graph(self):
        if self.k != 2:
            raise ValueError("operation defined for graphs (k = 2) only")

    @cached_property
    def color_matrix(self) -> np.ndarray:
        """n x n matrix of edge colours, -1 for non-edges (k = 2)."""
        self._require_graph()
        cm = np.full((self.n, self.n), -1, dtype=np.int32)
        if self.m:
            a, b = self.edges[:, 0], self.edges[:, 1]
            cm[a, b] = self.colors
            cm[b, a] = self.colors
        cm.setflags(write=False)
        return cm

    @cached_property
    def adj(self) -> list:
        """Adjacency as a list of sorted neighbour lists (k = 2)."""
        self._require_graph()
        nb = [[] for _ in range(self.n)]
        for a, b in self.edges.tolist():
            nb[a].append(b)
            nb[b].append(a)
        for lst in nb:
            lst.sort()
        return nb

    @cached_property
    def adj_sets(self) -> list:
        return [set(x) for x in self.adj]

    @cached_property
    def adj_bits(self) -> list:
        """Neighbourhoods as Python-int bitsets (k = 2)."""
        out = []
        for lst in self.adj:
            b = 0
            for v in lst:
                b |= 1 << v
            out.append(b)
        return out

    def color_degree(self) -> np.ndarray:
        """Number of distinct colours on edges at each vertex (any k)."""
        seen = [set() for _ in range(self.n)]
        for e, col in zip(self.edges.tolist(), self.colors.tolist()):
            for v in e:
                seen[v].add(col)
        return np.array([len(s) for s in seen], dtype=np.int64)

    # derived hypergraphs
    def restrict(self, vertices=None, colors=None) -> "ColoredHypergraph":
        """H[W; C0]: edges inside ``vertices`` whose colour lies in ``colors``.

        The vertex labels (and n) are kept.
        """
        keep = np.ones(self.m, dtype=bool)
        if vertices is not None:
            vm = np.zeros(self.n, dtype=bool)
            vm[list(vertices)] = True
            keep &= vm[self.edges].all(axis=1)
        if colors is not None:
            cm = np.zeros(self.c, dtype=bool)
            cm[[x for x in colors if 0 <= x < self.c]] = True
            keep &= cm[self.colors]
        return self.select(keep)

    def select(self, keep) -> "ColoredHypergraph":
        keep = np.asarray(keep, dtype=bool)
        return ColoredHypergraph(self.n, self.k, self.c, self.edges[keep], self.colors[keep],
                                 validate=False)

    def without_edges(self, edges) -> "ColoredHypergraph":
        drop = {tuple(sorted(e)) for e in edges}
        keep = np.array([tuple(e) not in drop for e in self.edges.tolist()], dtype=bool)
        return self.select(keep)

    def recolored(self, colors, c=None) -> "ColoredHypergraph":
        colors = np.asarray(colors, dtype=np.int64)
        c = int(colors.max()) + 1 if c is None and colors.size else (c or self.c)
        return ColoredHypergraph(self.n, self.k, c, self.edges, colors)

    def relabel(self, perm) -> "ColoredHypergraph":
        """Apply vertex map ``v -> perm[v]``."""
        perm = np.asarray(perm, dtype=np.int64)
        return ColoredHypergraph(self.n, self.k, self.c, perm[self.edges], self.colors)


def generate(params: ModelParams) -> ColoredHypergraph:
    """One draw from H^k_c(n, p), a pure function of ``params``."""
    present, colors = generate_arrays(params, 1)
    return ColoredHypergraph.from_slots(params.n, params.k, params.c, present[0], colors[0])


def rainbow_complete(n: int, k: int = 2) -> ColoredHypergraph:
    """Complete k-graph with every edge a distinct colour (colour = colex rank)."""
    N = math.comb(n, k)
    return ColoredHypergraph(n, k, N, all_edges(n, k), np.arange(N), validate=False)


# -- model arithmetic ----------------------------------------------------------

def ham_ell_edge_count(n: int, k: int, ell: int) -> int:
    """Number of edges of a Hamilton ell-cycle: n / (k - ell)."""
    if not 0 <= ell < k:
        raise ModelError(f"need 0 <= ell < k, got ell={ell}, k={k}")
    if n % (k - ell):
        raise ModelError(f"n not divisible by k-ell (n={n}, k-ell={k - ell})")
    return n // (k - ell)


def coupled_q(c: int, p: float, ell: int) -> float:
    """Edge probability c*p/ell of the coloured side of the coupling."""
    if ell < 1:
        raise ModelError("richness must be >= 1")
    q = c * p / ell
    if q > 1.0 + 1e-12:
        raise ModelError(f"coupling inapplicable: q = c*p/ell = {q:.6g} > 1")
    return min(q, 1.0)


def hc_family_richness(n: int, c: int) -> int:
    """Richness c - n + 1 of the rainbow Hamilton cycles of K_n in c colours."""
    if n < 3:
        raise ModelError("Hamilton cycles need n >= 3")
    if c < n:
        raise ModelError(f"no rainbow Hamilton cycle possible with c={c} < n={n}")
    return c - n + 1


def threshold_p(n: int, x: float) -> float:
    """p = (ln n + ln ln n + x) / n, clipped to [0, 1]."""
    val = (math.log(n) + math.log(math.log(n)) + x) / n
    return min(1.0, max(0.0, val))
