"""Exact search for rainbow structures on small instances."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, permutations

import numpy as np

from . import kernels
from .core import ColoredHypergraph, ModelError, ModelParams, colex_rank, ham_ell_edge_count
from .verify import (ELL_CYCLE, HAMILTON_CYCLE, PERFECT_MATCHING, RainbowCertificate,
                     make_certificate)


@dataclass(frozen=True)
class SearchBudget:
    node_limit: int = 10**9
    time_limit: float = 600.0

    def __post_init__(self):
        if self.node_limit <= 0 or self.time_limit <= 0:
            raise ValueError("budget limits must be positive")


class BudgetExhausted(RuntimeError):
    """The search hit its node or time limit before deciding the instance."""

    def __init__(self, nodes: int, elapsed: float):
        super().__init__(f"search budget exhausted after {nodes} nodes, {elapsed:.2f}s")
        self.nodes = nodes
        self.elapsed = elapsed


_CHUNK = 1 << 18


def _compressed_color_matrix(H: ColoredHypergraph):
    cm = np.asarray(H.color_matrix, dtype=np.int64)
    present = cm >= 0
    _, inv = np.unique(cm[present], return_inverse=True)
    out = np.full(cm.shape, -1, dtype=np.int64)
    out[present] = inv
    return out, int(inv.max()) + 1 if inv.size else 0


def find_rainbow_hamilton_cycle(H: ColoredHypergraph, budget: SearchBudget | None = None,
                                stats: dict | None = None) -> RainbowCertificate | None:
    """Complete backtracking search for a rainbow Hamilton cycle.

    Returns a certificate, or ``None`` once the whole space is refuted.
    Raises :class:`BudgetExhausted` if the budget runs out first.
    """
    if H.k != 2:
        raise ValueError("rainbow Hamilton cycle search is defined for graphs (k = 2)")
    budget = budget or SearchBudget()
    n = H.n
    if stats is not None:
        stats["nodes"] = 0
    if n < 3 or H.m < n or (H.degrees < 2).any() or np.unique(H.colors).size < n:
        return None
    cm, nc = _compressed_color_matrix(H)
    path = np.zeros(n, dtype=np.int64)
    it = np.zeros(n + 1, dtype=np.int64)
    ecol = np.zeros(n, dtype=np.int64)
    used_v = np.zeros(n, dtype=np.bool_)
    used_c = np.zeros(nc, dtype=np.bool_)
    cstamp = np.zeros(nc, dtype=np.int64)
    vmark = np.zeros(n, dtype=np.int64)
    queue = np.zeros(n, dtype=np.int64)
    state = np.array([1, 0], dtype=np.int64)
    used_v[0] = True
    start = time.monotonic()
    nodes = 0
    while True:
        chunk = min(_CHUNK, budget.node_limit - nodes)
        status, used = kernels.hc_search(cm, nc, path, it, ecol, used_v, used_c, cstamp,
                                         vmark, queue, state, chunk)
        nodes += int(used)
        if stats is not None:
            stats["nodes"] = nodes
        if status == kernels.FOUND:
            return make_certificate(H, HAMILTON_CYCLE, vertices=path.tolist())
        if status == kernels.EXHAUSTED:
            return None
        elapsed = time.monotonic() - start
        if nodes >= budget.node_limit or elapsed >= budget.time_limit:
            raise BudgetExhausted(nodes, elapsed)


@lru_cache(maxsize=16)
def _cycle_orders(n: int) -> np.ndarray:
    """All Hamilton cycles of K_n as vertex rows starting at 0, second < last."""
    rows = [(0,) + p for p in permutations(range(1, n)) if p[0] < p[-1]]
    out = np.array(rows, dtype=np.int64).reshape(-1, n)
    out.setflags(write=False)
    return out


def count_rainbow_hamilton_cycles(H: ColoredHypergraph) -> int:
    """Exact number of rainbow Hamilton cycles (up to rotation and reflection)."""
    if H.k != 2:
        raise ValueError("defined for graphs (k = 2)")
    n = H.n
    if n > 10:
        raise ValueError("refusing exhaustive enumeration for n > 10")
    if n < 3:
        return 0
    orders = _cycle_orders(n)
    cm = np.asarray(H.color_matrix)
    cols = cm[orders, np.roll(orders, -1, axis=1)]
    ok = (cols >= 0).all(axis=1)
    cols = np.sort(cols[ok], axis=1)
    rainbow = (np.diff(cols, axis=1) != 0).all(axis=1)
    return int(rainbow.sum())


# -- hypergraph searches ---------------------------------------------------------

def rainbow_perfect_matching(H: ColoredHypergraph, budget: SearchBudget | None = None):
    """Certificate for a rainbow perfect matching found by exhaustive pairing, or ``None``."""
    budget = budget or SearchBudget()
    n, k = H.n, H.k
    if n % k:
        return None
    inc = [[] for _ in range(n)]
    for e, col in zip(H.edges.tolist(), H.colors.tolist()):
        inc[e[0]].append((tuple(e), col))
    covered = [False] * n
    used = set()
    chosen = []
    nodes = 0
    start = time.monotonic()

    def rec():
        nonlocal nodes
        v = next((u for u in range(n) if not covered[u]), None)
        if v is None:
            return True
        nodes += 1
        if nodes % 4096 == 0:
            el = time.monotonic() - start
            if nodes >= budget.node_limit or el >= budget.time_limit:
                raise BudgetExhausted(nodes, el)
        # v is the smallest uncovered vertex, so it is the first vertex of its edge
        for e, col in inc[v]:
            if col in used or any(covered[u] for u in e):
                continue
            for u in e:
                covered[u] = True
            used.add(col)
            chosen.append(e)
            if rec():
                return True
            chosen.pop()
            used.discard(col)
            for u in e:
                covered[u] = False
        return False

    return make_certificate(H, PERFECT_MATCHING, edges=chosen) if rec() else None


def _is_ell_cycle(edges, ell):
    if len(set(edges)) != len(edges):
        return False
    if len(edges) == 1:
        return True
    return all(len(set(x) & set(y)) == ell for x, y in zip(edges, edges[1:] + edges[:1]))


def _ell_layout(n, k, ell):
    """Block start positions and, per position, the blocks it closes."""
    step = k - ell
    m = n // step
    closes = [[] for _ in range(n)]
    for j in range(m):
        last = j * step + k - 1
        # wrapping blocks are closed once the last position is placed
        closes[last if last < n else n - 1].append(j)
    interior = [False] * n
    owner = [0] * n
    for pos in range(n):
        blocks = [j for j in range(m) if (pos - j * step) % n < k]
        interior[pos] = len(blocks) == 1
        owner[pos] = blocks[0]
    return step, m, closes, interior, owner


def find_rainbow_ell_cycle(H: ColoredHypergraph, ell: int, budget: SearchBudget | None = None):
    """Complete search for a rainbow Hamilton ell-cycle (small n).

    Orderings are normalised by rotating vertex 0 into the first k - ell
    positions and sorting vertices that lie in a single block.
    """
    budget = budget or SearchBudget()
    n, k = H.n, H.k
    ham_ell_edge_count(n, k, ell)  # raises on divisibility
    step, m, closes, interior, owner = _ell_layout(n, k, ell)
    color = H.color_of
    if H.m < m or np.unique(H.colors).size < m:
        return None
    order = [-1] * n
    placed = [False] * n
    used = set()
    nodes = 0
    start = time.monotonic()

    def block(j):
        return tuple(sorted(order[(j * step + t) % n] for t in range(k)))

    def rec(pos, anchor_pos):
        nonlocal nodes
        if pos == n:
            return _is_ell_cycle([block(j) for j in range(m)], ell)
        nodes += 1
        if nodes % 4096 == 0:
            el = time.monotonic() - start
            if nodes >= budget.node_limit or el >= budget.time_limit:
                raise BudgetExhausted(nodes, el)
        if pos == anchor_pos:
            cands = [0]
        else:
            cands = range(1, n)
        for v in cands:
            if placed[v]:
                continue
            if interior[pos] and pos > 0 and interior[pos - 1] and owner[pos - 1] == owner[pos] \
                    and order[pos - 1] > v:
                continue
            order[pos] = v
            placed[v] = True
            added = []
            ok = True
            for j in closes[pos]:
                e = block(j)
                col = color.get(e)
                if col is None or col in used:
                    ok = False
                    break
                used.add(col)
                added.append(col)
            if ok and rec(pos + 1, anchor_pos):
                return True
            for col in added:
                used.discard(col)
            placed[v] = False
            order[pos] = -1
        return False

    for anchor_pos in range(step):
        if rec(0, anchor_pos):
            return make_certificate(H, ELL_CYCLE, vertices=order, ell=ell)
    return None


# -- structure enumeration and exact containment ---------------------------------

def _perfect_matchings(verts, k):
    if not verts:
        yield ()
        return
    v, rest = verts[0], verts[1:]
    for others in combinations(rest, k - 1):
        e = (v,) + others
        left = [u for u in rest if u not in others]
        for pm in _perfect_matchings(left, k):
            yield (e,) + pm


@lru_cache(maxsize=64)
def enumerate_copies(n: int, k: int, kind: str, ell: int | None = None) -> np.ndarray:
    """Every copy of a structure in the complete k-graph on [n].

    Rows list colex slot indices, one per structure edge (sorted).  ``kind``
    is ``triangle``, ``perfect-matching``, ``hamilton-cycle`` or
    ``hamilton-ell-cycle`` (with ``ell``).
    """
    copies = set()
    if kind == "triangle":
        if k != 2:
            raise ValueError("triangle family is for graphs")
        for a, b, c in combinations(range(n), 3):
            copies.add(((a, b), (a, c), (b, c)))
    elif kind == PERFECT_MATCHING:
        if n % k:
            raise ModelError(f"n not divisible by k (n={n}, k={k})")
        copies.update(_perfect_matchings(list(range(n)), k))
    elif kind == HAMILTON_CYCLE:
        if k != 2 or n < 3:
            raise ValueError("Hamilton cycles need k = 2, n >= 3")
        if n > 10:
            raise ValueError("refusing to enumerate Hamilton cycles for n > 10")
        for row in _cycle_orders(n).tolist():
            copies.add(tuple(tuple(sorted((row[i], row[(i + 1) % n]))) for i in range(n)))
    elif kind == ELL_CYCLE:
        step = k - ell
        ham_ell_edge_count(n, k, ell)
        if n > 9:
            raise ValueError("refusing to enumerate ell-cycles for n > 9")
        mm = n // step
        rows = (perm[:a] + (0,) + perm[a:]
                for perm in permutations(range(1, n)) for a in range(step))
        for row in rows:
            es = [tuple(sorted(row[(j * step + t) % n] for t in range(k))) for j in range(mm)]
            if _is_ell_cycle(es, ell):
                copies.add(tuple(sorted(es)))
    else:
        raise ValueError(f"unknown structure kind {kind!r}")
    rows = sorted(tuple(sorted(colex_rank(e) for e in cp)) for cp in copies)
    m = len(rows[0]) if rows else 0
    out = np.array(rows, dtype=np.int64).reshape(-1, m)
    out.setflags(write=False)
    return out


EXACT_SLOT_LIMIT = 24


def containment_counts(n: int, k: int, kind: str, ell: int | None = None) -> np.ndarray:
    """counts[j]: number of j-edge subsets of K^k_n containing a copy."""
    N = math.comb(n, k)
    if N > EXACT_SLOT_LIMIT:
        raise ValueError(f"exact enumeration refused: C(n,k) = {N} > {EXACT_SLOT_LIMIT}")
    copies = enumerate_copies(n, k, kind, ell)
    masks = np.array([sum(1 << int(i) for i in row) for row in copies], dtype=np.uint64)
    if masks.size == 0:
        return np.zeros(N + 1, dtype=np.int64)
    # smaller masks first so the kernel's early exit fires sooner
    masks = masks[np.argsort(np.bitwise_count(masks), kind="stable")]
    return kernels.subset_hits_by_size(masks, N)


def exact_containment_probability(params: ModelParams, kind: str, ell: int | None = None) -> float:
    """Pr[H^k(n, p) contains a copy of the structure], by full enumeration."""
    counts = containment_counts(params.n, params.k, kind, ell)
    N = counts.size - 1
    p = params.p
    j = np.arange(N + 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = counts * np.power(p, j) * np.power(1.0 - p, N - j)
    return float(np.nansum(terms))
