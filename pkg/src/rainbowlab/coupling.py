"""Interpolating between uncoloured and coloured random hypergraphs.

Slots e_1..e_N (colex order) are exposed one at a time.  In the hybrid
Gamma_i the first i slots are present with probability q and carry one
uniform colour, the rest are present with probability p and carry every
colour.  Gamma_0 is the uncoloured model, Gamma_N the coloured one at q.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from functools import cached_property
from itertools import product

import numpy as np
from scipy.stats import chi2, chi2_contingency

from . import kernels
from .core import (ColoredHypergraph, ModelError, ModelParams, all_edges, coupled_q,
                   draw_slots, ham_ell_edge_count, stream)
from .oracle import (EXACT_SLOT_LIMIT, enumerate_copies, exact_containment_probability,
                     find_rainbow_ell_cycle, find_rainbow_hamilton_cycle,
                     rainbow_perfect_matching)
from .stats import mean_ci, wilson
from .verify import ELL_CYCLE, HAMILTON_CYCLE, PERFECT_MATCHING

MULTI = -1  # colour code of an edge carrying every colour

# copies are enumerated for the batch kernel up to this many
COPY_LIMIT = 200_000


class RichnessError(ValueError):
    """The claimed richness exceeds what recolouring members shows."""


# -- hybrid states -----------------------------------------------------------------

@dataclass(frozen=True)
class HybridState:
    n: int
    k: int
    c: int
    i: int
    present: np.ndarray
    colors: np.ndarray  # MULTI on slots > i

    @property
    def colored_part(self):
        idx = np.flatnonzero(self.present[:self.i])
        edges = all_edges(self.n, self.k)
        return [(tuple(edges[j].tolist()), int(self.colors[j])) for j in idx]

    @property
    def multi_part(self):
        idx = self.i + np.flatnonzero(self.present[self.i:])
        edges = all_edges(self.n, self.k)
        return [tuple(edges[j].tolist()) for j in idx]


def hybrid_arrays(params: ModelParams, q: float, i: int, trials: int = 1, *, tag: str = "model"):
    """Batch of hybrids: (present, colors) with MULTI beyond slot i.

    The uniforms are those of :func:`rainbowlab.core.generate_arrays`, so at
    i = N and the same seed the draw coincides with the coloured model at q.
    """
    N = params.num_slots
    if not 0 <= i <= N:
        raise ValueError(f"need 0 <= i <= N = {N}")
    if not 0 <= q <= 1:
        raise ValueError("q must lie in [0, 1]")
    u, col = draw_slots(params, trials, tag)
    thr = np.where(np.arange(N) < i, q, params.p)
    present = u < thr
    colors = col.copy()
    colors[:, i:] = MULTI
    return present, colors


def sample_hybrid(params: ModelParams, q: float, i: int) -> HybridState:
    present, colors = hybrid_arrays(params, q, i, 1)
    return HybridState(params.n, params.k, params.c, i, present[0], colors[0])


# -- families ----------------------------------------------------------------------

_KINDS = {
    "triangle": "triangle",
    "rainbow-pm": PERFECT_MATCHING,
    "rainbow-hc": HAMILTON_CYCLE,
    "rainbow-ell-cycle": ELL_CYCLE,
}


def _canonical(n, k, kind, overlap):
    """Edges of one fixed copy; its images under vertex permutations are all copies."""
    if kind == "triangle":
        return [(0, 1), (0, 2), (1, 2)]
    if kind == PERFECT_MATCHING:
        return [tuple(range(j, j + k)) for j in range(0, n, k)]
    if kind == HAMILTON_CYCLE:
        return [tuple(sorted((j, (j + 1) % n))) for j in range(n)]
    step = k - overlap
    return [tuple(sorted((j * step + t) % n for t in range(k))) for j in range(n // step)]


@dataclass(frozen=True)
class RichFamily:
    """Coloured hypergraphs that contain a rainbow copy of a fixed structure.

    ``richness`` is the claimed number of colours each member edge can take
    while staying in the family; ``overlap`` is the ell of ell-cycles.
    """
    name: str
    n: int
    k: int
    c: int
    richness: int
    overlap: int | None = None

    @property
    def kind(self) -> str:
        return _KINDS[self.name]

    @cached_property
    def m(self) -> int:
        """Edges per member."""
        return len(_canonical(self.n, self.k, self.kind, self.overlap))

    @cached_property
    def copies(self):
        """Slot-index table of all copies, or None when too many to list."""
        kind, n = self.kind, self.n
        too_big = ((kind == HAMILTON_CYCLE and n > 10) or (kind == ELL_CYCLE and n > 9)
                   or (kind == PERFECT_MATCHING and math.comb(n, self.k) > 200))
        if too_big:
            return None
        rows = enumerate_copies(n, self.k, kind, self.overlap)
        return rows if rows.shape[0] <= COPY_LIMIT else None

    def _contains_colored(self, H: ColoredHypergraph) -> bool:
        kind = self.kind
        if kind == "triangle":
            cm = H.color_matrix
            for a, b in H.edges.tolist():
                cab = cm[a, b]
                for w in H.adj_sets[a] & H.adj_sets[b]:
                    if len({cab, cm[a, w], cm[b, w]}) == 3:
                        return True
            return False
        if kind == HAMILTON_CYCLE:
            return find_rainbow_hamilton_cycle(H) is not None
        if kind == PERFECT_MATCHING:
            return rainbow_perfect_matching(H) is not None
        return find_rainbow_ell_cycle(H, self.overlap) is not None

    def contains(self, H: ColoredHypergraph) -> bool:
        """Does H contain a rainbow copy?"""
        if self.copies is not None:
            present = H.slot_mask[None, :]
            colors = np.full((1, present.shape[1]), 0, dtype=np.int32)
            colors[0, H.ranks] = H.colors
            return bool(kernels.batch_contains(present, colors, self.copies, H.c)[0])
        return self._contains_colored(H)

    def contains_uncolored(self, present) -> bool:
        """Does the slot mask contain a copy at all (colours ignored)?"""
        return bool(self.contains_batch(np.asarray(present, dtype=bool)[None, :],
                                        np.full((1, len(present)), MULTI, dtype=np.int32),
                                        c=self.m)[0])

    def contains_batch(self, present, colors, c: int | None = None) -> np.ndarray:
        """Row-wise containment; MULTI entries may take any colour."""
        c = self.c if c is None else c
        present = np.ascontiguousarray(present, dtype=np.bool_)
        colors = np.ascontiguousarray(colors, dtype=np.int32)
        if self.copies is not None:
            return kernels.batch_contains(present, colors, self.copies, c)
        out = np.zeros(present.shape[0], dtype=bool)
        if c < self.m:
            return out
        edges = all_edges(self.n, self.k)
        for t in range(present.shape[0]):
            idx = np.flatnonzero(present[t])
            cols = colors[t, idx].astype(np.int64)
            multi = cols == MULTI
            # every MULTI edge gets a private fresh colour; see hybrid_contains
            cols[multi] = c + np.arange(multi.sum())
            H = ColoredHypergraph(self.n, self.k, c + int(multi.sum()), edges[idx], cols,
                                  validate=False)
            out[t] = self._contains_colored(H)
        return out

    def sample_member(self, rng) -> ColoredHypergraph:
        """Uniform copy with a uniform rainbow colouring."""
        perm = rng.permutation(self.n)
        edges = np.array([[perm[v] for v in e] for e in _canonical(self.n, self.k, self.kind,
                                                                     self.overlap)])
        cols = rng.choice(self.c, size=len(edges), replace=False)
        return ColoredHypergraph(self.n, self.k, self.c, edges, cols)


def family(name: str, n: int, k: int, c: int, *, overlap: int | None = None,
           richness: int | None = None) -> RichFamily:
    """Shipped family by name; richness defaults to c - m + 1."""
    if name not in _KINDS:
        raise ValueError(f"unknown family {name!r}; choose from {sorted(_KINDS)}")
    kind = _KINDS[name]
    if kind == ELL_CYCLE:
        if overlap is None:
            raise ValueError("ell-cycle family needs overlap")
        ham_ell_edge_count(n, k, overlap)
    if kind == PERFECT_MATCHING and n % k:
        raise ModelError(f"n not divisible by k (n={n}, k={k})")
    if kind in ("triangle", HAMILTON_CYCLE) and k != 2:
        raise ValueError(f"{name} family is for graphs (k = 2)")
    fam = RichFamily(name, n, k, c, 0, overlap)
    default = c - fam.m + 1
    return RichFamily(name, n, k, c, default if richness is None else int(richness), overlap)


# -- hybrid containment ------------------------------------------------------------

GENERIC_LIMIT = 10**6


def hybrid_contains(state: HybridState, fam: RichFamily, *, generic: bool = False) -> bool:
    """Can the MULTI edges be coloured so the result lies in the family?

    A copy needs its fixed colours distinct and enough spare colours for its
    MULTI edges; that happens exactly when c >= m and the graph with a fresh
    private colour on every MULTI edge has a rainbow copy.  ``generic``
    instead tries every colour assignment (refused above GENERIC_LIMIT).
    """
    if (fam.n, fam.k, fam.c) != (state.n, state.k, state.c):
        raise ValueError("family does not match the state's (n, k, c)")
    if not generic:
        return bool(fam.contains_batch(state.present[None, :], state.colors[None, :])[0])
    multi = np.flatnonzero(state.present & (state.colors == MULTI))
    if state.c ** len(multi) > GENERIC_LIMIT:
        raise ValueError(f"generic colour enumeration refused: {state.c}^{len(multi)} assignments")
    present = state.present[None, :]
    for assign in product(range(state.c), repeat=len(multi)):
        cols = state.colors.copy()
        cols[multi] = assign
        if fam.contains_batch(present, cols[None, :])[0]:
            return True
    return False


# -- richness ----------------------------------------------------------------------

@dataclass
class RichnessReport:
    claimed: int
    measured: int
    members: int
    counts: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.measured >= self.claimed


def spot_check_richness(fam: RichFamily, members: int = 100, seed: int = 0) -> RichnessReport:
    """For sampled members and each member edge, count the colours that keep
    the recoloured member in the family; report the minimum over all."""
    rng = stream(seed, f"richness/{fam.name}")
    tally = {}
    low = None
    for _ in range(members):
        C = fam.sample_member(rng)
        for j in range(C.m):
            good = 0
            for x in range(fam.c):
                cols = C.colors.copy()
                cols[j] = x
                if fam.contains(ColoredHypergraph(C.n, C.k, C.c, C.edges, cols, validate=False)):
                    good += 1
            tally[good] = tally.get(good, 0) + 1
            low = good if low is None else min(low, good)
    return RichnessReport(fam.richness, int(low if low is not None else 0), members,
                          dict(sorted(tally.items())))


# -- dominance ---------------------------------------------------------------------

@dataclass
class DominanceReport:
    family: str
    n: int
    k: int
    c: int
    p: float
    q: float
    richness: int
    lhs: float
    lhs_lo: float
    lhs_hi: float
    lhs_method: str
    rhs: float
    rhs_lo: float
    rhs_hi: float
    trials: int
    confidence: float

    @property
    def consistent(self) -> bool:
        return self.lhs <= self.rhs_hi

    @property
    def violation(self) -> bool:
        return self.lhs_lo > self.rhs_hi

    def to_dict(self):
        d = asdict(self)
        d.update(consistent=self.consistent, violation=self.violation)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _mc_rate(fam, params, prob, trials, tag, colored, chunk=20_000):
    hits = 0
    done = 0
    p = params.replace(p=prob)
    # one draw of all trials keeps the result independent of chunking
    u, col = draw_slots(p, trials, tag)
    while done < trials:
        sl = slice(done, min(trials, done + chunk))
        present = u[sl] < prob
        colors = col[sl] if colored else np.full_like(col[sl], MULTI)
        hits += int(fam.contains_batch(present, colors, None if colored else fam.m).sum())
        done = sl.stop
    return hits


def check_dominance(params: ModelParams, fam: RichFamily, trials: int = 10**5, *,
                    confidence: float = 0.99, members: int = 100) -> DominanceReport:
    """Compare Pr[uncoloured model at p has a copy] with Pr[coloured model at q
    has a rainbow copy], q = c p / richness with richness re-measured."""
    if (params.n, params.k, params.c) != (fam.n, fam.k, fam.c):
        raise ValueError("family does not match params")
    rich = spot_check_richness(fam, members, params.seed)
    if not rich.ok:
        raise RichnessError(f"claimed richness {fam.richness} but recolouring shows "
                            f"only {rich.measured}")
    q = coupled_q(params.c, params.p, rich.measured)
    if params.num_slots <= EXACT_SLOT_LIMIT and fam.copies is not None:
        lhs = exact_containment_probability(params, fam.kind, fam.overlap)
        lhs_lo = lhs_hi = lhs
        method = "exact"
    else:
        hits = _mc_rate(fam, params, params.p, trials, "dominance/lhs", colored=False)
        lhs = hits / trials
        lhs_lo, lhs_hi = wilson(hits, trials, confidence)
        method = "monte-carlo"
    hits = _mc_rate(fam, params, q, trials, "dominance/rhs", colored=True)
    rhs_lo, rhs_hi = wilson(hits, trials, confidence)
    return DominanceReport(fam.name, params.n, params.k, params.c, params.p, q, rich.measured,
                           lhs, lhs_lo, lhs_hi, method, hits / trials, rhs_lo, rhs_hi, trials,
                           confidence)


# -- one step of the interpolation ------------------------------------------------

@dataclass
class StepReport:
    i: int
    q: float
    p_prev: float
    p_next: float
    diff: float
    diff_lo: float
    diff_hi: float
    trials: int
    method: str
    conditional_ok: bool | None = None

    def to_dict(self):
        return asdict(self)


def _exact_hybrid(fam, params, q, i, slot_override=None):
    """Exact Pr[Gamma_i has a member] by enumerating presence and colours.

    ``slot_override`` = (j, present_prob, multi) replaces slot j's law.
    Returns the probability and, per configuration of the other slots, the
    conditional probability (used for the conditional comparison).
    """
    N = params.num_slots
    c = params.c
    total = 0.0
    cond = {}
    probs = [q if j < i else params.p for j in range(N)]
    multi = [j >= i for j in range(N)]
    if slot_override is not None:
        j0, pr, mu = slot_override
        probs[j0], multi[j0] = pr, mu
    for mask in range(1 << N):
        present = np.array([(mask >> j) & 1 for j in range(N)], dtype=bool)
        w = 1.0
        for j in range(N):
            w *= probs[j] if present[j] else 1 - probs[j]
        if w == 0:
            continue
        single = [j for j in range(N) if present[j] and not multi[j]]
        for assign in product(range(c), repeat=len(single)):
            cols = np.full(N, MULTI, dtype=np.int32)
            cols[single] = assign
            hit = bool(fam.contains_batch(present[None, :], cols[None, :])[0])
            wt = w / c ** len(single)
            total += wt * hit
            if slot_override is not None:
                j0 = slot_override[0]
                key = (mask & ~(1 << j0), tuple(int(cols[j]) for j in single if j != j0))
                num, den = cond.get(key, (0.0, 0.0))
                cond[key] = (num + wt * hit, den + wt)
    return total, cond


def stepwise_monotonicity(params: ModelParams, fam: RichFamily, i: int, trials: int = 10**5, *,
                          q: float | None = None, confidence: float = 0.99,
                          exact: bool | None = None) -> StepReport:
    """Pr[Gamma_i has a member] - Pr[Gamma_{i-1} has a member].

    Monte Carlo pairs the two hybrids on common uniforms, differing only in
    slot i.  ``exact`` (default: when C(n, k) <= 6) enumerates everything and
    also compares the two conditional probabilities for every configuration
    of the other slots.
    """
    N = params.num_slots
    if not 1 <= i <= N:
        raise ValueError(f"need 1 <= i <= N = {N}")
    if q is None:
        q = coupled_q(params.c, params.p, fam.richness)
    if exact is None:
        exact = N <= 6
    if exact:
        j = i - 1
        p_next, cn = _exact_hybrid(fam, params, q, i - 1, (j, q, False))
        p_prev, cp = _exact_hybrid(fam, params, q, i - 1, (j, params.p, True))
        ok = True
        for key in set(cn) | set(cp):
            a = cn.get(key, (0.0, 0.0))
            b = cp.get(key, (0.0, 0.0))
            if a[1] > 0 and b[1] > 0 and a[0] / a[1] < b[0] / b[1] - 1e-12:
                ok = False
                break
        d = p_next - p_prev
        return StepReport(i, q, p_prev, p_next, d, d, d, 0, "exact", ok)
    pn, cn = hybrid_arrays(params, q, i, trials, tag="step")
    pp, cp = hybrid_arrays(params, q, i - 1, trials, tag="step")
    a = fam.contains_batch(pn, cn).astype(float)
    b = fam.contains_batch(pp, cp).astype(float)
    mean, lo, hi = mean_ci(a - b, confidence)
    return StepReport(i, q, float(b.mean()), float(a.mean()), mean, lo, hi, trials, "paired")


# -- endpoint consistency ----------------------------------------------------------

def endpoint_consistency(params: ModelParams, q: float, samples: int = 10**5, *,
                         seed_offset: int = 1_000_003):
    """Chi-square comparison of Gamma_N with the coloured model at q.

    The two sides use different seeds.  Returns p-values for the summed
    per-slot (absent, colour 0..c-1) tables and for the edge-count law.
    """
    N = params.num_slots
    pa, ca = hybrid_arrays(params, q, N, samples)
    other = params.replace(p=q, seed=params.seed + seed_offset)
    u, cb = draw_slots(other, samples)
    pb = u < q
    cat_a = np.where(pa, ca + 1, 0)
    cat_b = np.where(pb, cb + 1, 0)
    stat, dof = 0.0, 0
    for j in range(N):
        table = np.vstack([np.bincount(cat_a[:, j], minlength=params.c + 1),
                           np.bincount(cat_b[:, j], minlength=params.c + 1)])
        table = table[:, table.sum(axis=0) > 0]
        if table.shape[1] < 2:
            continue
        s, _, d, _ = chi2_contingency(table, correction=False)
        stat += s
        dof += d
    p_cells = float(chi2.sf(stat, dof)) if dof else 1.0
    na, nb = pa.sum(axis=1), pb.sum(axis=1)
    table = np.vstack([np.bincount(na, minlength=N + 1), np.bincount(nb, minlength=N + 1)])
    table = table[:, table.sum(axis=0) >= 1]
    _, p_count, _, _ = chi2_contingency(table, correction=False)
    return {"p_cells": p_cells, "p_edge_count": float(p_count), "dof": dof}
