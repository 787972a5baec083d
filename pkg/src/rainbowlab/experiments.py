"""Threshold sweeps, greedy packing and rich-family dominance runs."""
from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .core import ColoredHypergraph, ModelError, ModelParams, generate, ham_ell_edge_count, threshold_p
from .coupling import DominanceReport, check_dominance, family
from .oracle import (BudgetExhausted, SearchBudget, _cycle_orders,
                     find_rainbow_hamilton_cycle)
from .pipeline import run_pipeline_on
from .stats import binomial_tail, wilson  # noqa: F401  (re-exported)
from .verify import HAMILTON_CYCLE, check_certificate, make_certificate

METHODS = ("oracle", "pipeline", "both")
ORACLE_MAX_N = 24
SWEEP_COLUMNS = ("n", "p", "c", "method", "trials", "successes", "wilson_lo", "wilson_hi",
                 "mean_runtime_ms", "heuristic_miss", "true_absence", "undecided")


@dataclass(frozen=True)
class SweepSpec:
    """Grid of cells (n, p, c).

    p comes from ``ps`` if given, else from the offsets ``xs`` via
    p = (ln n + ln ln n + x)/n.  c comes from ``cs`` if given, else from
    c = ceil((1 + eps) n) for each eps.
    """
    ns: tuple
    trials: int
    method: str = "oracle"
    xs: tuple = ()
    ps: tuple = ()
    eps: tuple = ()
    cs: tuple = ()
    seed: int = 0
    node_limit: int = 10**7

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        if not self.ns:
            raise ValueError("at least one n is required")
        if bool(self.xs) == bool(self.ps):
            raise ValueError("give exactly one of xs (threshold offsets) or ps")
        if bool(self.eps) == bool(self.cs):
            raise ValueError("give exactly one of eps or cs")
        if self.method != "pipeline" and max(self.ns) > ORACLE_MAX_N:
            raise ValueError(f"oracle method needs n <= {ORACLE_MAX_N}")

    def cells(self):
        for n in self.ns:
            ps = self.ps or tuple(threshold_p(n, x) for x in self.xs)
            cs = self.cs or tuple(ceil_colors(e, n) for e in self.eps)
            for p in ps:
                for c in cs:
                    yield int(n), float(p), int(c)

    def to_dict(self):
        return {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(self).items()}


def ceil_colors(eps: float, m: int) -> int:
    """ceil((1 + eps) m), immune to float noise such as 1.1 * 10 = 11.000000000000002."""
    return math.ceil(round((1 + eps) * m, 9))


@dataclass
class CellResult:
    n: int
    p: float
    c: int
    method: str
    trials: int
    successes: int
    wilson_lo: float
    wilson_hi: float
    mean_runtime_ms: float | None
    heuristic_miss: int = 0
    true_absence: int = 0
    undecided: int = 0

    def row(self, timings: bool):
        d = asdict(self)
        d["mean_runtime_ms"] = f"{self.mean_runtime_ms:.3f}" if timings else ""
        d["p"] = repr(self.p)
        d["wilson_lo"] = f"{self.wilson_lo:.6f}"
        d["wilson_hi"] = f"{self.wilson_hi:.6f}"
        return [d[k] for k in SWEEP_COLUMNS]

    @property
    def rate(self) -> float:
        return self.successes / self.trials


def _oracle(G, node_limit):
    """(found, certificate or None); found is None when undecided."""
    try:
        cert = find_rainbow_hamilton_cycle(G, SearchBudget(node_limit=node_limit))
    except BudgetExhausted:
        return None, None
    return cert is not None, cert


def _trial(job):
    """One seed of one cell: returns outcome label and runtime."""
    n, p, c, method, seed, node_limit = job
    t0 = time.perf_counter()
    G = generate(ModelParams(n, 2, p, c, seed))
    if method == "oracle":
        found, cert = _oracle(G, node_limit)
        label = "undecided" if found is None else ("success" if found else "absent")
    else:
        cert, _ = run_pipeline_on(G, seed=seed)
        if cert:
            label = "success"
        elif method == "both" or n <= ORACLE_MAX_N:
            found, _ = _oracle(G, node_limit)
            label = {None: "undecided", True: "heuristic-miss", False: "absent"}[found]
            cert = None
        else:
            label = "failure"
    if cert:
        # every success is re-verified before it is counted
        assert check_certificate(G, cert), "sweep certificate failed verification"
    return label, (time.perf_counter() - t0) * 1e3


def threshold_sweep(spec: SweepSpec, *, workers: int = 1, confidence: float = 0.99):
    """Empirical Pr[rainbow Hamilton cycle] per cell.

    Trial t of every cell uses seed ``spec.seed + t``, so cells are coupled
    through their presence uniforms.  Results do not depend on ``workers``.
    """
    cells = list(spec.cells())
    jobs = [(n, p, c, spec.method, spec.seed + t, spec.node_limit)
            for n, p, c in cells for t in range(spec.trials)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            out = list(ex.map(_trial, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        out = [_trial(j) for j in jobs]
    results = []
    for i, (n, p, c) in enumerate(cells):
        chunk = out[i * spec.trials:(i + 1) * spec.trials]
        labels = [lab for lab, _ in chunk]
        s = labels.count("success")
        lo, hi = wilson(s, spec.trials, confidence)
        results.append(CellResult(n, p, c, spec.method, spec.trials, s, lo, hi,
                                  float(np.mean([ms for _, ms in chunk])),
                                  labels.count("heuristic-miss"), labels.count("absent"),
                                  labels.count("undecided")))
    return results


def sweep_csv(results, *, timings: bool = False) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for r in results:
        w.writerow(r.row(timings))
    return buf.getvalue()


# -- packing -----------------------------------------------------------------------

@dataclass
class PackingReport:
    cycles: int
    target: float
    certificates: list = field(default_factory=list)
    method: str = "oracle"

    def to_dict(self):
        return {"cycles": self.cycles, "target": self.target, "method": self.method,
                "certificates": [c.to_dict() for c in self.certificates]}


LOOKAHEAD_MAX_N = 9


def _all_rainbow_cycles(G):
    """Every rainbow Hamilton cycle of a small graph, as vertex rows."""
    orders = _cycle_orders(G.n)
    cm = np.asarray(G.color_matrix)
    cols = cm[orders, np.roll(orders, -1, axis=1)]
    ok = (cols >= 0).all(axis=1)
    srt = np.sort(cols, axis=1)
    ok &= (np.diff(srt, axis=1) != 0).all(axis=1)
    return orders[ok]


def _next_cycle(G, method, seed, node_limit):
    if method == "pipeline":
        cert, _ = run_pipeline_on(G, seed=seed)
        return cert if cert else None
    if G.n <= LOOKAHEAD_MAX_N:
        # one step of lookahead: prefer a cycle that leaves another behind
        rows = _all_rainbow_cycles(G)
        for row in rows.tolist():
            cert = make_certificate(G, HAMILTON_CYCLE, vertices=row)
            rest = G.without_edges(cert.structure_edges())
            if _all_rainbow_cycles(rest).shape[0]:
                return cert
        if rows.shape[0]:
            return make_certificate(G, HAMILTON_CYCLE, vertices=rows[0].tolist())
        return None
    found, cert = _oracle(G, node_limit)
    return cert if found else None


def packing_extract(G: ColoredHypergraph, eps: float = 0.1, *, p: float | None = None,
                    method: str | None = None, seed: int = 0,
                    node_limit: int = 10**7) -> PackingReport:
    """Greedily remove rainbow Hamilton cycles until none is found.

    ``p`` defaults to the edge density of G; the target is (1 - eps) n p / 2.
    """
    G._require_graph()
    n = G.n
    if p is None:
        p = G.m / math.comb(n, 2) if n >= 2 else 0.0
    target = (1 - eps) * n * p / 2
    method = method or ("oracle" if n <= ORACLE_MAX_N else "pipeline")
    certs = []
    used = set()
    H = G
    while H.m >= n:
        cert = _next_cycle(H, method, seed + len(certs), node_limit)
        if cert is None:
            break
        assert check_certificate(G, cert), "extracted cycle failed verification"
        edges = set(cert.structure_edges())
        assert not edges & used, "extracted cycles share an edge"
        used |= edges
        certs.append(cert)
        H = H.without_edges(edges)
    return PackingReport(len(certs), target, certs, method)


# -- rich families -----------------------------------------------------------------

def rich_experiment(name: str, params: ModelParams, eps: float, *, overlap: int | None = None,
                    trials: int = 10**5, members: int = 100) -> DominanceReport:
    """Dominance run with c = ceil((1 + eps) m) colours.

    The richness is re-measured (for the shipped families it is c - m + 1,
    at least eps*m + 1) and q = c p / richness must not exceed 1.
    """
    if eps < 0:
        raise ValueError("eps must be >= 0")
    fam0 = family(name, params.n, params.k, max(params.c, 1), overlap=overlap)
    m = ham_ell_edge_count(params.n, params.k, overlap) if overlap is not None else fam0.m
    c = ceil_colors(eps, m)
    fam = family(name, params.n, params.k, c, overlap=overlap)
    if fam.richness < eps * m + 1 - 1e-9:
        raise ModelError(f"richness {fam.richness} below eps*m + 1")
    return check_dominance(params.replace(c=c), fam, trials, members=members)
