"""End-to-end construction of a rainbow Hamilton cycle in a coloured graph."""
from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import asdict, dataclass, field, fields

from ..core import ColoredHypergraph, ModelParams, generate
from ..verify import HAMILTON_CYCLE, check_certificate, make_certificate, small_set
from ._common import STAGES, Failure, edge_key
from .boosters import booster_close
from .expander import rainbow_expander
from .longpath import rainbow_long_path
from .matching import star_matching
from .partition import Windows, palette_of, partition


@dataclass(frozen=True)
class PipelineConfig:
    """Tunable constants; every slack factor is recorded in the trace."""
    delta: float = 0.05
    alpha: float = 0.3
    partition_retries: int = 50
    slack: float = 0.5
    window_low: float = 0.5
    window_high: float = 2.0
    color_load: float = 100.0
    D: int = 9
    D_min: int = 2
    matching_load: float = 1.0
    path_restarts: int = 8
    path_attempts: int = 6
    expander_d: int = 5
    expander_beta: float = 0.05
    expander_required: float = 2.0
    expander_retries: int = 50
    expander_budget: int = 10**5
    expander_samples: int = 2000

    @classmethod
    def from_text(cls, text: str) -> "PipelineConfig":
        """Parse ``key = value`` lines; ``#`` starts a comment."""
        types = {f.name: f.type for f in fields(cls)}
        kw = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"config line {lineno}: expected key = value")
            key, val = (s.strip() for s in line.split("=", 1))
            if key not in types:
                raise ValueError(f"config line {lineno}: unknown key {key!r}")
            kw[key] = int(val) if types[key] in (int, "int") else float(val)
        return cls(**kw)

    def to_text(self) -> str:
        return "".join(f"{k} = {v}\n" for k, v in asdict(self).items())

    @property
    def windows(self) -> Windows:
        return Windows(self.slack, self.window_low, self.window_high, self.color_load)


@dataclass
class PipelineTrace:
    stage: str = "partition"
    stats: dict = field(default_factory=dict)
    reason: str | None = None
    config: dict = field(default_factory=dict)

    def advance(self, stage: str):
        assert STAGES.index(stage) > STAGES.index(self.stage), "stages out of order"
        self.stage = stage

    def fail(self, failure: Failure):
        self.reason = failure.reason
        self.stats[f"{self.stage}_failure"] = failure.detail
        return failure

    def to_dict(self):
        return {"stage": self.stage, "reason": self.reason, "stats": self.stats,
                "config": self.config}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, default=_plain)


def _plain(o):
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    if hasattr(o, "item"):
        return o.item()
    raise TypeError(type(o).__name__)


def _small_pairs(G: ColoredHypergraph, small, pairs: int):
    """Pick ``pairs`` neighbours A(v) per SMALL vertex, disjoint and rainbow."""
    taken = set(small)
    colors = set()
    A, E0 = {}, []
    for v in sorted(small):
        picks = []
        for u in G.adj[v]:
            col = G.edge_color((v, u))
            if u in taken or col in colors:
                continue
            picks.append(u)
            colors.add(col)
            if len(picks) == pairs:
                break
        if len(picks) < pairs:
            return Failure("partition", "SMALL vertex without disjoint rainbow neighbour pair",
                           {"vertex": v, "degree": len(G.adj[v])})
        A[v] = tuple(picks)
        taken.update(picks)
        E0.extend(edge_key(v, u) for u in picks)
    return A, E0, colors


def run_pipeline_on(G: ColoredHypergraph, config: PipelineConfig | None = None, seed: int = 0):
    """Run every construction stage on ``G``; returns (certificate | Failure, trace)."""
    cfg = config or PipelineConfig()
    G._require_graph()
    n = G.n
    trace = PipelineTrace(config=asdict(cfg))
    S_ = trace.stats

    palette = palette_of(G)
    if len(palette) < n:
        return trace.fail(Failure("partition", "fewer colours than cycle edges",
                                  {"colors": int(len(palette)), "n": n})), trace
    small = small_set(G, cfg.delta)
    got = _small_pairs(G, small, 2)
    if isinstance(got, Failure):
        return trace.fail(got), trace
    A, E0, c_small = got
    V0 = set(small) | {u for pr in A.values() for u in pr}
    S_["small"] = len(small)

    plan = partition(G, cfg.alpha, cfg.delta, cfg.partition_retries, seed=seed,
                     exclude=V0, c_small=c_small, windows=cfg.windows)
    if isinstance(plan, Failure):
        return trace.fail(plan), trace
    W, C0, C1 = plan.W, plan.C0, plan.C1
    S_["partition"] = dict(plan.stats, attempts=plan.attempts)
    c_star = set(palette.tolist()) - c_small

    trace.advance("long-path")
    eligible = n - len(V0) - len(W)
    if eligible < 2:
        return trace.fail(Failure("long-path", "path domain has fewer than two vertices",
                                  {"eligible": eligible})), trace
    # ends with many C1-edges into W make the star matching easier
    c1w = Counter()
    for (a, b), col in zip(G.edges.tolist(), G.colors.tolist()):
        if col in C1:
            if b in W:
                c1w[a] += 1
            if a in W:
                c1w[b] += 1
    # a path whose ends cannot be star-matched is redrawn; D only drops
    # below its configured value when no redraw succeeds
    for D in range(cfg.D, min(cfg.D, cfg.D_min) - 1, -1):
        spare = int(cfg.matching_load * len(W) / D) - 2
        deficit = max(0, min(int(n / math.log(n) ** 0.4), spare))
        for attempt in range(max(1, cfg.path_attempts)):
            # leftovers cost D reservoir vertices each: try to cover everything first
            for target in sorted({0, deficit}):
                P = rainbow_long_path(G, c_star - C0 - C1, V0 | W, target, seed=seed,
                                      restarts=cfg.path_restarts, end_score=c1w.__getitem__,
                                      end_goal=D + 2, round=attempt)
                if not isinstance(P, Failure):
                    break
            if isinstance(P, Failure):
                break
            path = list(P.path)
            x, y = path[0], path[-1]
            on_path = set(path)
            S = {v for v in range(n) if v not in on_path and v not in V0 and v not in W} | {x, y}
            M = star_matching(G, S, W, C1, D)
            if not isinstance(M, Failure):
                break
        if isinstance(P, Failure) or not isinstance(M, Failure):
            break
    S_["path_attempts"] = attempt + 1
    if isinstance(P, Failure):
        return trace.fail(P), trace
    S_["path_length"] = len(path)
    S_["target_deficit"] = deficit

    trace.advance("star-matching")
    if isinstance(M, Failure):
        return trace.fail(M), trace
    xp, yp = M.neighbors(x)[0], M.neighbors(y)[0]
    M_prime = [e for e in M.edges if x not in e and y not in e]
    S_["matching"] = {"S": len(S), "D": D, "edges": len(M.edges)}

    trace.advance("expander")
    k_bound = max(1, int(cfg.expander_beta * len(W)))
    R = rainbow_expander(G, W, C0, cfg.expander_d, k_bound, d_required=cfg.expander_required,
                         retries=cfg.expander_retries, seed=seed, budget=cfg.expander_budget,
                         samples=cfg.expander_samples)
    if isinstance(R, Failure):
        return trace.fail(R), trace
    S_["expander_edges"] = R.m
    S_["expander_k"] = k_bound

    trace.advance("boosters")
    g1_edges = list(M_prime) + list(E0) + R.edge_tuples()
    g1_cols = [G.edge_color(e) for e in g1_edges]
    assert len(set(g1_cols)) == len(g1_cols), "colour repeated while assembling G1"
    assert not set(g1_cols) & set(P.colors), "G1 reuses a path colour"
    G1 = ColoredHypergraph(n, 2, G.c, g1_edges, g1_cols) if g1_edges else G.select([False] * G.m)
    V1 = set(range(n)) - on_path
    avail = c_star - C0 - C1 - set(P.colors)
    bst = {}
    cert = booster_close(G, G1, xp, yp, avail, vertices=V1, stats=bst)
    S_["booster_iterations"] = bst.get("iterations", 0)
    S_["available_colors"] = list(bst.get("available", []))
    if isinstance(cert, Failure):
        return trace.fail(cert), trace

    order = path + list(cert.vertices)[::-1]
    final = make_certificate(G, HAMILTON_CYCLE, vertices=order)
    verdict = check_certificate(G, final)
    assert verdict, f"assembled cycle failed verification: {verdict.reason}"
    trace.advance("done")
    return final, trace


def run_pipeline(params: ModelParams, config: PipelineConfig | None = None):
    """Draw G from the model and run the construction on it."""
    if params.k != 2:
        raise ValueError("the construction is defined for graphs (k = 2)")
    return run_pipeline_on(generate(params), config, params.seed)
