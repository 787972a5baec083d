"""Long rainbow paths by greedy extension plus Posa rotations."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from ..core import ColoredHypergraph, stream
from ._common import Failure


@dataclass(frozen=True)
class LongPath:
    path: tuple
    colors: tuple
    eligible: int

    @property
    def deficit(self) -> int:
        return self.eligible - len(self.path)


class _PathState:
    """A rainbow path with O(1) membership and colour lookups."""

    def __init__(self, cm, nbrs, rng, path, mult=None):
        self.cm = cm
        self.mult = mult
        self.nbrs = nbrs
        self.rng = rng
        self.path = list(path)
        self.pos = {v: i for i, v in enumerate(self.path)}
        self.used = {int(cm[a, b]) for a, b in zip(self.path, self.path[1:])}

    def _free(self, u):
        cm, pos, used = self.cm, self.pos, self.used
        return sum(1 for w in self.nbrs[u] if w not in pos and cm[u, w] not in used)

    def extend(self):
        """Greedy extension at the tail.

        Prefers the next vertex with the fewest onward options, then the edge
        whose colour is shared by the fewest other edges.
        """
        cm, pos, used, path, mult = self.cm, self.pos, self.used, self.path, self.mult
        while True:
            end = path[-1]
            cands = [u for u in self.nbrs[end] if u not in pos and cm[end, u] not in used]
            if not cands:
                return
            # dead ends (score 0 -> large) only when nothing else is left
            score = [(self._free(u) or len(pos) + 1, mult[cm[end, u]]) for u in cands]
            best = min(score)
            pick = [u for u, s in zip(cands, score) if s == best]
            u = pick[int(self.rng.integers(len(pick)))] if len(pick) > 1 else pick[0]
            used.add(int(cm[end, u]))
            pos[u] = len(path)
            path.append(u)

    def reverse(self):
        self.path.reverse()
        self.pos = {v: i for i, v in enumerate(self.path)}

    def rotations(self):
        """Indices i such that tail-to-path[i] is a legal rotation edge."""
        cm, path, used = self.cm, self.path, self.used
        end = path[-1]
        t = len(path) - 1
        out = []
        for u in self.nbrs[end]:
            i = self.pos.get(u)
            if i is None or i >= t - 1:
                continue
            col = int(cm[end, u])
            if col not in used or col == int(cm[path[i], path[i + 1]]):
                out.append(i)
        return out

    def rotate(self, i):
        path, cm = self.path, self.cm
        end = path[-1]
        self.used.discard(int(cm[path[i], path[i + 1]]))
        self.used.add(int(cm[end, path[i]]))
        path[i + 1:] = path[i + 1:][::-1]
        for j in range(i + 1, len(path)):
            self.pos[path[j]] = j

    def truncate(self, k):
        """Drop k tail vertices, releasing their colours."""
        for _ in range(min(k, len(self.path) - 1)):
            v = self.path.pop()
            del self.pos[v]
            self.used.discard(int(self.cm[self.path[-1], v]))

    def can_extend(self):
        end = self.path[-1]
        return any(u not in self.pos and self.cm[end, u] not in self.used for u in self.nbrs[end])


def _steer_tail(st, score, goal, limit):
    """Rotate the tail (head fixed) towards a vertex with score >= goal.

    Breadth-first over rotations, keeping the best-scoring state seen.
    """
    start = (list(st.path), set(st.used))
    best = start
    best_score = score(st.path[-1])
    seen = {st.path[-1]}
    queue = deque([start])
    while queue and best_score < goal and len(seen) < limit:
        path, used = queue.popleft()
        st.path, st.used = list(path), set(used)
        st.pos = {v: i for i, v in enumerate(st.path)}
        for i in st.rotations():
            st.path, st.used = list(path), set(used)
            st.pos = {v: i for i, v in enumerate(st.path)}
            st.rotate(i)
            t = st.path[-1]
            if t in seen:
                continue
            seen.add(t)
            state = (list(st.path), set(st.used))
            queue.append(state)
            if score(t) > best_score:
                best, best_score = state, score(t)
    st.path, st.used = list(best[0]), set(best[1])
    st.pos = {v: i for i, v in enumerate(st.path)}


def rainbow_long_path(G: ColoredHypergraph, allowed_colors=None, forbidden_vertices=(),
                      target_deficit: int = 0, *, seed: int = 0, restarts: int = 8,
                      rotation_budget: int | None = None, end_score=None, end_goal: float = 0,
                      round: int = 0):
    """Rainbow path missing at most ``target_deficit`` eligible vertices.

    Eligible vertices are those not forbidden; only edges whose colour lies in
    ``allowed_colors`` (all colours when None) are used.  Each restart grows a
    path greedily and then applies rotations at either end until it can grow
    again or the rotation budget runs out.

    With ``end_score`` the finished path is rotated at both ends, trying to
    make each end score at least ``end_goal``.
    """
    G._require_graph()
    forbidden = {int(v) for v in forbidden_vertices}
    elig = [v for v in range(G.n) if v not in forbidden]
    if not elig:
        return Failure("long-path", "no eligible vertices")
    H = G.restrict(vertices=elig, colors=allowed_colors)
    cm = np.asarray(H.color_matrix)
    nbrs = H.adj
    mult = np.bincount(H.colors, minlength=H.c) if H.m else np.zeros(H.c, dtype=np.int64)
    rng = stream(seed, f"long-path/{round}")
    need = len(elig) - int(target_deficit)
    budget = rotation_budget if rotation_budget is not None else 20 * len(elig)
    best = [elig[0]]
    best_ends = -np.inf
    order = sorted(elig, key=lambda v: (len(nbrs[v]) == 0, len(nbrs[v]), v))
    for attempt in range(max(1, restarts)):
        start = order[0] if attempt == 0 else elig[int(rng.integers(len(elig)))]
        st = _PathState(cm, nbrs, rng, [start], mult)
        st.extend()
        st.reverse()
        st.extend()
        spent = 0
        while len(st.path) < need and spent < budget:
            if len(st.path) > len(best):
                best = list(st.path)
            opts = st.rotations()
            if not opts:
                st.reverse()
                opts = st.rotations()
                if not opts:
                    # dead end at both tails: back off and regrow
                    st.truncate(int(rng.integers(1, 6)))
                    spent += 1
                    st.extend()
                    continue
            # favour a rotation whose new tail can grow straight away
            growable = []
            for i in opts:
                st.rotate(i)
                if st.can_extend():
                    growable.append(i)
                st.rotate(i)  # the inverse rotation uses the same pivot
            pool = growable or opts
            st.rotate(pool[int(rng.integers(len(pool)))])
            spent += 1
            st.extend()
            if rng.random() < 0.5:
                st.reverse()
                st.extend()
        if len(st.path) < need:
            if len(st.path) > len(best):
                best = list(st.path)
            continue
        if end_score is None:
            best = list(st.path)
            break
        # a full-length path: steer both ends, keep the best over restarts
        if len(st.path) >= 3:
            for _ in range(2):
                _steer_tail(st, end_score, end_goal, 4 * len(elig))
                st.reverse()
        val = min(end_score(st.path[0]), end_score(st.path[-1]))
        if len(best) < need or val > best_ends:
            best, best_ends = list(st.path), val
        if val >= end_goal:
            break
    cols = tuple(int(cm[a, b]) for a, b in zip(best, best[1:]))
    assert len(set(cols)) == len(cols), "long path is not rainbow"
    result = LongPath(tuple(best), cols, len(elig))
    if len(best) < need:
        return Failure("long-path", "deficit above target",
                       {"path_length": len(best), "eligible": len(elig),
                        "target_deficit": int(target_deficit)})
    return result
