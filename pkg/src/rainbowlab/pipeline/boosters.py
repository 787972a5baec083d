"""Closing a sparse rainbow graph into a Hamilton x-y path with boosters.

A virtual edge xy is kept inside every path under consideration, so a
spanning path that closes into a cycle yields a Hamilton x-y path once the
virtual edge is cut.  When rotations and extensions stall, one edge of the
host graph (a booster) is added, coloured from the pool of spare colours.
"""
from __future__ import annotations

from collections import deque

from ..core import ColoredHypergraph
from ..verify import HAMILTON_PATH, check_certificate, make_certificate
from ._common import Failure, edge_key


def _rank(a, b):
    a, b = edge_key(a, b)
    return b * (b - 1) // 2 + a


class _Closer:
    def __init__(self, adj, V1, x, y, limit):
        self.adj = adj
        self.V1 = V1
        self.x, self.y = x, y
        self.limit = limit

    def virtual(self, a, b):
        return {a, b} == {self.x, self.y}

    def extend(self, path):
        """Grow the tail greedily; returns the path (possibly unchanged)."""
        on = set(path)
        while True:
            t = path[-1]
            cands = [u for u in self.adj[t] if u not in on]
            if not cands:
                return path
            u = min(cands, key=lambda v: (sum(1 for w in self.adj[v] if w not in on) or len(on) + 1, v))
            path.append(u)
            on.add(u)

    def rotations(self, path):
        """All legal one-step rotations of ``path`` at its tail."""
        t = path[-1]
        pos = {v: i for i, v in enumerate(path)}
        out = []
        for u in sorted(self.adj[t]):
            i = pos.get(u)
            if i is None or i >= len(path) - 2 or self.virtual(path[i], path[i + 1]):
                continue
            out.append(path[:i + 1] + path[i + 1:][::-1])
        return out

    def open_cycle(self, cyc):
        """A longer path out of a non-spanning cycle through the virtual edge."""
        on = set(cyc)
        L = len(cyc)
        for j, v in enumerate(cyc):
            outside = sorted(u for u in self.adj[v] if u not in on)
            if not outside:
                continue
            u = outside[0]
            if not self.virtual(cyc[j - 1], v):
                return [u] + cyc[j:] + cyc[:j]
            if not self.virtual(v, cyc[(j + 1) % L]):
                return [u] + cyc[j::-1] + cyc[:j:-1]
        return None

    def explore(self, path):
        """Rotation BFS with the head fixed.

        Returns ("closed", cycle), ("grown", path) or ("stuck", tails) where
        ``tails`` maps each reachable tail to one path ending there.
        """
        n1 = len(self.V1)
        seen = {path[-1]: path}
        queue = deque([path])
        while queue and len(seen) <= self.limit:
            q = queue.popleft()
            t, h = q[-1], q[0]
            if len(q) >= 3 and h in self.adj[t]:
                if len(q) == n1:
                    return "closed", q
                longer = self.open_cycle(q)
                if longer is not None:
                    return "grown", longer
            if any(u not in set(q) for u in self.adj[t]):
                return "grown", q
            for r in self.rotations(q):
                if r[-1] not in seen:
                    seen[r[-1]] = r
                    queue.append(r)
        return "stuck", seen

    def improve(self, path):
        """Extend and rotate until the path closes or stalls at both ends.

        A stalled result carries, for each end held fixed, the tails that
        rotations reach from it.
        """
        path = self.extend(list(path))
        path.reverse()
        path = self.extend(path)
        while True:
            stalled = []
            for _ in range(2):
                status, out = self.explore(path)
                if status == "closed":
                    return "closed", out, None
                if status == "grown":
                    path = self.extend(list(out))
                    break
                stalled.append((path[0], out))
                path = path[::-1]
            else:
                return "stuck", path, stalled


def _components(adj, V1):
    comp, label = {}, 0
    for s in sorted(V1):
        if s in comp:
            continue
        comp[s] = label
        stack = [s]
        while stack:
            v = stack.pop()
            for u in adj[v]:
                if u not in comp:
                    comp[u] = label
                    stack.append(u)
        label += 1
    return comp, label


def _cut_virtual(cyc, x, y):
    """Hamilton x-y path from a cycle containing consecutive x, y."""
    i = cyc.index(x)
    order = cyc[i:] + cyc[:i]
    if order[1] == y:
        order = [order[0]] + order[1:][::-1]
    assert order[-1] == y
    return order


def booster_close(G: ColoredHypergraph, G1: ColoredHypergraph, x: int, y: int,
                  available_colors, *, vertices=None, stats: dict | None = None,
                  rotation_limit: int | None = None):
    """Rainbow Hamilton x-y path of G1 plus boosters from G, as a certificate.

    ``vertices`` is the vertex set G1 spans (default: vertices touched by G1
    together with x and y).  Boosters are edges of G inside that set whose
    colour is in ``available_colors`` and unused so far; the one of smallest
    colex rank is taken at each step.  At most 2|V(G1)| boosters are added.
    """
    G._require_graph()
    x, y = int(x), int(y)
    if x == y:
        raise ValueError("x and y must differ")
    if vertices is None:
        V1 = {v for e in G1.edges.tolist() for v in e} | {x, y}
    else:
        V1 = {int(v) for v in vertices}
    if x not in V1 or y not in V1:
        raise ValueError("x and y must lie in the vertex set of G1")
    used = set(G1.colors.tolist())
    if len(used) != G1.m:
        raise ValueError("G1 is not rainbow")
    avail = {int(c) for c in available_colors} - used
    adj = {v: set() for v in V1}
    real_xy = False
    for (a, b), col in zip(G1.edges.tolist(), G1.colors.tolist()):
        if a not in V1 or b not in V1 or G.edge_color((a, b)) != col:
            raise ValueError(f"edge {(a, b)} of G1 is not an edge of G inside V(G1)")
        if {a, b} == {x, y}:
            real_xy = True
            continue
        adj[a].add(b)
        adj[b].add(a)
    added = []
    history = []
    st = stats if stats is not None else {}
    st.update(iterations=0, boosters=added, available=history)
    cap = 2 * len(V1)

    if len(V1) == 2:
        if real_xy:
            return make_certificate(G, HAMILTON_PATH, vertices=[x, y], span=V1)
        col = G.edge_color((x, y))
        if col is not None and col in avail:
            added.append((edge_key(x, y), col))
            st["iterations"] = 1
            return make_certificate(G, HAMILTON_PATH, vertices=[x, y], span=V1)
        return Failure("boosters", "no admissible booster", {"iterations": 0})

    # candidate host edges inside V1, indexed by vertex
    host = {v: [] for v in V1}
    for (a, b), col in zip(G.edges.tolist(), G.colors.tolist()):
        if a in V1 and b in V1 and col in avail and {a, b} != {x, y}:
            host[a].append((b, col))
            host[b].append((a, col))

    closer = _Closer(adj, V1, x, y, rotation_limit or 4 * len(V1))
    path = [x, y]
    for it in range(cap + 1):
        history.append(len(avail))
        status, path, stalled = closer.improve(path)
        if status == "closed":
            order = _cut_virtual(path, x, y)
            cert = make_certificate(G, HAMILTON_PATH, vertices=order, span=V1)
            verdict = check_certificate(G, cert)
            assert verdict, f"booster path failed verification: {verdict.reason}"
            return cert
        if it == cap:
            break
        st["iterations"] = it + 1
        # boosters: close a spanning path, extend a stalled one, merge components
        cands = {}
        on = set(path)
        spanning = len(path) == len(V1)

        def offer(a, b, carry):
            if b in adj[a]:
                return
            for u, col in host[a]:
                if u == b and col in avail:
                    key = (_rank(a, b), col)
                    cands.setdefault(key, (edge_key(a, b), col, carry))

        for head, tails in stalled:
            for t, q in sorted(tails.items()):
                if spanning:
                    offer(head, t, q)
                else:
                    for u, _ in host[t]:
                        if u not in on:
                            offer(t, u, q)
        comp, ncomp = _components(adj, V1)
        if ncomp > 1:
            for v in sorted(V1):
                for u, _ in host[v]:
                    if comp[u] != comp[v]:
                        offer(v, u, None)
        if not cands:
            return Failure("boosters", "no admissible booster",
                           {"iterations": it, "path_length": len(path), "components": ncomp,
                            "available": len(avail)})
        key = min(cands)
        (a, b), col, carry = cands[key]
        adj[a].add(b)
        adj[b].add(a)
        avail.discard(col)
        added.append(((a, b), col))
        if carry is not None:
            path = list(carry)
    return Failure("boosters", "iteration cap reached", {"iterations": cap})
