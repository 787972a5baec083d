"""Loop-form kernels.

Every function here is written in the numba nopython subset: flat numpy
arrays, integer scalars, no Python objects.  ``_numba`` compiles them;
``_numpy`` reuses the search kernels as-is and replaces the data-parallel
ones with vectorised equivalents.
"""
import numpy as np

FOUND = 1
EXHAUSTED = 0
LIMIT = 2


def popcount64(x):
    # x: np.uint64
    cnt = 0
    while x != np.uint64(0):
        x = x & (x - np.uint64(1))
        cnt += 1
    return cnt


def _hc_feasible(cm, c, path, d, used_v, used_c, cstamp, vmark, queue, tok):
    # path[0..d] fixed, end = path[d]; R = unvisited vertices
    n = cm.shape[0]
    end = path[d]
    first = path[1]
    # anchor needs a closing neighbour beyond path[1] (orientation)
    ok = False
    for w in range(n):
        if not used_v[w] and w > first:
            col = cm[0, w]
            if col >= 0 and not used_c[col]:
                ok = True
                break
    if not ok:
        return False
    # every unvisited vertex needs two usable neighbours in R + {end, anchor}
    for w in range(n):
        if used_v[w]:
            continue
        deg = 0
        for x in range(n):
            if x == w:
                continue
            if used_v[x] and x != end and x != 0:
                continue
            col = cm[w, x]
            if col >= 0 and not used_c[col]:
                deg += 1
                if deg >= 2:
                    break
        if deg < 2:
            return False
    # R reachable from end through R
    head = 0
    tail = 0
    remaining = 0
    for w in range(n):
        if not used_v[w]:
            remaining += 1
    queue[tail] = end
    tail += 1
    vmark[end] = tok
    reached = 0
    while head < tail:
        u = queue[head]
        head += 1
        for w in range(n):
            if used_v[w] or vmark[w] == tok:
                continue
            col = cm[u, w]
            if col >= 0 and not used_c[col]:
                vmark[w] = tok
                queue[tail] = w
                tail += 1
                reached += 1
    if reached < remaining:
        return False
    # distinct unused colours among the remaining vertex set >= edges still needed
    need = n - d
    distinct = 0
    for a in range(n):
        if used_v[a] and a != end and a != 0:
            continue
        for b in range(a + 1, n):
            if used_v[b] and b != end and b != 0:
                continue
            col = cm[a, b]
            if col >= 0 and not used_c[col] and cstamp[col] != tok:
                cstamp[col] = tok
                distinct += 1
    return distinct >= need


def hc_search(cm, c, path, it, ecol, used_v, used_c, cstamp, vmark, queue, state, node_limit):
    """Resumable DFS for a rainbow Hamilton cycle anchored at vertex 0.

    ``state`` holds ``[depth, token]``; all other arrays carry the search
    stack between calls.  Returns ``(status, nodes_expanded)``.
    """
    n = cm.shape[0]
    d = state[0]
    tok = state[1]
    nodes = 0
    while True:
        if d == n:
            last = path[n - 1]
            col = cm[last, 0]
            if col >= 0 and not used_c[col] and path[1] < last:
                state[0] = d
                state[1] = tok
                return FOUND, nodes
            d -= 1
            used_v[path[d]] = False
            used_c[ecol[d]] = False
            continue
        u = path[d - 1]
        v = it[d]
        pushed = False
        while v < n:
            if not used_v[v]:
                col = cm[u, v]
                if col >= 0 and not used_c[col] and not (d == n - 1 and v < path[1]):
                    path[d] = v
                    ecol[d] = col
                    used_v[v] = True
                    used_c[col] = True
                    nodes += 1
                    tok += 1
                    if d + 1 == n or _hc_feasible(cm, c, path, d, used_v, used_c,
                                                  cstamp, vmark, queue, tok):
                        it[d] = v + 1
                        d += 1
                        if d < n:
                            it[d] = 0
                        pushed = True
                        break
                    used_v[v] = False
                    used_c[col] = False
            v += 1
        if not pushed:
            d -= 1
            if d == 0:
                state[0] = 0
                state[1] = tok
                return EXHAUSTED, nodes
            used_v[path[d]] = False
            used_c[ecol[d]] = False
        if nodes >= node_limit:
            state[0] = d
            state[1] = tok
            return LIMIT, nodes


def batch_contains(present, colors, structs, c):
    """Row t is True iff some structure is fully present and colourable rainbow.

    ``colors[t, e] == -1`` marks an edge carrying every colour (multi-edge).
    """
    T = present.shape[0]
    S = structs.shape[0]
    m = structs.shape[1]
    out = np.zeros(T, dtype=np.bool_)
    if c < m:
        return out
    for t in range(T):
        for s in range(S):
            ok = True
            for a in range(m):
                ea = structs[s, a]
                if not present[t, ea]:
                    ok = False
                    break
                ca = colors[t, ea]
                if ca >= 0:
                    for b in range(a):
                        if colors[t, structs[s, b]] == ca:
                            ok = False
                            break
                    if not ok:
                        break
            if ok:
                out[t] = True
                break
    return out


def subset_hits_by_size(masks, nbits):
    """counts[j] = number of j-subsets of [nbits] containing some mask."""
    counts = np.zeros(nbits + 1, dtype=np.int64)
    total = np.int64(1) << nbits
    S = masks.shape[0]
    for sub in range(total):
        s = np.uint64(sub)
        for i in range(S):
            if (s & masks[i]) == masks[i]:
                counts[popcount64(s)] += 1
                break
    return counts


def induced_edge_counts(masks, edges):
    B = masks.shape[0]
    E = edges.shape[0]
    out = np.zeros(B, dtype=np.int64)
    for b in range(B):
        cnt = 0
        for e in range(E):
            if masks[b, edges[e, 0]] and masks[b, edges[e, 1]]:
                cnt += 1
        out[b] = cnt
    return out


def expansion_exhaustive(adj, k_bound, d):
    """Smallest-first scan of all X with |X| <= k_bound, n <= 64.

    Returns the violating set as a bitmask, or 0 when every X expands.
    """
    n = adj.shape[0]
    idx = np.zeros(k_bound + 1, dtype=np.int64)
    for size in range(1, min(k_bound, n) + 1):
        for i in range(size):
            idx[i] = i
        while True:
            xm = np.uint64(0)
            nb = np.uint64(0)
            for i in range(size):
                xm |= np.uint64(1) << np.uint64(idx[i])
                nb |= adj[idx[i]]
            ext = popcount64(nb & ~xm)
            if ext < d * size:
                return xm
            # next combination
            j = size - 1
            while j >= 0 and idx[j] == n - size + j:
                j -= 1
            if j < 0:
                break
            idx[j] += 1
            for i in range(j + 1, size):
                idx[i] = idx[i - 1] + 1
    return np.uint64(0)
