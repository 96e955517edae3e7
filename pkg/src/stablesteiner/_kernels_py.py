"""Pure-Python reference versions of the hot kernels.

Every function here has a twin in ``_kernels.pyx`` with the same signature and
the same floating-point operation order, so both backends return bit-identical
results.  Arrays come in as numpy arrays and go out as numpy arrays; the loops
themselves run on plain lists.
"""
import math

import numpy as np

INF = math.inf


def floyd_warshall(w):
    """All-pairs shortest paths with next-hop reconstruction.

    ``w`` is a dense symmetric matrix with ``inf`` marking absent edges.
    Returns ``(dist, nxt)`` where ``nxt[i, j]`` is the vertex after ``i`` on a
    shortest ``i -> j`` path (``-1`` if unreachable).  Only strict improvements
    replace an entry, so direct edges survive ties.
    """
    n = w.shape[0]
    d = [list(map(float, row)) for row in np.asarray(w, dtype=np.float64)]
    nxt = [[j if (i == j or d[i][j] < INF) else -1 for j in range(n)] for i in range(n)]
    for i in range(n):
        d[i][i] = 0.0
    for k in range(n):
        dk = d[k]
        for i in range(n):
            di = d[i]
            dik = di[k]
            if dik == INF:
                continue
            ni = nxt[i]
            nik = ni[k]
            for j in range(n):
                cand = dik + dk[j]
                if cand < di[j]:
                    di[j] = cand
                    ni[j] = nik
    return np.array(d, dtype=np.float64), np.array(nxt, dtype=np.int64)


def dreyfus_wagner(dist, terminals):
    """Dreyfus-Wagner DP over subsets of ``terminals[1:]`` rooted at ``terminals[0]``.

    Returns ``(value, via, split)``.  ``via[mask, v]`` is the vertex ``u`` where
    the subtree for ``mask`` branches, joined to ``v`` by a shortest path;
    ``split[mask, u]`` is the submask used at that branch point (``-1`` for
    singletons).
    """
    n = dist.shape[0]
    terms = [int(t) for t in terminals]
    q = len(terms) - 1
    if q <= 0:
        return 0.0, np.zeros((1, n), dtype=np.int32), np.full((1, n), -1, dtype=np.int32)
    d = [list(map(float, row)) for row in np.asarray(dist, dtype=np.float64)]
    size = 1 << q
    dp = [None] * size
    via = [None] * size
    split = [None] * size
    via[0] = [-1] * n
    split[0] = [-1] * n
    for i in range(q):
        m = 1 << i
        t = terms[i + 1]
        dp[m] = d[t][:]
        via[m] = [t] * n
        split[m] = [-1] * n
    for mask in range(1, size):
        if mask & (mask - 1) == 0:
            continue
        low = mask & -mask
        g = [INF] * n
        sp = [-1] * n
        sub = (mask - 1) & mask
        while sub > 0:
            if sub & low:
                a = dp[sub]
                b = dp[mask ^ sub]
                for u in range(n):
                    val = a[u] + b[u]
                    if val < g[u]:
                        g[u] = val
                        sp[u] = sub
            sub = (sub - 1) & mask
        row = [INF] * n
        vrow = [-1] * n
        for u in range(n):
            gu = g[u]
            if gu == INF:
                continue
            du = d[u]
            for v in range(n):
                val = gu + du[v]
                if val < row[v]:
                    row[v] = val
                    vrow[v] = u
        dp[mask] = row
        via[mask] = vrow
        split[mask] = sp
    full = size - 1
    value = dp[full][terms[0]]
    return (value, np.array(via, dtype=np.int32), np.array(split, dtype=np.int32))


def _prim(rows, vs):
    k = len(vs)
    parent = [-1] * k
    if k <= 1:
        return 0.0, parent
    key = [INF] * k
    done = [False] * k
    key[0] = 0.0
    total = 0.0
    for _ in range(k):
        best = INF
        bi = -1
        for i in range(k):
            if not done[i] and key[i] < best:
                best = key[i]
                bi = i
        if bi < 0:
            return INF, parent
        done[bi] = True
        total += best
        row = rows[vs[bi]]
        for i in range(k):
            if not done[i]:
                wi = row[vs[i]]
                if wi < key[i]:
                    key[i] = wi
                    parent[i] = bi
    return total, parent


def prim_mst(w, vertices):
    """Prim's algorithm on the complete graph induced by ``vertices``.

    Returns ``(total, parent)`` where ``parent[i]`` is the position (within
    ``vertices``) of the tree neighbour of ``vertices[i]``; the root has -1.
    Ties go to the lowest position.
    """
    rows = np.asarray(w, dtype=np.float64).tolist()
    total, parent = _prim(rows, [int(v) for v in vertices])
    return total, np.array(parent, dtype=np.int64)


def subset_mst_weights(w, terminals, steiner):
    """MST weight of ``terminals + {steiner[j] : bit j of mask}`` for every mask."""
    rows = np.asarray(w, dtype=np.float64).tolist()
    s = len(steiner)
    base = [int(t) for t in terminals]
    st = [int(x) for x in steiner]
    out = np.empty(1 << s, dtype=np.float64)
    for mask in range(1 << s):
        vs = base + [st[j] for j in range(s) if mask >> j & 1]
        out[mask] = _prim(rows, vs)[0]
    return out
