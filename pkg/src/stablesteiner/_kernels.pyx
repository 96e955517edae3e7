# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled twins of the kernels in ``_kernels_py``.

Same signatures, same operation order, no fast-math: results must match the
pure-Python fallback bit for bit.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY

cnp.import_array()


def floyd_warshall(w):
    cdef double[:, ::1] d = np.array(w, dtype=np.float64, order="C", copy=True)
    cdef Py_ssize_t n = d.shape[0]
    nxt_arr = np.empty((n, n), dtype=np.int64)
    cdef long long[:, ::1] nxt = nxt_arr
    cdef Py_ssize_t i, j, k
    cdef double dik, cand
    cdef long long nik
    for i in range(n):
        for j in range(n):
            if i == j or d[i, j] < INFINITY:
                nxt[i, j] = j
            else:
                nxt[i, j] = -1
    for i in range(n):
        d[i, i] = 0.0
    for k in range(n):
        for i in range(n):
            dik = d[i, k]
            if dik == INFINITY:
                continue
            nik = nxt[i, k]
            for j in range(n):
                cand = dik + d[k, j]
                if cand < d[i, j]:
                    d[i, j] = cand
                    nxt[i, j] = nik
    return np.asarray(d), nxt_arr


def dreyfus_wagner(dist, terminals):
    cdef const double[:, ::1] d = np.ascontiguousarray(dist, dtype=np.float64)
    cdef Py_ssize_t n = d.shape[0]
    cdef const long long[::1] terms = np.ascontiguousarray(terminals, dtype=np.int64)
    cdef Py_ssize_t q = terms.shape[0] - 1
    if q <= 0:
        return 0.0, np.zeros((1, n), dtype=np.int32), np.full((1, n), -1, dtype=np.int32)
    cdef Py_ssize_t size = (<Py_ssize_t>1) << q
    dp_arr = np.full((size, n), np.inf, dtype=np.float64)
    via_arr = np.full((size, n), -1, dtype=np.int32)
    split_arr = np.full((size, n), -1, dtype=np.int32)
    cdef double[:, ::1] dp = dp_arr
    cdef int[:, ::1] via = via_arr
    cdef int[:, ::1] split = split_arr
    g_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] g = g_arr
    cdef Py_ssize_t i, u, v, mask, sub, low, m
    cdef long long t
    cdef double val, gu
    for i in range(q):
        m = (<Py_ssize_t>1) << i
        t = terms[i + 1]
        for v in range(n):
            dp[m, v] = d[t, v]
            via[m, v] = <int>t
    for mask in range(1, size):
        if mask & (mask - 1) == 0:
            continue
        low = mask & -mask
        for u in range(n):
            g[u] = INFINITY
        sub = (mask - 1) & mask
        while sub > 0:
            if sub & low:
                for u in range(n):
                    val = dp[sub, u] + dp[mask ^ sub, u]
                    if val < g[u]:
                        g[u] = val
                        split[mask, u] = <int>sub
            sub = (sub - 1) & mask
        for u in range(n):
            gu = g[u]
            if gu == INFINITY:
                continue
            for v in range(n):
                val = gu + d[u, v]
                if val < dp[mask, v]:
                    dp[mask, v] = val
                    via[mask, v] = <int>u
    return float(dp[size - 1, terms[0]]), via_arr, split_arr


cdef double _prim(const double[:, ::1] w, long long[::1] vs, Py_ssize_t k,
                  double[::1] key, char[::1] done, long long[::1] parent) nogil:
    cdef Py_ssize_t i, it, bi
    cdef double best, wi, total = 0.0
    if k <= 1:
        if k == 1:
            parent[0] = -1
        return 0.0
    for i in range(k):
        key[i] = INFINITY
        done[i] = 0
        parent[i] = -1
    key[0] = 0.0
    for it in range(k):
        best = INFINITY
        bi = -1
        for i in range(k):
            if not done[i] and key[i] < best:
                best = key[i]
                bi = i
        if bi < 0:
            return INFINITY
        done[bi] = 1
        total += best
        for i in range(k):
            if not done[i]:
                wi = w[vs[bi], vs[i]]
                if wi < key[i]:
                    key[i] = wi
                    parent[i] = bi
    return total


def prim_mst(w, vertices):
    cdef const double[:, ::1] wm = np.ascontiguousarray(w, dtype=np.float64)
    cdef long long[::1] vs = np.ascontiguousarray(vertices, dtype=np.int64)
    cdef Py_ssize_t k = vs.shape[0]
    parent_arr = np.full(max(k, 1), -1, dtype=np.int64)
    key = np.empty(max(k, 1), dtype=np.float64)
    done = np.empty(max(k, 1), dtype=np.int8)
    total = _prim(wm, vs, k, key, done, parent_arr)
    return total, parent_arr[:k]


def subset_mst_weights(w, terminals, steiner):
    cdef const double[:, ::1] wm = np.ascontiguousarray(w, dtype=np.float64)
    cdef const long long[::1] base = np.ascontiguousarray(terminals, dtype=np.int64)
    cdef const long long[::1] st = np.ascontiguousarray(steiner, dtype=np.int64)
    cdef Py_ssize_t nb = base.shape[0], s = st.shape[0]
    cdef Py_ssize_t cap = nb + s
    vs_arr = np.empty(max(cap, 1), dtype=np.int64)
    cdef long long[::1] vs = vs_arr
    key = np.empty(max(cap, 1), dtype=np.float64)
    done = np.empty(max(cap, 1), dtype=np.int8)
    parent = np.empty(max(cap, 1), dtype=np.int64)
    cdef double[::1] keyv = key
    cdef char[::1] donev = done
    cdef long long[::1] parentv = parent
    out_arr = np.empty((<Py_ssize_t>1) << s, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t mask, j, k
    for j in range(nb):
        vs[j] = base[j]
    with nogil:
        for mask in range((<Py_ssize_t>1) << s):
            k = nb
            for j in range(s):
                if (mask >> j) & 1:
                    vs[k] = st[j]
                    k += 1
            out[mask] = _prim(wm, vs, k, keyv, donev, parentv)
    return out_arr
