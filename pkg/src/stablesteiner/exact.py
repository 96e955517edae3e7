"""Exact oracles: canonical-tree enumeration, subset brute force, Dreyfus-Wagner.

The three routes share nothing beyond :mod:`model`:

* :func:`enumerate_canonical_trees` lists every canonical tree via Pruefer codes;
* :func:`brute_force_opt` takes the best MST over every Steiner subset;
* :func:`dreyfus_wagner` runs the subset DP over terminals.
"""
from __future__ import annotations

import heapq
import itertools
import math
import os
import time
from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from . import kernels
from .errors import BudgetExceeded, TooManyTerminals
from .model import Instance, SteinerTree, canonicalize, edge, is_canonical, tree_weight

TIE_TOL = 1e-12
DW_MAX_TERMINALS = 16
BRUTE_MAX_STEINER = 22


@dataclass(frozen=True)
class EnumerationBudget:
    """Limits for the exponential routes.  ``None`` means unlimited."""

    max_steiner_subset_size: int | None = None
    max_trees: int | None = None
    deadline: float | None = None  # seconds of wall time

    def __post_init__(self):
        for name in ("max_steiner_subset_size", "max_trees", "deadline"):
            val = getattr(self, name)
            if val is not None and val <= 0:
                raise ValueError(f"{name} must be positive, got {val}")

    @classmethod
    def from_env(cls, **kw) -> "EnumerationBudget":
        secs = os.environ.get("STEINER_BUDGET_SECS")
        if secs and "deadline" not in kw:
            kw["deadline"] = float(secs)
        return cls(**kw)

    def clock(self) -> "_Clock":
        return _Clock(self.deadline)


class _Clock:
    def __init__(self, deadline):
        self.stop = None if deadline is None else time.monotonic() + deadline

    def expired(self) -> bool:
        return self.stop is not None and time.monotonic() > self.stop


UNLIMITED = EnumerationBudget()


class OptResult(NamedTuple):
    tree: SteinerTree
    weight: float
    unique: bool


class DWResult(NamedTuple):
    tree: SteinerTree
    weight: float


# -- enumeration ------------------------------------------------------------

def _prufer_decode(seq, labels) -> list[tuple[int, int]]:
    k = len(labels)
    degree = [1] * k
    for x in seq:
        degree[x] += 1
    leaves = [i for i in range(k) if degree[i] == 1]
    heapq.heapify(leaves)
    out = []
    for x in seq:
        leaf = heapq.heappop(leaves)
        out.append(edge(labels[leaf], labels[x]))
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(leaves, x)
    u, v = heapq.heappop(leaves), heapq.heappop(leaves)
    out.append(edge(labels[u], labels[v]))
    return out


def _canonical_trees_on(terms, subset) -> Iterator[SteinerTree]:
    labels = sorted(terms + list(subset))
    k = len(labels)
    if k == 2:
        yield SteinerTree.of([labels])
        return
    must = {labels.index(x) for x in subset}
    for seq in itertools.product(range(k), repeat=k - 2):
        # a vertex is a leaf iff it is absent from the code
        if must and not must.issubset(seq):
            continue
        yield SteinerTree.of(_prufer_decode(seq, labels))


class CanonicalTrees:
    """Deterministic stream of canonical Steiner trees.

    Subsets of Steiner vertices are visited by size, then lexicographically;
    within a vertex set, trees follow Pruefer-code order.  After iteration
    ``exhaustive`` tells whether the budget cut the stream short.  With
    ``strict=True`` hitting the budget raises :class:`BudgetExceeded` instead.
    """

    def __init__(self, instance: Instance, budget: EnumerationBudget | None = None,
                 strict: bool = False):
        self.instance = instance
        self.budget = budget or UNLIMITED
        self.strict = strict
        self.exhaustive = True
        self.count = 0

    def _cut(self, why):
        self.exhaustive = False
        if self.strict:
            raise BudgetExceeded(why)

    def __iter__(self) -> Iterator[SteinerTree]:
        inst = self.instance
        terms = inst.terminal_list
        steiner = inst.steiner_list
        b = self.budget
        top = len(steiner)
        if b.max_steiner_subset_size is not None and b.max_steiner_subset_size < top:
            top = b.max_steiner_subset_size
            self._cut(f"Steiner subsets limited to size {top} of {len(steiner)}")
        clock = b.clock()
        if len(terms) < 2:
            return
        for size in range(top + 1):
            for subset in itertools.combinations(steiner, size):
                for tree in _canonical_trees_on(terms, subset):
                    if b.max_trees is not None and self.count >= b.max_trees:
                        self._cut(f"tree limit {b.max_trees} reached")
                        return
                    if clock.expired():
                        self._cut("deadline reached")
                        return
                    self.count += 1
                    yield tree


def enumerate_canonical_trees(instance: Instance, budget: EnumerationBudget | None = None,
                              strict: bool = False) -> CanonicalTrees:
    return CanonicalTrees(instance, budget, strict)


# -- subset brute force -----------------------------------------------------

def _mst_edges(w, vertices) -> SteinerTree:
    _, parent = kernels.prim_mst(w, np.asarray(vertices, dtype=np.int64))
    return SteinerTree.of((vertices[i], vertices[p]) for i, p in enumerate(parent) if p >= 0)


def _has_swap_tie(instance: Instance, tree: SteinerTree, tol: float) -> bool:
    """True when a single edge swap gives another canonical tree within ``tol``."""
    w = instance.weights
    adj = tree.adjacency()
    verts = sorted(adj)
    for a, b in itertools.combinations(verts, 2):
        if edge(a, b) in tree.edges:
            continue
        path = _tree_path(adj, a, b)
        heaviest = max(path, key=lambda e: (w[e], e))
        if w[a, b] - w[heaviest] <= tol:
            alt = SteinerTree((tree.edges - {heaviest}) | {edge(a, b)})
            if is_canonical(instance, alt):
                return True
    return False


def _tree_path(adj, a, b) -> list[tuple[int, int]]:
    prev = {a: None}
    stack = [a]
    while stack:
        x = stack.pop()
        if x == b:
            break
        for y in adj[x]:
            if y not in prev:
                prev[y] = x
                stack.append(y)
    out = []
    x = b
    while prev[x] is not None:
        out.append(edge(x, prev[x]))
        x = prev[x]
    return out


def brute_force_opt(instance: Instance, budget: EnumerationBudget | None = None) -> OptResult:
    """Minimum Steiner tree as the best MST over all Steiner subsets.

    Any Steiner tree on vertex set ``T + X`` weighs at least the MST of that
    set, so the minimum over subsets is the optimum.  ``unique`` is False
    when a different canonical tree is within ``1e-12`` relative weight.
    """
    budget = budget or UNLIMITED
    terms = instance.terminal_list
    steiner = instance.steiner_list
    if len(terms) < 2:
        return OptResult(SteinerTree(frozenset()), 0.0, True)
    if (budget.max_steiner_subset_size is not None
            and budget.max_steiner_subset_size < len(steiner)):
        raise BudgetExceeded(f"brute force needs all {len(steiner)} Steiner vertices; "
                             f"budget allows {budget.max_steiner_subset_size}")
    if len(steiner) > BRUTE_MAX_STEINER:
        raise BudgetExceeded(f"{len(steiner)} Steiner vertices exceed the brute-force cap")
    w = instance.weights
    totals = kernels.subset_mst_weights(w, np.asarray(terms, dtype=np.int64),
                                       np.asarray(steiner, dtype=np.int64))
    best = float(totals.min())
    tol = TIE_TOL * best
    found = {}
    for mask in np.flatnonzero(totals <= best + tol):
        verts = terms + [steiner[j] for j in range(len(steiner)) if mask >> j & 1]
        tree = canonicalize(instance, _mst_edges(w, verts))
        found.setdefault(tree, tree_weight(instance, tree))
    opt, opt_w = min(found.items(), key=lambda kv: (kv[1], kv[0].key))
    unique = not any(t != opt and wt <= opt_w + tol for t, wt in found.items())
    if unique and _has_swap_tie(instance, opt, tol):
        unique = False
    return OptResult(opt, opt_w, unique)


# -- Dreyfus-Wagner -----------------------------------------------------------

def _expand_path(nxt, u, v) -> list[tuple[int, int]]:
    out = []
    while u != v:
        step = int(nxt[u, v])
        if step < 0:
            raise ValueError(f"no path between {u} and {v}")
        out.append(edge(u, step))
        u = step
    return out


def dw_tree(weights: np.ndarray, terminals: list[int]) -> SteinerTree | None:
    """Optimal Steiner tree in the graph with matrix ``weights`` (``inf`` = no edge).

    Returns ``None`` when the terminals are disconnected.  The result is the
    union of the DP's shortest paths, reduced to a tree when ties make the
    paths overlap.
    """
    terms = sorted(int(t) for t in terminals)
    if len(terms) < 2:
        return SteinerTree(frozenset())
    dist, nxt = kernels.floyd_warshall(weights)
    value, via, split = kernels.dreyfus_wagner(dist, np.asarray(terms, dtype=np.int64))
    if not math.isfinite(value):
        return None
    edges = set()
    stack = [((1 << (len(terms) - 1)) - 1, terms[0])]
    while stack:
        mask, v = stack.pop()
        u = int(via[mask, v])
        edges.update(_expand_path(nxt, v, u))
        if mask & (mask - 1):
            sub = int(split[mask, u])
            stack.append((sub, u))
            stack.append((mask ^ sub, u))
    return _spanning_subtree(weights, edges, terms)


def _spanning_subtree(weights, edges, terms) -> SteinerTree:
    # Kruskal on the union; a no-op when the union is already a tree
    parent = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    keep = []
    for e in sorted(edges, key=lambda e: (weights[e], e)):
        a, b = find(e[0]), find(e[1])
        if a != b:
            parent[a] = b
            keep.append(e)
    tree = SteinerTree.of(keep)
    tset = frozenset(terms)
    adj = {v: set(nb) for v, nb in tree.adjacency().items()}
    stack = [v for v, nb in adj.items() if len(nb) <= 1 and v not in tset]
    while stack:
        v = stack.pop()
        if v not in adj or len(adj[v]) > 1:
            continue
        for y in adj.pop(v):
            adj[y].discard(v)
            if len(adj[y]) <= 1 and y not in tset:
                stack.append(y)
    return SteinerTree.of((u, v) for u, nb in adj.items() for v in nb if u < v)


def dreyfus_wagner(instance: Instance, max_terminals: int = DW_MAX_TERMINALS) -> DWResult:
    """Exact optimum by the Dreyfus-Wagner subset DP."""
    if len(instance.terminals) > max_terminals:
        raise TooManyTerminals(f"{len(instance.terminals)} terminals exceed the limit "
                               f"of {max_terminals}")
    tree = dw_tree(instance.weights, instance.terminal_list)
    if tree is None:
        raise ValueError("terminals are disconnected")
    return DWResult(tree, tree_weight(instance, tree))



# -- near-optimal trees ---------------------------------------------------------

def _constrained_mst(w, verts, include, exclude):
    parent = {v: v for v in verts}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    chosen = []
    for u, v in sorted(include):
        parent[find(u)] = find(v)
        chosen.append((u, v))
    pairs = sorted(((w[u, v], (u, v)) for u, v in itertools.combinations(verts, 2)
                    if (u, v) not in include and (u, v) not in exclude))
    for _, (u, v) in pairs:
        if len(chosen) == len(verts) - 1:
            break
        a, b = find(u), find(v)
        if a != b:
            parent[a] = b
            chosen.append((u, v))
    if len(chosen) != len(verts) - 1:
        return None
    return frozenset(chosen)


def spanning_trees_within(weights: np.ndarray, vertices, bound: float) -> list[SteinerTree]:
    """Every spanning tree of the complete graph on ``vertices`` weighing at most
    ``bound`` (Lawler's partition scheme over forced/forbidden edge sets)."""
    verts = sorted(int(v) for v in vertices)
    if len(verts) < 2:
        return []
    out = []
    stack = [(frozenset(), frozenset())]
    while stack:
        inc, exc = stack.pop()
        t = _constrained_mst(weights, verts, inc, exc)
        if t is None or math.fsum(weights[e] for e in t) > bound:
            continue
        out.append(SteinerTree(t))
        free = sorted(t - inc)
        for i, e in enumerate(free):
            stack.append((inc | frozenset(free[:i]), exc | {e}))
    return out


def near_optimal_trees(instance: Instance, slack: float) -> list[SteinerTree]:
    """All canonical trees within a factor ``1 + slack`` of the optimum, lightest first."""
    opt = brute_force_opt(instance)
    bound = opt.weight * (1 + slack) * (1 + TIE_TOL)
    terms = instance.terminal_list
    steiner = instance.steiner_list
    totals = kernels.subset_mst_weights(instance.weights, np.asarray(terms, dtype=np.int64),
                                       np.asarray(steiner, dtype=np.int64))
    found = set()
    for mask in np.flatnonzero(totals <= bound):
        verts = terms + [steiner[j] for j in range(len(steiner)) if mask >> j & 1]
        for t in spanning_trees_within(instance.weights, verts, bound):
            if is_canonical(instance, t):
                found.add(t)
    return sorted(found, key=lambda t: (tree_weight(instance, t), t.key))
