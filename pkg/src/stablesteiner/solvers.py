"""Solvers that exploit stability.

* :func:`mst_terminals` - optimal on Euclidean instances stable beyond the
  no-Steiner threshold, where OPT uses no Steiner vertex at all.
* :func:`fan_greedy` - Kruskal-like growth that may commit a whole fan
  (Steiner centre plus spokes) in one step.
* :func:`contract_solve` - run an approximation oracle with a small enough
  epsilon, contract its heaviest edge (which must belong to OPT), repeat.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InconsistentTrace, NoFeasibleStep, OracleContractViolated
from .exact import TIE_TOL, brute_force_opt, near_optimal_trees
from .model import Instance, SteinerTree, canonicalize, edge, is_metric, tree_weight
from .structure import FAN_GAMMA


class _DSU:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a, b):
        a, b = self.find(a), self.find(b)
        if a == b:
            return False
        self.parent[max(a, b)] = min(a, b)
        return True


def mst_terminals(instance: Instance) -> SteinerTree:
    """Kruskal on the terminals alone; ties follow canonical edge order."""
    terms = instance.terminal_list
    w = instance.weights
    pairs = sorted((w[u, v], u, v) for i, u in enumerate(terms) for v in terms[i + 1:])
    dsu = _DSU(terms)
    out = []
    for _, u, v in pairs:
        if dsu.union(u, v):
            out.append((u, v))
            if len(out) == len(terms) - 1:
                break
    return SteinerTree.of(out)


# -- fan greedy -----------------------------------------------------------------

def _best_fan(instance, centre, comp_terms, gamma):
    """Cheapest fan at ``centre`` by ``sum / (m - 1)`` with spokes within a factor
    ``1 / (gamma - 1)``; one spoke per component, to its nearest terminal."""
    w = instance.weights
    spokes = sorted((w[centre, t], t) for ts in comp_terms for t in [min(ts, key=lambda x: (w[centre, x], x))])
    best = None
    for i in range(len(spokes)):
        cap = spokes[i][0] / (gamma - 1)
        total = spokes[i][0]
        for j in range(i + 1, len(spokes)):
            if spokes[j][0] > cap:
                break
            total += spokes[j][0]
            leaves = tuple(t for _, t in spokes[i:j + 1])
            cand = (total / (j - i), centre, leaves)
            if best is None or cand < best:
                best = cand
    return best


def fan_greedy(instance: Instance, gamma: float) -> SteinerTree:
    """Grow a forest H by repeatedly committing the cheaper of

    * the lightest edge joining two terminal components of H (any vertex of a
      component may be an endpoint, so a committed Steiner hub can still pick
      up a straggler), or
    * the fan of least average weight ``sum / (m - 1)`` around an unused
      Steiner vertex,

    until all terminals are connected.
    """
    if not gamma > FAN_GAMMA:
        raise ValueError(f"fan_greedy needs gamma > {FAN_GAMMA}, got {gamma}")
    terms = instance.terminal_list
    w = instance.weights
    dsu = _DSU(range(instance.n))
    used = set()
    chosen = []
    while len({dsu.find(t) for t in terms}) > 1:
        members = sorted(set(terms) | used)
        groups = {}
        for t in terms:
            groups.setdefault(dsu.find(t), []).append(t)
        comp_terms = list(groups.values())
        best_edge = None
        for i, u in enumerate(members):
            for v in members[i + 1:]:
                if dsu.find(u) != dsu.find(v):
                    cand = (w[u, v], u, v)
                    if best_edge is None or cand < best_edge:
                        best_edge = cand
        best_fan = None
        for s in instance.steiner_list:
            if s in used:
                continue
            f = _best_fan(instance, s, comp_terms, gamma)
            if f is not None and (best_fan is None or f < best_fan):
                best_fan = f
        if best_fan is not None and (best_edge is None or best_fan[0] < best_edge[0]):
            _, s, leaves = best_fan
            used.add(s)
            for t in leaves:
                dsu.union(s, t)
                chosen.append((s, t))
        elif best_edge is not None:
            _, u, v = best_edge
            dsu.union(u, v)
            chosen.append((u, v))
        else:
            raise NoFeasibleStep("no edge or fan joins two components")
    return canonicalize(instance, SteinerTree.of(chosen))


# -- contraction ------------------------------------------------------------------

@dataclass(frozen=True)
class InnerOracle:
    """``solve(instance, eps)`` must return a canonical tree of weight at most
    ``(1 + eps)`` times the optimum."""

    solve: Callable[[Instance, float], SteinerTree]
    label: str

    def __call__(self, instance: Instance, eps: float) -> SteinerTree:
        return self.solve(instance, eps)


def _exact(instance, eps):
    return brute_force_opt(instance).tree


def _mst(instance, eps):
    return mst_terminals(instance)


def fuzzed_exact_oracle(seed: int | None = None) -> InnerOracle:
    """Returns a tree within ``1 + eps`` of optimal, chosen adversarially.

    With ``seed=None`` the heaviest admissible tree is returned (ties by edge
    order); otherwise a seeded uniform pick among the admissible trees.
    """
    rng = random.Random(seed)

    def solve(instance, eps):
        trees = near_optimal_trees(instance, eps)
        if seed is None:
            return max(trees, key=lambda t: (tree_weight(instance, t), t.key))
        return trees[rng.randrange(len(trees))]

    return InnerOracle(solve, "fuzzed-exact")


EXACT_ORACLE = InnerOracle(_exact, "exact")
MST_ORACLE = InnerOracle(_mst, "mst")


def oracle_by_name(name: str, seed: int | None = None) -> InnerOracle:
    if name == "exact":
        return EXACT_ORACLE
    if name == "mst":
        return MST_ORACLE
    if name == "fuzzed-exact":
        return fuzzed_exact_oracle(seed)
    raise ValueError(f"unknown oracle {name!r}")


def contract_edge(instance: Instance, e) -> tuple[Instance, tuple]:
    """Merge the endpoints of ``e`` into one vertex.

    The merged vertex sits at the smaller id and is a terminal if either
    endpoint was; its weight to ``x`` is ``min(w_ux, w_vx)``.  Returns the new
    instance and ``mapping`` with ``mapping[old] = new``.  The metric claim is
    kept only if the triangle inequality still holds.
    """
    u, v = edge(*e)
    if u == v:
        raise ValueError("cannot contract a loop")
    n = instance.n
    mapping = tuple(i if i < v else (u if i == v else i - 1) for i in range(n))
    keep = [i for i in range(n) if i != v]
    w = instance.weights[np.ix_(keep, keep)].copy()
    merged = np.minimum(instance.weights[u, keep], instance.weights[v, keep])
    w[u, :] = merged
    w[:, u] = merged
    w[u, u] = 0.0
    terms = frozenset(mapping[t] for t in instance.terminals)
    metric = instance.metric and is_metric(w)
    return Instance(w, terms, metric=metric, name=instance.name), mapping


@dataclass(frozen=True)
class ContractionStep:
    original_edge: tuple  # in original vertex ids
    size_before: int
    current_edge: tuple  # in the ids of the instance it was contracted in


@dataclass
class ContractionTrace:
    instance: Instance
    steps: list = field(default_factory=list)
    groups: list = field(default_factory=list)  # original ids behind each current vertex
    base_tree: SteinerTree | None = None


def _cheapest_pair(w, ga, gb):
    return min((w[x, y], edge(x, y)) for x in ga for y in gb)[1]


def expand_solution(trace: ContractionTrace, base_tree: SteinerTree) -> SteinerTree:
    """Lift ``base_tree`` (in contracted ids) back to the original instance and
    add every contracted edge."""
    inst = trace.instance
    w = inst.weights
    groups = trace.groups or [frozenset([v]) for v in range(inst.n)]
    edges = {s.original_edge for s in trace.steps}
    for a, b in base_tree.edges:
        if a >= len(groups) or b >= len(groups):
            raise InconsistentTrace(f"base edge ({a}, {b}) has no group")
        edges.add(_cheapest_pair(w, groups[a], groups[b]))
    tree = SteinerTree.of(edges)
    # contracted Steiner-only groups the base tree never reached hang loose
    adj = tree.adjacency()
    start = inst.terminal_list[0]
    seen = {start}
    stack = [start] if start in adj else []
    while stack:
        for y in adj[stack.pop()]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    if not inst.terminals <= seen:
        raise InconsistentTrace("expanded edges do not connect all terminals")
    tree = SteinerTree(frozenset(e for e in tree.edges if e[0] in seen))
    if len(tree.edges) != len(tree.vertices()) - 1:
        raise InconsistentTrace("expanded edges contain a cycle")
    return canonicalize(inst, tree)


def contract_solve(instance: Instance, gamma: float, oracle: InnerOracle = EXACT_ORACLE,
                   base_size: int = 4, check_oracle: bool = True):
    """Solve a gamma-stable instance by repeated contraction.

    Each round runs ``oracle`` with ``eps = (gamma - 1) / (2 n)`` for the
    current vertex count ``n``, contracts the heaviest returned edge (ties by
    edge order) and records it.  Once at most ``base_size`` vertices (or a
    single terminal) remain, the rest is brute-forced.  Returns
    ``(tree, trace)``.
    """
    if not gamma > 1:
        raise ValueError(f"gamma must exceed 1, got {gamma}")
    cur = instance
    trace = ContractionTrace(instance, groups=[frozenset([v]) for v in range(instance.n)])
    while cur.n > base_size and len(cur.terminals) >= 2:
        eps = (gamma - 1) / (2 * cur.n)
        tree = oracle(cur, eps)
        if check_oracle:
            best = brute_force_opt(cur).weight
            got = tree_weight(cur, tree)
            if got > (1 + eps) * best * (1 + TIE_TOL):
                raise OracleContractViolated(
                    f"oracle {oracle.label!r} returned weight {got:.12g} > (1 + {eps:.3g}) * {best:.12g}")
        heavy = min(tree.edges, key=lambda e: (-cur.weights[e], e))
        orig = _cheapest_pair(instance.weights, trace.groups[heavy[0]], trace.groups[heavy[1]])
        trace.steps.append(ContractionStep(orig, cur.n, heavy))
        cur, mapping = contract_edge(cur, heavy)
        regrouped = [set() for _ in range(cur.n)]
        for old, g in enumerate(trace.groups):
            regrouped[mapping[old]].update(g)
        trace.groups = [frozenset(g) for g in regrouped]
    if len(cur.terminals) >= 2:
        base = brute_force_opt(cur).tree
    else:
        base = SteinerTree(frozenset())
    trace.base_tree = base
    return expand_solution(trace, base), trace
