"""Instances, trees, metric closure and weight arithmetic.

Vertices are dense integer ids ``0..n-1``.  An :class:`Instance` always holds a
complete symmetric weight matrix; sparse inputs go through
:func:`metric_closure` first.  Everything here is immutable once built.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import (DisconnectedGraph, DuplicatePoint, InvalidTree, NonPositiveWeight,
                     TooFewTerminals, UnknownEdge)

REL_TOL = 1e-9

Edge = tuple[int, int]


def edge(u: int, v: int) -> Edge:
    """Normalised unordered pair."""
    u, v = int(u), int(v)
    return (u, v) if u < v else (v, u)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.float64, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Instance:
    """A complete weighted instance with a terminal set.

    ``metric`` and ``euclidean`` are claims about the weights; :func:`validate`
    checks them.  ``notes`` carries provenance remarks (e.g. that a closure was
    applied while parsing) and takes no part in comparisons.
    """

    weights: np.ndarray
    terminals: frozenset
    coords: np.ndarray | None = None
    metric: bool = False
    euclidean: bool = False
    name: str = ""
    notes: tuple = field(default=())

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError(f"weight matrix must be square, got shape {w.shape}")
        w = w.copy()
        np.fill_diagonal(w, 0.0)
        object.__setattr__(self, "weights", _frozen(w))
        object.__setattr__(self, "terminals", frozenset(int(t) for t in self.terminals))
        if self.coords is not None:
            c = np.asarray(self.coords, dtype=np.float64)
            if c.ndim == 1:
                c = c[:, None]
            if c.shape[0] != w.shape[0]:
                raise ValueError("coords must have one row per vertex")
            object.__setattr__(self, "coords", _frozen(c))
        object.__setattr__(self, "notes", tuple(self.notes))

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    def w(self, u: int, v: int) -> float:
        return float(self.weights[u, v])

    @property
    def terminal_list(self) -> list[int]:
        return sorted(self.terminals)

    @property
    def steiner_list(self) -> list[int]:
        return [v for v in range(self.n) if v not in self.terminals]

    def is_terminal(self, v: int) -> bool:
        return v in self.terminals

    def replace(self, **changes) -> "Instance":
        fields = dict(weights=self.weights, terminals=self.terminals, coords=self.coords,
                      metric=self.metric, euclidean=self.euclidean, name=self.name,
                      notes=self.notes)
        fields.update(changes)
        return Instance(**fields)

    def scaled(self, c: float) -> "Instance":
        coords = None if self.coords is None else self.coords * c
        return self.replace(weights=self.weights * c, coords=coords)

    def isclose(self, other: "Instance", rel_tol: float = REL_TOL) -> bool:
        """Same vertex count, terminals, weights (and coords) within ``rel_tol``."""
        if self.n != other.n or self.terminals != other.terminals:
            return False
        if not np.allclose(self.weights, other.weights, rtol=rel_tol, atol=0.0):
            return False
        if (self.coords is None) != (other.coords is None):
            return False
        if self.coords is not None:
            if self.coords.shape != other.coords.shape:
                return False
            scale = max(1.0, float(np.abs(self.coords).max()))
            if not np.allclose(self.coords, other.coords, rtol=rel_tol, atol=rel_tol * scale):
                return False
        return True

    def __repr__(self):
        kind = "euclidean" if self.euclidean else ("metric" if self.metric else "weighted")
        return f"Instance(n={self.n}, terminals={self.terminal_list}, {kind})"


@dataclass(frozen=True)
class SteinerTree:
    """An edge set; see :func:`tree_problems` for what makes it valid."""

    edges: frozenset

    @classmethod
    def of(cls, edges: Iterable[Sequence[int]]) -> "SteinerTree":
        return cls(frozenset(edge(u, v) for u, v in edges))

    def __iter__(self):
        return iter(sorted(self.edges))

    def __len__(self):
        return len(self.edges)

    def __contains__(self, e) -> bool:
        return edge(*e) in self.edges

    @property
    def key(self) -> tuple:
        """Canonical edge order used for deterministic tie-breaks."""
        return tuple(sorted(self.edges))

    def vertices(self) -> set[int]:
        return {v for e in self.edges for v in e}

    def adjacency(self) -> dict[int, list[int]]:
        adj = defaultdict(list)
        for u, v in sorted(self.edges):
            adj[u].append(v)
            adj[v].append(u)
        return dict(adj)

    def degree(self, v: int) -> int:
        return sum(1 for e in self.edges if v in e)

    def __sub__(self, other: "SteinerTree") -> frozenset:
        return self.edges - other.edges

    def __str__(self):
        return " ".join(f"{u}-{v}" for u, v in self)


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, rule: str, detail: str):
        self.violations.append((rule, detail))


def metric_closure(n: int, terminals: Iterable[int],
                   edges: Iterable[tuple[int, int, float]]) -> Instance:
    """Complete metric instance of shortest-path distances of a sparse graph.

    Parallel edges keep the lighter weight.  Original weights survive wherever
    they already are shortest-path distances.
    """
    w = np.full((n, n), math.inf)
    for u, v, x in edges:
        u, v, x = int(u), int(v), float(x)
        if not (0 <= u < n and 0 <= v < n):
            raise UnknownEdge(f"edge ({u}, {v}) outside 0..{n - 1}")
        if u == v:
            continue
        if not x > 0 or not math.isfinite(x):
            raise NonPositiveWeight(f"edge ({u}, {v}) has weight {x!r}")
        if x < w[u, v]:
            w[u, v] = w[v, u] = x
    np.fill_diagonal(w, 0.0)
    dist, _ = kernels.floyd_warshall(w)
    if not np.isfinite(dist).all():
        i, j = map(int, np.argwhere(~np.isfinite(dist))[0])
        raise DisconnectedGraph(f"no path between {i} and {j}")
    return Instance(dist, frozenset(terminals), metric=True)


def euclidean_instance(points, terminal_flags: Sequence[bool]) -> Instance:
    """Instance on ``points`` with Euclidean distances as weights."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    if len(terminal_flags) != len(pts):
        raise ValueError("one terminal flag per point is required")
    terminals = frozenset(i for i, f in enumerate(terminal_flags) if f)
    if len(terminals) < 2:
        raise TooFewTerminals(f"need at least 2 terminals, got {len(terminals)}")
    diff = pts[:, None, :] - pts[None, :, :]
    w = np.sqrt((diff ** 2).sum(axis=-1))
    off = w + np.eye(len(pts))
    if (off <= 0).any():
        i, j = map(int, np.argwhere(off <= 0)[0])
        raise DuplicatePoint(f"points {i} and {j} coincide")
    return Instance(w, terminals, coords=pts, metric=True, euclidean=True)


def tree_weight(instance: Instance, tree: SteinerTree) -> float:
    """Exactly rounded sum of edge weights (order independent)."""
    n = instance.n
    for u, v in tree.edges:
        if not (0 <= u < n and 0 <= v < n):
            raise UnknownEdge(f"edge ({u}, {v}) outside 0..{n - 1}")
    return math.fsum(instance.weights[u, v] for u, v in tree.edges)


def tree_problems(instance: Instance, tree: SteinerTree) -> list[str]:
    """Reasons ``tree`` is not a Steiner tree of ``instance`` (empty if valid)."""
    problems = []
    n = instance.n
    for u, v in tree.edges:
        if u == v:
            problems.append(f"self loop at {u}")
        if not (0 <= u < n and 0 <= v < n):
            problems.append(f"edge ({u}, {v}) outside 0..{n - 1}")
    if problems:
        return problems
    verts = tree.vertices()
    if len(instance.terminals) >= 2:
        missing = instance.terminals - verts
        if missing:
            problems.append(f"terminals not spanned: {sorted(missing)}")
    if verts and len(tree.edges) != len(verts) - 1:
        problems.append(f"{len(tree.edges)} edges on {len(verts)} vertices is not a tree")
    elif verts and not _connected(tree):
        problems.append("edges are not connected")
    return problems


def check_tree(instance: Instance, tree: SteinerTree) -> SteinerTree:
    problems = tree_problems(instance, tree)
    if problems:
        raise InvalidTree("; ".join(problems))
    return tree


def is_canonical(instance: Instance, tree: SteinerTree) -> bool:
    adj = tree.adjacency()
    return all(len(nb) > 1 or v in instance.terminals for v, nb in adj.items())


def _connected(tree: SteinerTree) -> bool:
    adj = tree.adjacency()
    if not adj:
        return True
    start = next(iter(adj))
    seen = {start}
    stack = [start]
    while stack:
        for y in adj[stack.pop()]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == len(adj)


def canonicalize(instance: Instance, tree: SteinerTree) -> SteinerTree:
    """Repeatedly strip non-terminal leaves."""
    adj = {v: set(nb) for v, nb in tree.adjacency().items()}
    stack = [v for v, nb in adj.items() if len(nb) <= 1 and v not in instance.terminals]
    while stack:
        v = stack.pop()
        if v not in adj or len(adj[v]) > 1:
            continue
        for y in adj.pop(v):
            adj[y].discard(v)
            if len(adj[y]) <= 1 and y not in instance.terminals:
                stack.append(y)
    return SteinerTree.of((u, v) for u, nb in adj.items() for v in nb if u < v)


def validate(instance: Instance) -> ValidationReport:
    """Check every Instance invariant; each violation names its pair or triple."""
    rep = ValidationReport()
    w = instance.weights
    n = instance.n
    iu, ju = np.triu_indices(n, 1)
    off = w[iu, ju]
    for k in np.flatnonzero(~(np.isfinite(off) & (off > 0))):
        rep.add("positive", f"w({iu[k]},{ju[k]}) = {off[k]!r} is not a positive real")
    asym = np.argwhere(np.triu(w != w.T, 1))
    for i, j in asym:
        rep.add("symmetric", f"w({i},{j}) = {w[i, j]!r} but w({j},{i}) = {w[j, i]!r}")
    bad_terms = sorted(t for t in instance.terminals if not 0 <= t < n)
    if bad_terms:
        rep.add("terminals", f"terminal ids out of range: {bad_terms}")
    if len(instance.terminals) < 2:
        rep.add("terminals", f"need at least 2 terminals, got {len(instance.terminals)}")
    if instance.metric and np.isfinite(w).all():
        for u, v, x in _triangle_violations(w):
            rep.add("triangle", f"w({u},{v}) = {w[u, v]:.12g} > w({u},{x}) + w({x},{v}) = "
                                f"{w[u, x] + w[x, v]:.12g}")
    if instance.euclidean:
        if instance.coords is None:
            rep.add("euclidean", "euclidean flag set but no coordinates")
        else:
            c = instance.coords
            d = np.sqrt(((c[:, None, :] - c[None, :, :]) ** 2).sum(-1))
            bad = np.abs(w - d) > REL_TOL * np.abs(w)
            np.fill_diagonal(bad, False)
            for i, j in np.argwhere(np.triu(bad, 1)):
                rep.add("euclidean", f"w({i},{j}) = {w[i, j]:.12g} but coordinate distance "
                                     f"is {d[i, j]:.12g}")
    return rep


def _triangle_violations(w: np.ndarray):
    n = w.shape[0]
    found = {}
    for x in range(n):
        via = w[:, x][:, None] + w[x, :][None, :]
        bad = w > via * (1 + REL_TOL)
        for u, v in np.argwhere(np.triu(bad, 1)):
            found.setdefault((int(u), int(v)), x)
    return [(u, v, x) for (u, v), x in sorted(found.items())]


def is_metric(w: np.ndarray) -> bool:
    return np.isfinite(w).all() and not _triangle_violations(w)
