"""Bilu-Linial stability: perturbations, the margin gamma*, certification.

An instance is gamma-stable when every perturbation with per-pair multipliers
in ``[1, gamma]`` leaves the optimal tree unchanged (and unique).  Against a
fixed rival S the adversary's best move inflates exactly the edges of
``OPT \\ S``, so the instance is gamma-stable iff ``gamma < gamma*`` with::

    gamma* = min over canonical S != OPT of  w(S \\ OPT) / w(OPT \\ S)

Two independent routes compute gamma*: full enumeration of canonical trees,
and a Dinkelbach iteration whose inner problem (best tree avoiding one OPT
edge, OPT edges scaled by lambda) is solved by Dreyfus-Wagner.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .errors import MultiplierOutOfRange, SameTree
from .exact import (TIE_TOL, EnumerationBudget, brute_force_opt, dw_tree,
                    enumerate_canonical_trees)
from .model import Edge, Instance, SteinerTree, edge, tree_weight

MAX_DINKELBACH_STEPS = 64


@dataclass(frozen=True)
class Perturbation:
    """Per-pair multipliers in ``[1, gamma]``; unlisted pairs keep multiplier 1."""

    gamma: float
    multipliers: Mapping[Edge, float] = field(default_factory=dict)

    def __post_init__(self):
        if not self.gamma > 1:
            raise MultiplierOutOfRange(f"gamma must exceed 1, got {self.gamma}")
        clean = {}
        for e, m in self.multipliers.items():
            m = float(m)
            if not 1.0 <= m <= self.gamma:
                raise MultiplierOutOfRange(f"multiplier {m} on {e} outside [1, {self.gamma}]")
            clean[edge(*e)] = m
        object.__setattr__(self, "multipliers", MappingProxyType(clean))

    def multiplier(self, u: int, v: int) -> float:
        return self.multipliers.get(edge(u, v), 1.0)

    def matrix(self, n: int) -> np.ndarray:
        m = np.ones((n, n))
        for (u, v), x in self.multipliers.items():
            m[u, v] = m[v, u] = x
        return m


@dataclass
class StabilityReport:
    gamma_star: float
    opt: SteinerTree
    opt_weight: float
    witness: SteinerTree | None
    opt_unique: bool
    exhaustive: bool = True
    method: str = "parametric"

    def stable_at(self, gamma: float) -> bool:
        return gamma < self.gamma_star


def apply_perturbation(instance: Instance, perturbation: Perturbation) -> Instance:
    """Perturbed copy of ``instance``; metric and Euclidean claims are dropped."""
    for u, v in perturbation.multipliers:
        if not (0 <= u < instance.n and 0 <= v < instance.n):
            raise MultiplierOutOfRange(f"pair ({u}, {v}) is not in the instance")
    w = instance.weights * perturbation.matrix(instance.n)
    return instance.replace(weights=w, metric=False, euclidean=False)


def worst_case_perturbation(instance: Instance, opt: SteinerTree, rival: SteinerTree,
                            gamma: float) -> Perturbation:
    """Inflate ``opt \\ rival`` by ``gamma``: minimises ``w'(rival) - w'(opt)``."""
    if opt.edges == rival.edges:
        raise SameTree("opt and rival are the same tree")
    return Perturbation(gamma, {e: gamma for e in opt.edges - rival.edges})


def margin(instance: Instance, opt: SteinerTree, rival: SteinerTree,
           perturbation: Perturbation) -> float:
    """``w'(rival) - w'(opt)`` under ``perturbation``."""
    p = perturbation
    a = math.fsum(instance.weights[e] * p.multiplier(*e) for e in rival.edges)
    b = math.fsum(instance.weights[e] * p.multiplier(*e) for e in opt.edges)
    return a - b


def rival_ratio(instance: Instance, opt: SteinerTree, rival: SteinerTree) -> float:
    """``w(rival \\ opt) / w(opt \\ rival)``; ``inf`` when ``opt`` is contained in ``rival``."""
    w = instance.weights
    den = math.fsum(w[e] for e in opt.edges - rival.edges)
    num = math.fsum(w[e] for e in rival.edges - opt.edges)
    if den <= 0:
        return math.inf
    return num / den


def _pick(cands):
    # cands: list of (ratio, tree); min ratio, near-ties broken by edge order
    best = min(r for r, _ in cands)
    close = [(t.key, t) for r, t in cands if r <= best * (1 + TIE_TOL)]
    return best, min(close)[1]


def _gamma_star_enumerate(instance: Instance, budget: EnumerationBudget | None) -> StabilityReport:
    stream = enumerate_canonical_trees(instance, budget)
    trees = [(tree_weight(instance, t), t.key, t) for t in stream]
    trees.sort(key=lambda x: (x[0], x[1]))
    opt_w, _, opt = trees[0]
    rest = trees[1:]
    if not rest:
        return StabilityReport(math.inf, opt, opt_w, None, True, stream.exhaustive, "enumerate")
    if rest[0][0] <= opt_w * (1 + TIE_TOL):
        return StabilityReport(1.0, opt, opt_w, rest[0][2], False, stream.exhaustive, "enumerate")
    g, witness = _pick([(rival_ratio(instance, opt, t), t) for _, _, t in rest])
    return StabilityReport(max(g, 1.0), opt, opt_w, witness, True, stream.exhaustive, "enumerate")


def _best_rivals(instance: Instance, opt: SteinerTree, lam: float) -> list[SteinerTree]:
    """For each OPT edge, the best tree avoiding it under OPT-edges-times-``lam`` weights."""
    w = instance.weights.copy()
    for u, v in opt.edges:
        w[u, v] *= lam
        w[v, u] *= lam
    out = []
    terms = instance.terminal_list
    for u, v in sorted(opt.edges):
        wf = w.copy()
        wf[u, v] = wf[v, u] = math.inf
        t = dw_tree(wf, terms)
        if t is not None:
            out.append(t)
    return out


def _gamma_star_parametric(instance: Instance) -> StabilityReport:
    terms = instance.terminal_list
    opt = dw_tree(instance.weights, terms)
    opt_w = tree_weight(instance, opt)
    rivals = _best_rivals(instance, opt, 1.0)
    if not rivals:
        return StabilityReport(math.inf, opt, opt_w, None, True)
    closest = min(rivals, key=lambda t: (tree_weight(instance, t), t.key))
    if tree_weight(instance, closest) <= opt_w * (1 + TIE_TOL):
        return StabilityReport(1.0, opt, opt_w, closest, False)
    seen = [(rival_ratio(instance, opt, t), t) for t in rivals]
    lam, _ = _pick(seen)
    for _ in range(MAX_DINKELBACH_STEPS):
        cands = [(rival_ratio(instance, opt, t), t) for t in _best_rivals(instance, opt, lam)]
        seen.extend(cands)
        low = min(r for r, _ in cands)
        if not low < lam * (1 - 1e-14):
            break
        lam = low
    g, witness = _pick(seen)
    return StabilityReport(max(g, 1.0), opt, opt_w, witness, True)


def gamma_star(instance: Instance, budget: EnumerationBudget | None = None,
               method: str = "parametric") -> StabilityReport:
    """Stability margin of ``instance``.

    ``method="parametric"`` (default) is exact and polynomial in ``n`` for a
    fixed terminal count; ``method="enumerate"`` walks every canonical tree and
    honours ``budget`` (a truncated walk reports ``exhaustive=False`` and the
    value is then only an upper bound).
    """
    if method == "enumerate":
        return _gamma_star_enumerate(instance, budget)
    if method == "parametric":
        return _gamma_star_parametric(instance)
    raise ValueError(f"unknown method {method!r}")


@dataclass
class Certificate:
    stable: bool
    witness: SteinerTree | None
    report: StabilityReport

    def __iter__(self):
        return iter((self.stable, self.witness))


def certify(instance: Instance, gamma: float, budget: EnumerationBudget | None = None,
            method: str = "parametric") -> Certificate:
    """Decide gamma-stability.  Unstable answers carry the rival that wins
    under :func:`worst_case_perturbation`."""
    if not gamma > 1:
        raise ValueError(f"gamma must exceed 1, got {gamma}")
    rep = gamma_star(instance, budget, method)
    stable = gamma < rep.gamma_star
    return Certificate(stable, None if stable else rep.witness, rep)


def is_opt_preserved(instance: Instance, perturbation: Perturbation,
                     budget: EnumerationBudget | None = None) -> bool:
    """Recompute the optimum under the perturbed weights and compare edge sets."""
    before = brute_force_opt(instance, budget)
    after = brute_force_opt(apply_perturbation(instance, perturbation), budget)
    return before.unique and after.unique and before.tree == after.tree
