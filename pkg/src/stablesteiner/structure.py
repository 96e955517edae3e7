"""Executable checks of the structural properties of stable optimal trees.

Each ``check_*`` function takes an instance, its optimal tree and a stability
level ``gamma`` and returns a :class:`LemmaReport`.  A checker whose
preconditions do not hold returns ``applicable=False`` and no violations.

Every violation is reported as ``lhs < rhs`` (or ``<=``) that should have held
and did not, so ``slack = rhs - lhs`` is never positive on a violation.
Membership statements ("edge ca is in OPT") are checked in contrapositive form:
an edge missing from OPT must fail the triggering inequality.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

import numpy as np

from .errors import MissingCoordinates, PreconditionViolated, ThetaOutOfRange
from .model import Instance, SteinerTree, edge

GOLDEN = (1 + math.sqrt(5)) / 2
FAN_GAMMA = 1.755
TIE_TOL = 1e-12


class Violation(NamedTuple):
    items: tuple
    lhs: float
    rhs: float
    slack: float
    detail: str = ""


@dataclass
class LemmaReport:
    lemma_id: str
    gamma: float | None
    applicable: bool = True
    violations: list = field(default_factory=list)
    note: str = ""

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, items, lhs, rhs, detail=""):
        self.violations.append(Violation(tuple(items), float(lhs), float(rhs),
                                         float(rhs) - float(lhs), detail))

    def lines(self) -> list[str]:
        """One tab-separated line per violation: lemma, gamma, tuple, lhs, rhs, slack."""
        g = "-" if self.gamma is None else f"{self.gamma:.12g}"
        out = []
        for v in self.violations:
            tup = "(" + ",".join(str(x) for x in v.items) + ")"
            out.append(f"{self.lemma_id}\t{g}\t{tup}\t{v.lhs:.12g}\t{v.rhs:.12g}\t{v.slack:.12g}")
        return out


def _not_applicable(lemma_id, gamma, note):
    return LemmaReport(lemma_id, gamma, applicable=False, note=note)


def _steiner_in(instance: Instance, tree: SteinerTree):
    return [v for v in sorted(tree.vertices()) if v not in instance.terminals]


# -- general metrics ----------------------------------------------------------

def degree_lower_bound(gamma: float) -> float:
    return 2.0 / (2.0 - gamma)


def check_steiner_degree_lower(instance: Instance, opt: SteinerTree, gamma: float) -> LemmaReport:
    """Every Steiner vertex of OPT has degree above ``2 / (2 - gamma)``."""
    lid = "steiner_degree_lower"
    if not 1 < gamma < 2:
        return _not_applicable(lid, gamma, "needs 1 < gamma < 2")
    rep = LemmaReport(lid, gamma)
    thr = degree_lower_bound(gamma)
    for s in _steiner_in(instance, opt):
        deg = opt.degree(s)
        if not thr < deg:
            rep.add((s,), thr, deg)
    return rep


def check_nearest_neighbor_edge(instance: Instance, opt: SteinerTree) -> LemmaReport:
    """Mutual unique nearest neighbours within V(OPT) are joined in OPT.

    A violation reports the closest competing distance (lhs) against the
    pair's own distance (rhs).
    """
    rep = LemmaReport("nearest_neighbor", None)
    verts = sorted(opt.vertices())
    if len(verts) < 3:
        return rep
    w = instance.weights
    nearest = {}
    for a in verts:
        dists = sorted((w[a, b], b) for b in verts if b != a)
        if dists[0][0] < dists[1][0]:
            nearest[a] = dists[0][1]
    for a, b in nearest.items():
        if a < b and nearest.get(b) == a and edge(a, b) not in opt.edges:
            competitor = min(w[x, y] for x in (a, b) for y in verts if y not in (a, b))
            rep.add((a, b), competitor, w[a, b])
    return rep


def _two_paths(tree: SteinerTree):
    for b, nb in sorted(tree.adjacency().items()):
        for a, c in itertools.combinations(sorted(nb), 2):
            yield a, b, c


def check_adjacent_edge_props(instance: Instance, opt: SteinerTree, gamma: float) -> LemmaReport:
    """For adjacent OPT edges ab, bc:

    1. ``w_ac > gamma * max(w_ab, w_bc)``
    2. ``(2 / gamma) * w_ac > w_ab + w_bc``
    3. ``(gamma - 1) * w_ab < w_bc`` and ``(gamma - 1) * w_bc < w_ab``

    Part 3 relies on the triangle inequality and is skipped for non-metric
    instances.
    """
    lid = "adjacent_edges"
    if not gamma > 1:
        return _not_applicable(lid, gamma, "needs gamma > 1")
    rep = LemmaReport(lid, gamma)
    w = instance.weights
    for a, b, c in _two_paths(opt):
        ab, bc, ac = w[a, b], w[b, c], w[a, c]
        checks = [("1", gamma * max(ab, bc), ac), ("2", ab + bc, (2 / gamma) * ac)]
        if instance.metric:
            checks += [("3a", (gamma - 1) * ab, bc), ("3b", (gamma - 1) * bc, ab)]
        for part, lhs, rhs in checks:
            if not lhs < rhs:
                rep.add((a, b, c), lhs, rhs, part)
    return rep


def _oriented_edges(tree: SteinerTree):
    for u, v in sorted(tree.edges):
        yield u, v
        yield v, u


def check_close_lemma(instance: Instance, opt: SteinerTree, gamma: float) -> LemmaReport:
    """With H = {ab}: any c in V(OPT) with ``w_ca <= gamma (gamma - 1) w_ab`` has ca in OPT."""
    lid = "close"
    if not gamma > 1:
        return _not_applicable(lid, gamma, "needs gamma > 1")
    rep = LemmaReport(lid, gamma)
    w = instance.weights
    factor = gamma * (gamma - 1)
    verts = sorted(opt.vertices())
    for a, b in _oriented_edges(opt):
        for c in verts:
            if c in (a, b) or edge(c, a) in opt.edges:
                continue
            if not factor * w[a, b] < w[c, a]:
                rep.add((a, b, c), factor * w[a, b], w[c, a])
    return rep


def check_far_lemma(instance: Instance, opt: SteinerTree, gamma: float) -> LemmaReport:
    """For gamma above the golden ratio: ``w_ca >= gamma w_ab`` (ab in OPT) rules out ca."""
    lid = "far"
    if not gamma > GOLDEN:
        return _not_applicable(lid, gamma, "needs gamma > (1 + sqrt 5) / 2")
    rep = LemmaReport(lid, gamma)
    w = instance.weights
    adj = opt.adjacency()
    for a, b in _oriented_edges(opt):
        for c in adj[a]:
            if c != b and not w[c, a] < gamma * w[a, b]:
                rep.add((a, b, c), w[c, a], gamma * w[a, b])
    return rep


def close2_applicable(gamma: float) -> bool:
    return gamma * (gamma - 1) ** 2 > 1


def check_close2_iff(instance: Instance, opt: SteinerTree, gamma: float) -> LemmaReport:
    """When gamma (gamma - 1)^2 > 1: ``w_ca < w_ab / (gamma - 1)`` iff ca in OPT."""
    lid = "close2_iff"
    if not close2_applicable(gamma):
        return _not_applicable(lid, gamma, "needs gamma (gamma - 1)^2 > 1")
    rep = LemmaReport(lid, gamma)
    w = instance.weights
    verts = sorted(opt.vertices())
    for a, b in _oriented_edges(opt):
        bound = w[a, b] / (gamma - 1)
        for c in verts:
            if c in (a, b):
                continue
            if edge(c, a) in opt.edges:
                if not w[c, a] < bound:
                    rep.add((a, b, c), w[c, a], bound, "member-but-far")
            elif not bound <= w[c, a]:
                rep.add((a, b, c), bound, w[c, a], "close-but-missing")
    return rep


# -- fans -----------------------------------------------------------------------

class Fan(NamedTuple):
    center: int
    leaves: tuple
    weights: tuple

    @property
    def m(self) -> int:
        return len(self.leaves)

    def average(self, convention: str = "m-1") -> float:
        """``sum / (m - 1)`` (``"m-1"``) or ``sum / m`` (``"m"``)."""
        total = math.fsum(self.weights)
        return total / (self.m - 1) if convention == "m-1" else total / self.m

    def within_factor(self, gamma: float) -> bool:
        return max(self.weights) <= min(self.weights) / (gamma - 1)

    def edges(self) -> frozenset:
        return frozenset(edge(self.center, b) for b in self.leaves)


def terminal_components(instance: Instance, forest: Iterable) -> list[frozenset]:
    """Components of ``forest`` plus singleton terminals it does not touch."""
    parent = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in forest:
        parent[find(u)] = find(v)
    groups = {}
    for v in list(parent):
        groups.setdefault(find(v), set()).add(v)
    comps = [frozenset(g) for g in groups.values()]
    covered = set(parent)
    comps += [frozenset([t]) for t in instance.terminal_list if t not in covered]
    return sorted(comps, key=min)


def enumerate_fans(instance: Instance, comps: list[frozenset], terminal_leaves: bool = False):
    """All terminal component fans: a Steiner centre outside every component
    joined to one vertex in each of at least two distinct components."""
    used = set().union(*comps) if comps else set()
    w = instance.weights
    options = []
    for comp in comps:
        reps = sorted(v for v in comp if v in instance.terminals) if terminal_leaves else sorted(comp)
        options.append([None] + reps)
    for a in instance.steiner_list:
        if a in used:
            continue
        for choice in itertools.product(*options):
            leaves = tuple(b for b in choice if b is not None)
            if len(leaves) >= 2:
                yield Fan(a, leaves, tuple(float(w[a, b]) for b in leaves))


def _inter_component_min(instance: Instance, comps) -> float:
    owner = {v: i for i, c in enumerate(comps) for v in c}
    w = instance.weights
    best = math.inf
    for u, v in itertools.combinations(sorted(owner), 2):
        if owner[u] != owner[v] and w[u, v] < best:
            best = float(w[u, v])
    return best


def check_fan_lemma(instance: Instance, opt: SteinerTree, gamma: float,
                    forest: Iterable = (), average: str = "m-1") -> LemmaReport:
    """A fan meeting all three hypotheses relative to ``forest`` lies in OPT.

    Hypotheses: its average weight is below every edge joining two terminal
    components, it has minimum average weight among all fans, and its edge
    weights are within a factor ``1 / (gamma - 1)`` of each other.
    ``average`` picks the averaging convention for the first two tests;
    violation details record both values.
    """
    lid = "fan"
    forest = frozenset(edge(u, v) for u, v in forest)
    if not gamma > FAN_GAMMA:
        return _not_applicable(lid, gamma, f"needs gamma > {FAN_GAMMA}")
    for u, v in opt.edges:
        if u not in instance.terminals and v not in instance.terminals:
            raise PreconditionViolated(f"Steiner vertices {u} and {v} are adjacent in OPT")
    if not forest <= opt.edges:
        raise ValueError("forest must be a subgraph of opt")
    rep = LemmaReport(lid, gamma)
    comps = terminal_components(instance, forest)
    fans = list(enumerate_fans(instance, comps))
    if not fans:
        return rep
    cut = _inter_component_min(instance, comps)
    best = min(f.average(average) for f in fans)
    for f in fans:
        avg = f.average(average)
        if avg > best * (1 + TIE_TOL) or not avg < cut or not f.within_factor(gamma):
            continue
        if not f.edges() <= opt.edges:
            rep.add((f.center,) + f.leaves, cut, avg,
                    f"avg_m-1={f.average('m-1'):.12g} avg_m={f.average('m'):.12g}")
    return rep


# -- Euclidean ------------------------------------------------------------------

def angle_threshold(gamma: float) -> float:
    """``2 asin(gamma / 2)``: the smallest angle two OPT neighbours of a Steiner
    vertex may subtend."""
    return 2.0 * math.asin(gamma / 2.0)


def angle_at(coords: np.ndarray, a: int, s: int, b: int) -> float:
    u = coords[a] - coords[s]
    v = coords[b] - coords[s]
    cos = float(np.dot(u, v) / (np.linalg.norm(u) * np.linalg.norm(v)))
    return math.acos(min(1.0, max(-1.0, cos)))


def check_angle_lower(instance: Instance, opt: SteinerTree, gamma: float,
                      strict: bool = False) -> LemmaReport:
    """Terminal neighbours of a Steiner vertex subtend more than ``2 asin(gamma / 2)``.

    ``strict=True`` checks every pair of tree neighbours, not only terminals.
    """
    lid = "angle_lower"
    if instance.coords is None or not instance.euclidean:
        raise MissingCoordinates("angle checks need a Euclidean instance")
    if not 1 < gamma < 2:
        return _not_applicable(lid, gamma, "needs 1 < gamma < 2")
    rep = LemmaReport(lid, gamma)
    thr = angle_threshold(gamma)
    adj = opt.adjacency()
    for s in _steiner_in(instance, opt):
        nb = [x for x in adj[s] if strict or x in instance.terminals]
        for a, b in itertools.combinations(sorted(nb), 2):
            ang = angle_at(instance.coords, a, s, b)
            if not thr < ang:
                rep.add((a, s, b), thr, ang)
    return rep


def max_packing_count(theta: float) -> int:
    """``floor(-1 / cos theta)`` for ``pi/2 < theta <= pi``, the packing bound as
    usually stated.  See :func:`gram_packing_bound` for the tight count."""
    if not math.pi / 2 < theta <= math.pi:
        raise ThetaOutOfRange(f"theta must lie in (pi/2, pi], got {theta}")
    return int(math.floor(-1.0 / math.cos(theta) + 1e-9))


def gram_packing_bound(theta: float) -> int:
    """Largest N allowed by ``||sum v_i||^2 >= 0``: ``floor(1 - 1 / cos theta)``.

    Attained by the regular simplex: ``d + 1`` unit vectors with pairwise
    cosine ``-1/d``.
    """
    if not math.pi / 2 < theta <= math.pi:
        raise ThetaOutOfRange(f"theta must lie in (pi/2, pi], got {theta}")
    return int(math.floor(1.0 - 1.0 / math.cos(theta) + 1e-9))


def degree_upper_bound(gamma: float) -> float:
    return -2.0 / (2.0 - gamma * gamma)


def check_steiner_degree_upper(instance: Instance, opt: SteinerTree, gamma: float) -> LemmaReport:
    """For gamma > sqrt 2 a Steiner vertex of OPT has degree at most ``-2 / (2 - gamma^2)``."""
    lid = "steiner_degree_upper"
    if not instance.euclidean:
        return _not_applicable(lid, gamma, "needs a Euclidean instance")
    if not gamma > math.sqrt(2):
        return _not_applicable(lid, gamma, "needs gamma > sqrt 2")
    rep = LemmaReport(lid, gamma)
    thr = degree_upper_bound(gamma)
    for s in _steiner_in(instance, opt):
        deg = opt.degree(s)
        if not deg <= thr:
            rep.add((s,), deg, thr)
    return rep


def no_steiner_threshold() -> float:
    """Where ``2 / (2 - g)`` and ``2 / (g^2 - 2)`` cross: ``(sqrt 17 - 1) / 2``."""
    return (math.sqrt(17.0) - 1.0) / 2.0


def steiner_ratio(instance: Instance, budget=None) -> float:
    """Weight of the terminal MST over the weight of the exact optimum."""
    from .exact import brute_force_opt
    from .model import tree_weight
    from .solvers import mst_terminals

    opt = brute_force_opt(instance, budget)
    return tree_weight(instance, mst_terminals(instance)) / opt.weight


# -- dispatch -------------------------------------------------------------------

LEMMAS = ("degree-lower", "nn", "basicprop", "close", "far", "close2", "fan",
          "angle", "degree-upper")


def default_forests(opt: SteinerTree) -> list[frozenset]:
    """Empty forest, every single OPT edge, and OPT minus each edge."""
    edges = sorted(opt.edges)
    out = [frozenset()]
    out += [frozenset([e]) for e in edges]
    if len(edges) > 2:
        out += [frozenset(edges) - {e} for e in edges]
    return out


def run_checkers(instance: Instance, opt: SteinerTree, gamma: float,
                 lemmas: Iterable[str] | None = None, forests=None) -> list[LemmaReport]:
    """Run the selected checkers (all by default) and return one report each."""
    chosen = list(LEMMAS if lemmas is None else lemmas)
    unknown = set(chosen) - set(LEMMAS)
    if unknown:
        raise ValueError(f"unknown lemma names: {sorted(unknown)}")
    out = []
    for name in chosen:
        if name == "degree-lower":
            out.append(check_steiner_degree_lower(instance, opt, gamma))
        elif name == "nn":
            out.append(check_nearest_neighbor_edge(instance, opt))
        elif name == "basicprop":
            out.append(check_adjacent_edge_props(instance, opt, gamma))
        elif name == "close":
            out.append(check_close_lemma(instance, opt, gamma))
        elif name == "far":
            out.append(check_far_lemma(instance, opt, gamma))
        elif name == "close2":
            out.append(check_close2_iff(instance, opt, gamma))
        elif name == "fan":
            out.append(_run_fan(instance, opt, gamma, forests))
        elif name == "angle":
            if instance.coords is None or not instance.euclidean:
                out.append(_not_applicable("angle_lower", gamma, "needs a Euclidean instance"))
            else:
                out.append(check_angle_lower(instance, opt, gamma))
        elif name == "degree-upper":
            out.append(check_steiner_degree_upper(instance, opt, gamma))
    return out


def _run_fan(instance, opt, gamma, forests):
    merged = LemmaReport("fan", gamma)
    try:
        for forest in (default_forests(opt) if forests is None else forests):
            rep = check_fan_lemma(instance, opt, gamma, forest)
            if not rep.applicable:
                return rep
            merged.violations.extend(rep.violations)
    except PreconditionViolated as exc:
        return _not_applicable("fan", gamma, str(exc))
    return merged
