"""Seeded instance generators and certified-stable rejection sampling.

Randomness comes from ``numpy.random.Generator(PCG64(seed))``; the algorithm
name is recorded in every instance's notes so corpora can be traced back.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, replace

import numpy as np

from .errors import DuplicatePoint, SearchExhausted
from .exact import brute_force_opt
from .model import Instance, euclidean_instance, metric_closure
from .stability import StabilityReport, gamma_star
from .stp import write_stp

RNG_ALGORITHM = "numpy.PCG64"
MODELS = ("euclidean", "random-metric")


@dataclass(frozen=True)
class GenSpec:
    model: str
    n: int
    t: int
    seed: int
    target_gamma: float | None = None
    max_tries: int = 10000
    scale: float = 1.0
    dim: int = 2
    edge_prob: float = 1.0  # random-metric only; below 1 the closure does real work

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}, got {self.model!r}")
        if not 2 <= self.t <= self.n:
            raise ValueError(f"need 2 <= t <= n, got t={self.t}, n={self.n}")
        if self.dim < 1:
            raise ValueError("dim must be at least 1")
        if self.target_gamma is not None and not 1 < self.target_gamma < 2:
            raise ValueError(f"target_gamma must lie in (1, 2), got {self.target_gamma}")
        if self.max_tries < 1 or not self.scale > 0:
            raise ValueError("max_tries and scale must be positive")
        if not 0 < self.edge_prob <= 1:
            raise ValueError("edge_prob must lie in (0, 1]")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def rng(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(self.seed))

    def provenance(self) -> str:
        return f"{RNG_ALGORITHM} seed={self.seed} model={self.model} n={self.n} t={self.t}"


def _euclidean_draw(spec: GenSpec, rng) -> Instance:
    flags = [i < spec.t for i in range(spec.n)]
    for _ in range(spec.max_tries):
        pts = rng.uniform(0.0, spec.scale, size=(spec.n, spec.dim))
        try:
            return euclidean_instance(pts, flags)
        except DuplicatePoint:
            continue
    raise DuplicatePoint(f"{spec.max_tries} draws all contained coincident points")


def _metric_draw(spec: GenSpec, rng) -> Instance:
    # weights in [scale/2, scale] are already metric; a sparse draw is closed
    n = spec.n
    w = rng.uniform(spec.scale / 2, spec.scale, size=(n, n))
    keep = rng.random((n, n)) < spec.edge_prob
    edges = [(i, j, w[i, j]) for i in range(n) for j in range(i + 1, n)
             if keep[i, j] or j == i + 1]
    return metric_closure(n, range(spec.t), edges)


def _draw(spec: GenSpec, rng) -> Instance:
    if spec.model == "euclidean":
        return _euclidean_draw(spec, rng)
    return _metric_draw(spec, rng)


def _tag(inst: Instance, spec: GenSpec, extra: str = "") -> Instance:
    note = spec.provenance() + (f" {extra}" if extra else "")
    return inst.replace(name=f"{spec.model}-n{spec.n}-t{spec.t}-s{spec.seed}", notes=(note,))


def random_euclidean(spec: GenSpec) -> Instance:
    """``n`` uniform points in ``[0, scale]^dim``; the first ``t`` are terminals."""
    if spec.model != "euclidean":
        raise ValueError("random_euclidean needs model='euclidean'")
    return _tag(_euclidean_draw(spec, spec.rng()), spec)


def random_metric(spec: GenSpec) -> Instance:
    """Uniform weights in ``[scale/2, scale]`` on a random graph (density
    ``edge_prob``, always containing a Hamiltonian path), then closed."""
    if spec.model != "random-metric":
        raise ValueError("random_metric needs model='random-metric'")
    return _tag(_metric_draw(spec, spec.rng()), spec)


def stable_instance_search(spec: GenSpec) -> tuple[Instance, StabilityReport]:
    """Draw from the base model until ``gamma_star >= target_gamma``."""
    if spec.target_gamma is None:
        raise ValueError("stable_instance_search needs target_gamma")
    rng = spec.rng()
    best = 1.0
    for k in range(spec.max_tries):
        inst = _draw(spec, rng)
        rep = gamma_star(inst)
        if rep.opt_unique and rep.gamma_star >= spec.target_gamma:
            return _tag(inst, spec, f"try={k}"), rep
        best = max(best, rep.gamma_star)
    raise SearchExhausted(spec.max_tries, best)


def _unit(rng, dim):
    while True:
        v = rng.normal(size=dim)
        r = float(np.linalg.norm(v))
        if r > 1e-9:
            return v / r


def planted_points(spec: GenSpec, rng, min_angle: float = math.radians(150),
                   spread: tuple = (1.5, 4.0)) -> np.ndarray:
    """Terminals grown as a wide-angled tree of near-unit edges, plus Steiner
    candidates at ``spread`` times the longest edge from every terminal.

    No optimality is implied; callers certify with the exact oracles.
    """
    dim = max(spec.dim, 1)
    step = spec.scale
    for _ in range(spec.max_tries):
        pts = [np.zeros(dim)]
        dirs = [[]]
        ok = True
        for _i in range(1, spec.t):
            for _attempt in range(50):
                p = int(rng.integers(len(pts)))
                d = _unit(rng, dim)
                if dim > 1 and any(np.dot(d, e) > math.cos(min_angle) for e in dirs[p]):
                    continue
                q = pts[p] + d * step * rng.uniform(1.0, 1.15)
                if all(np.linalg.norm(q - x) > 1.8 * step for j, x in enumerate(pts) if j != p):
                    pts.append(q)
                    dirs[p].append(d)
                    dirs.append([-d])
                    break
            else:
                ok = False
                break
        if not ok:
            continue
        terms = np.array(pts)
        longest = 1.15 * step
        cands = []
        for _j in range(spec.n - spec.t):
            for _attempt in range(200):
                base = terms[int(rng.integers(len(terms)))]
                q = base + _unit(rng, dim) * longest * rng.uniform(*spread)
                if np.min(np.linalg.norm(terms - q, axis=1)) >= spread[0] * longest:
                    cands.append(q)
                    break
            else:
                break
        if len(cands) == spec.n - spec.t:
            return np.vstack([terms] + ([np.array(cands)] if cands else []))
    raise SearchExhausted(spec.max_tries, float("nan"))


def planted_no_steiner(spec: GenSpec) -> Instance:
    """Euclidean instance whose optimum avoids every Steiner vertex, checked by
    the subset brute force, with ``gamma_star >= target_gamma`` when set."""
    if spec.model != "euclidean":
        raise ValueError("planted_no_steiner needs model='euclidean'")
    rng = spec.rng()
    flags = [i < spec.t for i in range(spec.n)]
    best = 1.0
    for k in range(spec.max_tries):
        inst = euclidean_instance(planted_points(replace(spec, max_tries=100), rng), flags)
        opt = brute_force_opt(inst)
        if not opt.unique or opt.tree.vertices() - inst.terminals:
            continue
        if spec.target_gamma is not None:
            g = gamma_star(inst).gamma_star
            best = max(best, g)
            if g < spec.target_gamma:
                continue
        return _tag(inst, spec, f"planted try={k}")
    raise SearchExhausted(spec.max_tries, best)


def gamma_label(target: float | None) -> str:
    return "any" if target is None else f"{target:g}"


def corpus_path(root, spec: GenSpec) -> str:
    return os.path.join(str(root), spec.model, gamma_label(spec.target_gamma), f"{spec.seed}.stp")


def render(spec: GenSpec, inst: Instance, report: StabilityReport | None = None) -> str:
    """STP text for a generated instance with provenance in the Comment section."""
    comment = {"Name": inst.name, "Generator": RNG_ALGORITHM, "Seed": str(spec.seed),
               "Model": spec.model if spec.model != "euclidean" else f"euclidean(dim={spec.dim})"}
    if spec.target_gamma is not None:
        comment["Target"] = f"{spec.target_gamma:.12g}"
    if report is not None:
        comment["GammaStar"] = f"{report.gamma_star:.12g}"
    return write_stp(inst, comment)


def generate(spec: GenSpec, planted: bool = False):
    """The instance a GenSpec denotes, with its certificate if one was sought."""
    if planted:
        inst = planted_no_steiner(spec)
        return inst, (gamma_star(inst) if spec.target_gamma is not None else None)
    if spec.target_gamma is not None:
        return stable_instance_search(spec)
    inst = random_euclidean(spec) if spec.model == "euclidean" else random_metric(spec)
    return inst, None


def write_corpus(specs, root, planted: bool = False) -> list[str]:
    """Write each spec to ``root/<model>/<gamma>/<seed>.stp``; returns the paths."""
    paths = []
    for spec in specs:
        inst, rep = generate(spec, planted)
        path = corpus_path(root, spec)
        os.makedirs(os.path.dirname(path), exist_ok=True)
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(render(spec, inst, rep))
        paths.append(path)
    return paths


def _angle_cap(m, dim):
    # widest pairwise angle m unit vectors in R^dim can all keep (or a safe floor)
    if m <= dim + 1:
        return math.acos(-1.0 / (m - 1)) if m > 1 else math.pi
    if dim == 2:
        return 2 * math.pi / m
    return math.pi / 2 if m <= 2 * dim else math.pi / 3


def _spread_directions(rng, m, dim, min_angle):
    """``m`` random unit vectors with pairwise angles at least ``min_angle``,
    relaxing the angle slowly when rejection keeps failing."""
    for _ in range(500):
        dirs = []
        for _k in range(50 * m):
            d = _unit(rng, dim)
            if all(np.dot(d, e) <= math.cos(min_angle) for e in dirs):
                dirs.append(d)
                if len(dirs) == m:
                    return dirs
        min_angle *= 0.97
    return None


def _hub_sizes(spec: GenSpec, rng):
    hubs = max(1, min(spec.n - spec.t, spec.t // 3))
    sizes = [spec.t // hubs] * hubs
    for i in range(spec.t % hubs):
        sizes[i] += 1
    return sizes


def planted_hub(spec: GenSpec) -> Instance:
    """Steiner hubs, each with a cluster of terminals it serves better than the
    terminals serve each other; leftover vertices are distant Steiner decoys.

    For the Euclidean model the spokes point in well-separated directions; for
    random-metric the intra-cluster distances sit 0.5-10% below the two-spoke
    detour.  Clusters are chained by short terminal links.  Nothing is
    certified here.
    """
    if spec.n - spec.t < 1:
        raise ValueError("planted_hub needs at least one Steiner vertex")
    rng = spec.rng()
    sizes = _hub_sizes(spec, rng)
    hubs = len(sizes)
    decoys = spec.n - spec.t - hubs
    if spec.model == "euclidean":
        dim = max(spec.dim, 2)
        for _ in range(spec.max_tries):
            pts, flags = [], []
            centre = np.zeros(dim)
            ok = True
            for m in sizes:
                dirs = _spread_directions(rng, m, dim, _angle_cap(m, dim) * rng.uniform(0.8, 0.95))
                if dirs is None:
                    ok = False
                    break
                for d in dirs:
                    pts.append(centre + d * spec.scale * rng.uniform(1.0, 1.1))
                    flags.append(True)
                pts.append(centre.copy())
                flags.append(False)
                centre = centre + _unit(rng, dim) * spec.scale * rng.uniform(3.0, 3.4)
            if not ok:
                continue
            span = float(np.ptp(np.array(pts), axis=0).max()) + spec.scale
            for _j in range(decoys):
                pts.append(rng.uniform(-span, 2 * span, size=dim))
                flags.append(False)
            order = sorted(range(len(pts)), key=lambda i: not flags[i])
            try:
                inst = euclidean_instance([pts[i] for i in order], [flags[i] for i in order])
            except DuplicatePoint:
                continue
            return _tag(inst, spec, "hub")
        raise SearchExhausted(spec.max_tries, float("nan"))
    edges = []
    t_ids = iter(range(spec.t))
    s_ids = iter(range(spec.t, spec.n))
    clusters = []
    for m in sizes:
        h = next(s_ids)
        members = [next(t_ids) for _ in range(m)]
        jitter = rng.uniform(0.0, 0.15)
        spokes = {a: spec.scale * rng.uniform(1.0, 1.0 + jitter) for a in members}
        edges += [(h, a, s) for a, s in spokes.items()]
        tight = rng.uniform(0.9, 0.99)
        for i, a in enumerate(members):
            for b in members[i + 1:]:
                edges.append((a, b, (spokes[a] + spokes[b]) * tight * rng.uniform(1.0, 1.005)))
        clusters.append(members)
    for prev, nxt in zip(clusters, clusters[1:]):
        a, b = prev[int(rng.integers(len(prev)))], nxt[int(rng.integers(len(nxt)))]
        edges.append((a, b, spec.scale * rng.uniform(0.9, 1.3)))
    for d in s_ids:
        for v in rng.choice(d, size=min(d, 3), replace=False):
            edges.append((d, int(v), spec.scale * rng.uniform(1.5, 3.0)))
    return _tag(metric_closure(spec.n, range(spec.t), edges), spec, "hub")
