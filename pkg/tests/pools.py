"""Seeded instance pools shared by the sweeps.  Everything here is deterministic."""
from __future__ import annotations

import math

import numpy as np
from functools import lru_cache

from stablesteiner.errors import SearchExhausted
from stablesteiner.exact import brute_force_opt
from stablesteiner.generators import (GenSpec, planted_hub, planted_no_steiner, planted_points,
                                      random_euclidean, random_metric, stable_instance_search)
from stablesteiner.model import euclidean_instance
from stablesteiner.stability import gamma_star
from stablesteiner.structure import no_steiner_threshold

SWEEP_GAMMAS = (1.2, 1.4, 1.63, 1.76, 1.8)


def random_metric_pool(count, n_max=8, t_max=4, seed0=0):
    out = []
    for k in range(count):
        n = 4 + k % (n_max - 3)
        t = 2 + k % (min(t_max, n) - 1)
        out.append(random_metric(GenSpec("random-metric", n, t, seed0 + k)))
    return out


def random_euclidean_pool(count, n=6, t=4, seed0=0, dims=(2,)):
    return [random_euclidean(GenSpec("euclidean", n, t, seed0 + k, dim=dims[k % len(dims)]))
            for k in range(count)]


def high_margin_euclidean(count):
    """Euclidean instances with certified gamma* at or above the no-Steiner
    threshold, drawn without looking at where OPT puts its Steiner vertices.

    Two unbiased sources: rejection from uniform points (few terminals) and
    the wide-angled terminal trees of ``planted_points`` with decoys allowed
    close in.  Returns ``(instance, report)`` pairs.
    """
    thr = no_steiner_threshold()
    out = []
    k = 0
    while len(out) < count:
        dim = 2 + k % 3
        if k % 2 == 0:
            t = 2 + (k // 2) % 2
            spec = GenSpec("euclidean", t + 2 + (k // 4) % 4, t, 1000 + k, target_gamma=thr, dim=dim,
                           max_tries=2000)
            try:
                out.append(stable_instance_search(spec))
            except SearchExhausted:
                pass
        else:
            n = 6 + k % 4
            spec = GenSpec("euclidean", n, 4 + k % 2, 2000 + k, dim=dim, max_tries=200)
            rng = spec.rng()
            pts = planted_points(spec, rng, min_angle=math.radians(rng.uniform(100, 160)),
                                 spread=(0.3, 3.0))
            inst = euclidean_instance(pts, [i < spec.t for i in range(n)])
            rep = gamma_star(inst)
            if rep.opt_unique and rep.gamma_star >= thr:
                out.append((inst, rep))
        k += 1
    return out


@lru_cache(maxsize=None)
def sweep_pool():
    """Certified instances for the lemma sweep, both families, with Steiner-using
    optima at every sweep gamma.  Returns ``(family, instance, gamma*, opt)``."""
    insts = []
    for seed in range(120):
        insts.append(("metric", stable_instance_search(
            GenSpec("random-metric", 5 + seed % 3, 3 + seed % 2, seed, target_gamma=1.2))[0]))
        insts.append(("euclidean", stable_instance_search(
            GenSpec("euclidean", 5 + seed % 2, 3, seed, target_gamma=1.2, dim=2 + seed % 3))[0]))
    for seed in range(120):
        t = (6, 8, 12, 13)[seed % 4]
        insts.append(("metric", planted_hub(GenSpec("random-metric", t + 1 + (seed % 8 == 1), t, seed))))
    for seed in range(60):
        t = 3 + seed % 3
        insts.append(("euclidean", planted_hub(GenSpec("euclidean", t + 1 + seed % 2, t, seed,
                                                       dim=2 + seed % 3))))
    for seed in range(120):
        insts.append(("euclidean", planted_no_steiner(
            GenSpec("euclidean", 6 + seed % 3, 3 + seed % 3, seed, dim=2 + seed % 3))))
    out = []
    for family, inst in insts:
        rep = gamma_star(inst)
        if not rep.opt_unique:
            continue
        opt = brute_force_opt(inst)
        out.append((family, inst, rep.gamma_star, opt.tree))
    return tuple(out)


def sweep_pairs():
    for family, inst, g_star, opt in sweep_pool():
        for g in SWEEP_GAMMAS:
            if g < g_star:
                yield family, inst, g, opt


def _chain_points(rng, gamma):
    # a near-isosceles terminal triangle plus a nearly straight chain of growing
    # edges off one leg; the weight skew is what lets a (1 + eps) oracle pick a
    # non-optimal tree.  Adjacent edges must stay within a factor 1/(gamma-1).
    apex = rng.uniform(gamma + 0.02, gamma + 0.15)
    th = 2 * math.asin(min(apex / 2, 0.999))
    a = rng.uniform(0, 2 * math.pi)
    pts = [np.zeros(2), np.array([math.cos(a), math.sin(a)]),
           np.array([math.cos(a + th), math.sin(a + th)])]
    d = pts[1] / np.linalg.norm(pts[1])
    cap = min(2.3, 0.95 / (gamma - 1))
    length = rng.uniform(1.2, min(1.8, cap))
    p = pts[1]
    for _ in range(4 + int(rng.integers(2))):
        ang = rng.uniform(-0.15, 0.15)
        rot = np.array([[math.cos(ang), -math.sin(ang)], [math.sin(ang), math.cos(ang)]])
        d = rot @ d
        p = p + length * d
        pts.append(p)
        length *= rng.uniform(0.85 * cap, cap)
    t = len(pts)
    if rng.random() < 0.4:
        pts.append(rng.uniform(-3, 3, size=2) * length / 4)
    return pts, t


def skewed_stable(seed, gamma):
    """A certified gamma-stable Euclidean instance with strongly skewed edge
    weights, found by seeded rejection."""
    rng = np.random.default_rng([seed, int(gamma * 1000)])
    while True:
        pts, t = _chain_points(rng, gamma)
        inst = euclidean_instance(pts, [i < t for i in range(len(pts))])
        rep = gamma_star(inst)
        if rep.opt_unique and rep.gamma_star > gamma:
            return inst
