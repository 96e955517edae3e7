"""Regenerate the STP fixtures in this directory.

    python tests/fixtures/build_fixtures.py

Hand-built fixtures are written from literal weights; the corpus comes from
seeded GenSpecs.  Tests read the files, never this script.
"""
import math
import os
import sys

from stablesteiner.generators import GenSpec, planted_hub, write_corpus
from stablesteiner.stability import gamma_star
from stablesteiner.model import Instance, euclidean_instance, metric_closure
from stablesteiner.stp import write_stp_file

HERE = os.path.dirname(os.path.abspath(__file__))


def hand_built():
    out = {}
    out["triangle"] = metric_closure(3, [0, 1, 2], [(0, 1, 1.0), (1, 2, 2.0), (0, 2, 2.9)])
    # three terminals pairwise 2 apart, one Steiner hub 1 from each
    w = [[0, 2, 2, 1], [2, 0, 2, 1], [2, 2, 0, 1], [1, 1, 1, 0]]
    out["star"] = Instance(w, frozenset([0, 1, 2]), metric=True)
    out["two_terminal"] = euclidean_instance([(0, 0), (3, 0)], [1, 1])
    # the only Steiner vertex is far off the segment: gamma* exceeds 2
    out["remote_steiner"] = euclidean_instance([(0, 0), (3, 0), (1.5, 4)], [1, 1, 0])
    h = math.sqrt(3) / 2
    out["fermat"] = euclidean_instance([(0, 0), (1, 0), (0.5, h), (0.5, h / 3)], [1, 1, 1, 0])
    out["path"] = metric_closure(4, [0, 3], [(0, 1, 1.0), (1, 2, 1.5), (2, 3, 2.0)])
    return out


def corpus_specs():
    specs = []
    for seed in range(6):
        specs.append(GenSpec("euclidean", 7, 4, seed))
        specs.append(GenSpec("euclidean", 6, 3, seed, target_gamma=1.2))
        specs.append(GenSpec("euclidean", 8, 4, 100 + seed, target_gamma=1.2, dim=3))
        specs.append(GenSpec("random-metric", 8, 4, seed, edge_prob=0.6))
        specs.append(GenSpec("random-metric", 7, 3, seed, target_gamma=1.2))
    return specs


def planted_specs():
    return [GenSpec("euclidean", n, 4, seed, target_gamma=1.57, dim=dim)
            for seed, (n, dim) in enumerate([(8, 2), (9, 3), (10, 2), (7, 4)])]


def hub_specs():
    """Single-hub metric instances; ``hubs18`` keeps those certified beyond 1.8."""
    return [GenSpec("random-metric", t + 1, t, seed)
            for seed, t in ((s, (12, 13, 14)[s % 3]) for s in range(200))]


def write_hubs():
    d = os.path.join(HERE, "hubs18")
    os.makedirs(d, exist_ok=True)
    for spec in hub_specs():
        inst = planted_hub(spec)
        rep = gamma_star(inst)
        if rep.opt_unique and rep.gamma_star > 1.8:
            write_stp_file(inst, os.path.join(d, f"{spec.seed}.stp"),
                           {"GammaStar": f"{rep.gamma_star:.12g}"})


def main():
    for name, inst in hand_built().items():
        write_stp_file(inst.replace(name=name), os.path.join(HERE, f"{name}.stp"))
    write_corpus(corpus_specs(), os.path.join(HERE, "corpus"))
    paths = write_corpus(planted_specs(), os.path.join(HERE, "corpus"), planted=True)
    write_hubs()
    with open(paths[0]) as src, open(os.path.join(HERE, "planted.stp"), "w", newline="\n") as dst:
        dst.write(src.read())


if __name__ == "__main__":
    sys.exit(main())
