import os

import pytest

from stablesteiner.errors import SearchExhausted
from stablesteiner.exact import brute_force_opt
from stablesteiner.generators import (GenSpec, corpus_path, generate, planted_hub,
                                      planted_no_steiner, random_euclidean, random_metric, render,
                                      stable_instance_search, write_corpus)
from stablesteiner.model import validate
from stablesteiner.stability import gamma_star
from stablesteiner.stp import parse_stp, write_stp


@pytest.mark.parametrize("kw", [
    dict(model="grid"), dict(t=1), dict(t=9), dict(dim=0), dict(target_gamma=2.0),
    dict(target_gamma=1.0), dict(max_tries=0), dict(scale=0.0), dict(edge_prob=0.0),
    dict(seed=-1),
])
def test_genspec_rejects(kw):
    base = dict(model="euclidean", n=6, t=3, seed=0)
    base.update(kw)
    with pytest.raises(ValueError):
        GenSpec(**base)


@pytest.mark.parametrize("model", ["euclidean", "random-metric"])
def test_draws_are_deterministic_and_valid(model):
    for seed in range(20):
        spec = GenSpec(model, 4 + seed % 5, 2 + seed % 3, seed, edge_prob=(1.0, 0.4)[seed % 2],
                       dim=1 + seed % 4)
        draw = random_euclidean if model == "euclidean" else random_metric
        a, b = draw(spec), draw(spec)
        assert write_stp(a) == write_stp(b)
        assert validate(a).ok and a.metric
        assert len(a.terminals) == spec.t and a.n == spec.n


def test_model_mismatch():
    with pytest.raises(ValueError):
        random_metric(GenSpec("euclidean", 5, 2, 0))
    with pytest.raises(ValueError):
        planted_no_steiner(GenSpec("random-metric", 5, 2, 0))
    with pytest.raises(ValueError):
        stable_instance_search(GenSpec("euclidean", 5, 2, 0))


def test_scale():
    a = random_euclidean(GenSpec("euclidean", 5, 2, 3))
    b = random_euclidean(GenSpec("euclidean", 5, 2, 3, scale=2.5))
    assert b.isclose(a.scaled(2.5), 1e-12)


def test_search_exhausted_reports_best():
    spec = GenSpec("random-metric", 6, 3, 0, target_gamma=1.99, max_tries=20)
    with pytest.raises(SearchExhausted) as info:
        stable_instance_search(spec)
    assert info.value.tries == 20 and 1 <= info.value.best_gamma < 1.99


@pytest.mark.parametrize("seed", range(6))
def test_certificate_recomputes(seed):
    spec = GenSpec(("euclidean", "random-metric")[seed % 2], 6, 3, seed, target_gamma=1.2)
    inst, rep = stable_instance_search(spec)
    again = gamma_star(parse_stp(render(spec, inst, rep)))
    assert again.gamma_star >= 1.2
    assert again.gamma_star == pytest.approx(rep.gamma_star, rel=1e-9)
    assert f"{rep.gamma_star:.12g}" in render(spec, inst, rep)


@pytest.mark.parametrize("seed", range(6))
def test_planted_no_steiner(seed):
    spec = GenSpec("euclidean", 7, 2 + seed % 4, seed, target_gamma=1.6, dim=2 + seed % 2)
    inst = planted_no_steiner(spec)
    opt = brute_force_opt(inst)
    assert opt.unique and opt.tree.vertices() == set(inst.terminals)
    assert gamma_star(inst).gamma_star >= 1.6


@pytest.mark.parametrize("model", ["euclidean", "random-metric"])
def test_planted_hub_is_valid(model):
    for seed in range(5):
        inst = planted_hub(GenSpec(model, 8, 6, seed, dim=2))
        assert validate(inst).ok and inst.metric
        assert planted_hub(GenSpec(model, 8, 6, seed, dim=2)).isclose(inst, 0)


def test_corpus_layout_and_determinism(tmp_path):
    specs = [GenSpec("euclidean", 6, 3, s, target_gamma=1.2) for s in range(3)]
    specs.append(GenSpec("random-metric", 5, 2, 0))
    a = write_corpus(specs, tmp_path / "a")
    b = write_corpus(specs, tmp_path / "b")
    assert [os.path.relpath(p, tmp_path / "a") for p in a] == [
        os.path.join("euclidean", "1.2", "0.stp"), os.path.join("euclidean", "1.2", "1.stp"),
        os.path.join("euclidean", "1.2", "2.stp"), os.path.join("random-metric", "any", "0.stp")]
    for p, q in zip(a, b):
        assert open(p, "rb").read() == open(q, "rb").read()
    assert corpus_path("root", specs[0]) == os.path.join("root", "euclidean", "1.2", "0.stp")
    inst, rep = generate(specs[-1])
    assert rep is None and "Seed" in render(specs[-1], inst)
