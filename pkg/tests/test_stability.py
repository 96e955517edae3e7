import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stablesteiner.errors import MultiplierOutOfRange, SameTree
from stablesteiner.exact import EnumerationBudget, brute_force_opt, enumerate_canonical_trees
from stablesteiner.generators import GenSpec, random_euclidean, random_metric
from stablesteiner.model import SteinerTree, tree_weight
from stablesteiner.stability import (Perturbation, apply_perturbation, certify, gamma_star,
                                     is_opt_preserved, margin, rival_ratio,
                                     worst_case_perturbation)
from stablesteiner.stp import read_stp


def test_perturbation_bounds():
    with pytest.raises(MultiplierOutOfRange):
        Perturbation(1.0)
    with pytest.raises(MultiplierOutOfRange):
        Perturbation(1.5, {(0, 1): 1.6})
    with pytest.raises(MultiplierOutOfRange):
        Perturbation(1.5, {(0, 1): 0.9})
    p = Perturbation(1.5, {(2, 0): 1.2})
    assert p.multiplier(0, 2) == 1.2 and p.multiplier(1, 2) == 1.0


def test_apply_perturbation_drops_claims(fixture_path):
    inst = read_stp(fixture_path("fermat.stp"))
    out = apply_perturbation(inst, Perturbation(1.5, {(0, 1): 1.5}))
    assert out.w(0, 1) == pytest.approx(1.5)
    assert not out.metric and not out.euclidean
    with pytest.raises(MultiplierOutOfRange):
        apply_perturbation(inst, Perturbation(1.5, {(0, 9): 1.2}))


def test_worst_case_needs_distinct_trees():
    t = SteinerTree.of([(0, 1)])
    with pytest.raises(SameTree):
        worst_case_perturbation(None, t, t, 1.5)


@pytest.mark.parametrize("name,want", [("triangle.stp", 1.45), ("star.stp", 4 / 3)])
def test_fixture_gamma_star(fixture_path, name, want):
    inst = read_stp(fixture_path(name))
    for method in ("parametric", "enumerate"):
        rep = gamma_star(inst, method=method)
        assert rep.gamma_star == pytest.approx(want, abs=1e-12)
        assert rep.opt_unique and rep.exhaustive


def test_two_terminals_without_rivals(fixture_path):
    rep = gamma_star(read_stp(fixture_path("two_terminal.stp")))
    assert rep.gamma_star == math.inf and rep.witness is None


def test_remote_steiner_exceeds_two(fixture_path):
    inst = read_stp(fixture_path("remote_steiner.stp"))
    want = 2 * math.hypot(1.5, 4) / 3
    assert gamma_star(inst).gamma_star == pytest.approx(want, rel=1e-12)
    assert gamma_star(inst, method="enumerate").gamma_star == pytest.approx(want, rel=1e-12)


def test_closure_ties_are_not_stable(fixture_path):
    rep = gamma_star(read_stp(fixture_path("path.stp")))
    assert rep.gamma_star == 1.0 and not rep.opt_unique


def _pool():
    out = []
    for seed in range(30):
        out.append(random_metric(GenSpec("random-metric", 4 + seed % 4, 2 + seed % 3, seed)))
        out.append(random_euclidean(GenSpec("euclidean", 4 + seed % 3, 2 + seed % 3, seed,
                                            dim=2 + seed % 2)))
    return out


@pytest.mark.parametrize("inst", _pool(), ids=lambda i: i.name or repr(i))
def test_parametric_agrees_with_enumeration(inst):
    a = gamma_star(inst, method="parametric")
    b = gamma_star(inst, method="enumerate")
    assert a.opt_unique == b.opt_unique
    if a.opt_unique:
        assert a.opt == b.opt
        assert a.gamma_star == pytest.approx(b.gamma_star, rel=1e-12)
        assert rival_ratio(inst, a.opt, a.witness) == pytest.approx(a.gamma_star, rel=1e-12)


def test_truncated_enumeration_reports_it():
    inst = random_metric(GenSpec("random-metric", 7, 3, 1))
    rep = gamma_star(inst, EnumerationBudget(max_trees=5), method="enumerate")
    assert not rep.exhaustive
    assert rep.gamma_star >= gamma_star(inst).gamma_star


def test_unknown_method():
    inst = random_metric(GenSpec("random-metric", 4, 2, 0))
    with pytest.raises(ValueError):
        gamma_star(inst, method="magic")


def test_certify_triangle(fixture_path):
    inst = read_stp(fixture_path("triangle.stp"))
    stable, witness = certify(inst, 1.4)
    assert stable and witness is None
    stable, witness = certify(inst, 1.5)
    assert not stable and witness == SteinerTree.of([(0, 1), (0, 2)])
    with pytest.raises(ValueError):
        certify(inst, 1.0)


def test_witness_wins_under_the_worst_perturbation(fixture_path):
    inst = read_stp(fixture_path("star.stp"))
    cert = certify(inst, 1.4)
    opt = cert.report.opt
    p = worst_case_perturbation(inst, opt, cert.witness, 1.4)
    assert margin(inst, opt, cert.witness, p) < 0
    assert not is_opt_preserved(inst, p)


@pytest.mark.parametrize("seed", range(10))
def test_opt_preserved_just_below_gamma_star(seed):
    inst = random_euclidean(GenSpec("euclidean", 5, 3, 50 + seed))
    rep = gamma_star(inst)
    if not rep.opt_unique or rep.witness is None:
        pytest.skip("tied or rival-free draw")
    below = 1 + (rep.gamma_star - 1) * 0.99
    above = rep.gamma_star * 1.01
    if below > 1:
        p = worst_case_perturbation(inst, rep.opt, rep.witness, below)
        assert is_opt_preserved(inst, p)
    p = worst_case_perturbation(inst, rep.opt, rep.witness, above)
    assert not is_opt_preserved(inst, p)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 5000))
def test_gamma_star_at_most_two_on_narrow_weights(seed):
    # weights lie within a factor 2 and swapping one OPT edge is always a rival
    inst = random_metric(GenSpec("random-metric", 5, 3, seed))
    rep = gamma_star(inst)
    assert rep.gamma_star <= 2.0 + 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 5000), st.floats(1.01, 2.0))
def test_worst_case_margin_is_minimal(seed, g):
    inst = random_metric(GenSpec("random-metric", 5, 3, seed))
    opt = brute_force_opt(inst).tree
    rng = np.random.default_rng(seed)
    rivals = [t for t in enumerate_canonical_trees(inst) if t != opt]
    rival = rivals[rng.integers(len(rivals))]
    worst = margin(inst, opt, rival, worst_case_perturbation(inst, opt, rival, g))
    mult = {(u, v): rng.uniform(1, g) for u in range(5) for v in range(u + 1, 5)}
    assert worst <= margin(inst, opt, rival, Perturbation(g, mult)) + 1e-12
    base = tree_weight(inst, rival) - tree_weight(inst, opt)
    assert worst <= base
