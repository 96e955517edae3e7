import math

import numpy as np
import pytest

from stablesteiner.errors import MissingCoordinates, PreconditionViolated, ThetaOutOfRange
from stablesteiner.exact import brute_force_opt
from stablesteiner.model import Instance, SteinerTree, euclidean_instance
from stablesteiner.stability import gamma_star
from stablesteiner.stp import read_stp
from stablesteiner.structure import (FAN_GAMMA, LEMMAS, angle_threshold, check_angle_lower,
                                     check_fan_lemma, check_nearest_neighbor_edge,
                                     check_steiner_degree_lower, check_steiner_degree_upper,
                                     degree_lower_bound, degree_upper_bound, gram_packing_bound,
                                     max_packing_count, no_steiner_threshold, run_checkers,
                                     steiner_ratio)


def _lens():
    # two terminals 1.1 apart, a Steiner vertex at distance 1 from both
    return euclidean_instance([(0, 0), (1.1, 0), (0.55, math.sqrt(1 - 0.55 ** 2))], [1, 1, 0])


def test_constants():
    g = no_steiner_threshold()
    # the two degree bounds cross exactly at the threshold
    assert degree_lower_bound(g) == pytest.approx(degree_upper_bound(g), rel=1e-12)
    assert degree_lower_bound(1.6) > degree_upper_bound(1.6)
    assert angle_threshold(1.0) == pytest.approx(math.pi / 3)


def test_fan_average_conventions_disagree_on_the_lens():
    inst = _lens()
    rep = gamma_star(inst)
    assert rep.gamma_star == pytest.approx(2 / 1.1)
    opt = rep.opt
    assert opt == SteinerTree.of([(0, 1)])
    # sum over leaves: the two spokes average 1 < 1.1, and the fan is not in OPT
    by_m = check_fan_lemma(inst, opt, 1.8, average="m")
    assert len(by_m.violations) == 1
    assert "avg_m=1" in by_m.violations[0].detail
    assert check_fan_lemma(inst, opt, 1.8, average="m-1").ok


def test_fan_needs_gamma_above_threshold():
    inst = _lens()
    opt = SteinerTree.of([(0, 1)])
    rep = check_fan_lemma(inst, opt, FAN_GAMMA)
    assert not rep.applicable


def test_fan_rejects_adjacent_steiner_and_foreign_forests():
    w = np.ones((4, 4)) * 2
    inst = Instance(w, frozenset([0, 1]))
    with pytest.raises(PreconditionViolated):
        check_fan_lemma(inst, SteinerTree.of([(0, 2), (2, 3), (3, 1)]), 1.8)
    with pytest.raises(ValueError):
        check_fan_lemma(inst, SteinerTree.of([(0, 1)]), 1.8, forest=[(0, 2)])


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_simplex_attains_the_gram_bound(d):
    theta = math.acos(-1 / d)
    # the regular simplex: d + 1 unit vectors with pairwise cosine -1/d
    e = np.eye(d + 1) - 1 / (d + 1)
    v = e / np.linalg.norm(e, axis=1)[:, None]
    assert np.allclose(v @ v.T - np.eye(d + 1), (-1 / d) * (1 - np.eye(d + 1)))
    assert gram_packing_bound(theta) == d + 1
    assert max_packing_count(theta) == d


def test_packing_domain():
    for bad in (math.pi / 2, 0.1, 4.0):
        with pytest.raises(ThetaOutOfRange):
            gram_packing_bound(bad)
        with pytest.raises(ThetaOutOfRange):
            max_packing_count(bad)
    assert gram_packing_bound(math.pi) == 2


def test_nearest_neighbour_flags_a_non_optimal_tree():
    # 0 and 1 are mutual nearest neighbours but the given tree routes around them
    inst = euclidean_instance([(0, 0), (1, 0), (0, 3), (1, 3)], [1, 1, 1, 1])
    bad = SteinerTree.of([(0, 2), (2, 3), (3, 1)])
    rep = check_nearest_neighbor_edge(inst, bad)
    assert [v.items for v in rep.violations] == [(0, 1)]
    assert check_nearest_neighbor_edge(inst, brute_force_opt(inst).tree).ok


def test_degree_checks_report_and_skip(fixture_path):
    inst = read_stp(fixture_path("fermat.stp"))
    opt = brute_force_opt(inst).tree
    # the Fermat point has degree 3; 2 / (2 - g) exceeds 3 once g > 4/3
    assert check_steiner_degree_lower(inst, opt, 1.2).ok
    assert not check_steiner_degree_lower(inst, opt, 1.5).ok
    assert not check_steiner_degree_lower(inst, opt, 2.0).applicable
    assert not check_steiner_degree_upper(inst, opt, 1.3).applicable
    metric = inst.replace(euclidean=False, coords=None)
    assert not check_steiner_degree_upper(metric, opt, 1.5).applicable


def test_angle_needs_coordinates(fixture_path):
    inst = read_stp(fixture_path("star.stp"))
    opt = brute_force_opt(inst).tree
    with pytest.raises(MissingCoordinates):
        check_angle_lower(inst, opt, 1.2)
    rep = [r for r in run_checkers(inst, opt, 1.2) if r.lemma_id == "angle_lower"][0]
    assert not rep.applicable


def test_angle_violation_lines(fixture_path):
    inst = read_stp(fixture_path("fermat.stp"))
    opt = brute_force_opt(inst).tree
    # 120 degree angles fall below 2 asin(0.95)
    rep = check_angle_lower(inst, opt, 1.9)
    assert len(rep.violations) == 3
    line = rep.lines()[0].split("\t")
    assert line[0] == "angle_lower" and line[1] == "1.9" and len(line) == 6
    assert float(line[5]) == pytest.approx(float(line[4]) - float(line[3]))


def test_run_checkers_selection(fixture_path):
    inst = read_stp(fixture_path("triangle.stp"))
    opt = brute_force_opt(inst).tree
    assert len(run_checkers(inst, opt, 1.3)) == len(LEMMAS)
    assert [r.lemma_id for r in run_checkers(inst, opt, 1.3, ["nn"])] == ["nearest_neighbor"]
    with pytest.raises(ValueError):
        run_checkers(inst, opt, 1.3, ["nope"])


def test_steiner_ratio(fixture_path):
    assert steiner_ratio(read_stp(fixture_path("fermat.stp"))) == pytest.approx(2 / math.sqrt(3))
    assert steiner_ratio(read_stp(fixture_path("triangle.stp"))) == 1.0
