"""Bilu-Linial stability for metric and Euclidean Steiner trees."""

__version__ = "0.1.0"

from .errors import SteinerError  # noqa: E402
from .exact import (EnumerationBudget, brute_force_opt, dreyfus_wagner,  # noqa: E402
                    enumerate_canonical_trees, near_optimal_trees)
from .generators import (GenSpec, planted_no_steiner, random_euclidean,  # noqa: E402
                         random_metric, stable_instance_search)
from .model import (Instance, SteinerTree, canonicalize, euclidean_instance,  # noqa: E402
                    metric_closure, tree_weight, validate)
from .solvers import (contract_edge, contract_solve, expand_solution, fan_greedy,  # noqa: E402
                      mst_terminals)
from .stability import (Perturbation, apply_perturbation, certify, gamma_star,  # noqa: E402
                        is_opt_preserved, worst_case_perturbation)
from .stp import parse_stp, write_stp  # noqa: E402
