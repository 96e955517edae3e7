"""``stablesteiner`` command line.

Exit codes: 0 success (stable / no violations), 1 unstable or violations
found, 2 unreadable input, 3 budget exceeded or search exhausted, 4 inner
oracle broke its approximation contract.
"""
from __future__ import annotations

import argparse
import hashlib
import math
import sys
import time

from . import __version__
from .errors import (BudgetExceeded, OracleContractViolated, SearchExhausted, StpError,
                     TooManyTerminals)
from .exact import BRUTE_MAX_STEINER, EnumerationBudget, brute_force_opt, dreyfus_wagner
from .generators import GenSpec, corpus_path, generate, render
from .model import tree_weight
from .solvers import contract_solve, fan_greedy, mst_terminals, oracle_by_name
from .stability import certify, gamma_star
from .stp import read_stp, write_stp
from .structure import LEMMAS, run_checkers

EXIT_UNSTABLE = 1
EXIT_PARSE = 2
EXIT_BUDGET = 3
EXIT_ORACLE = 4


class RunReport:
    """Ordered ``key -> value`` pairs printed as ``key: value`` or TSV."""

    def __init__(self, argv):
        self.items = [("command", " ".join(argv))]
        self.start = time.perf_counter()

    def add(self, key, value):
        self.items.append((key, value))

    def emit(self, fmt, out):
        self.items.append(("wall_time_s", f"{time.perf_counter() - self.start:.3f}"))
        sep = "\t" if fmt == "tsv" else ": "
        for k, v in self.items:
            out.write(f"{k}{sep}{v}\n")


def _fmt(x: float) -> str:
    return "inf" if math.isinf(x) else f"{x:.12g}"


def _edges(tree) -> str:
    # 1-based, like the STP file the instance came from
    return " ".join(f"{u + 1}-{v + 1}" for u, v in tree) or "-"


def digest(instance) -> str:
    return hashlib.sha256(write_stp(instance.replace(name="")).encode()).hexdigest()[:16]


def _budget(args) -> EnumerationBudget:
    return EnumerationBudget.from_env(max_steiner_subset_size=args.budget_steiner,
                                      max_trees=args.budget_trees)


def _load(args, rep):
    inst = read_stp(args.path)
    rep.add("instance", f"{args.path} n={inst.n} t={len(inst.terminals)} sha256={digest(inst)}")
    for note in inst.notes:
        rep.add("note", note)
    return inst


def _need_gamma(args, parser):
    if args.gamma is None:
        parser.error(f"--algorithm {args.algorithm} needs --gamma")


def cmd_solve(args, rep, parser):
    inst = _load(args, rep)
    budget = _budget(args)
    alg = args.algorithm
    if alg == "exact":
        res = brute_force_opt(inst, budget)
        tree = res.tree
        rep.add("unique", str(res.unique).lower())
    elif alg == "dw":
        tree = dreyfus_wagner(inst).tree
    elif alg == "mst":
        tree = mst_terminals(inst)
    elif alg == "fan-greedy":
        _need_gamma(args, parser)
        tree = fan_greedy(inst, args.gamma)
    else:
        _need_gamma(args, parser)
        oracle = oracle_by_name(args.oracle, args.seed)
        tree, trace = contract_solve(inst, args.gamma, oracle)
        rep.add("oracle", oracle.label)
        rep.add("contractions", len(trace.steps))
    rep.add("algorithm", alg)
    rep.add("weight", _fmt(tree_weight(inst, tree)))
    rep.add("edges", _edges(tree))
    if alg != "exact" and len(inst.steiner_list) <= BRUTE_MAX_STEINER:
        try:
            exact = brute_force_opt(inst, budget)
        except BudgetExceeded:
            rep.add("matches_exact", "skipped")
        else:
            rep.add("matches_exact", str(exact.tree == tree).lower())
    return 0


def cmd_gamma_star(args, rep, parser):
    inst = _load(args, rep)
    if args.method == "enumerate":
        from .exact import enumerate_canonical_trees
        stream = enumerate_canonical_trees(inst, _budget(args), strict=True)
        for _ in stream:
            pass
    r = gamma_star(inst, _budget(args), args.method)
    rep.add("gamma_star", _fmt(r.gamma_star))
    rep.add("opt_weight", _fmt(r.opt_weight))
    rep.add("opt", _edges(r.opt))
    rep.add("witness", _edges(r.witness) if r.witness is not None else "-")
    rep.add("opt_unique", str(r.opt_unique).lower())
    rep.add("exhaustive", str(r.exhaustive).lower())
    return 0


def cmd_certify(args, rep, parser):
    inst = _load(args, rep)
    cert = certify(inst, args.gamma)
    rep.add("gamma", _fmt(args.gamma))
    rep.add("gamma_star", _fmt(cert.report.gamma_star))
    rep.add("stable", str(cert.stable).lower())
    if cert.witness is not None:
        rep.add("witness", _edges(cert.witness))
    return 0 if cert.stable else EXIT_UNSTABLE


def cmd_check_lemmas(args, rep, parser):
    inst = _load(args, rep)
    opt = brute_force_opt(inst, _budget(args)).tree
    rep.add("gamma", _fmt(args.gamma))
    rep.add("opt", _edges(opt))
    total = 0
    for r in run_checkers(inst, opt, args.gamma, args.lemma or None):
        if not r.applicable:
            rep.add(f"lemma.{r.lemma_id}", f"applicable=false note={r.note}")
            continue
        rep.add(f"lemma.{r.lemma_id}", f"violations={len(r.violations)}")
        for line in r.lines():
            rep.add("violation", line.replace("\t", " "))
        total += len(r.violations)
    rep.add("violations", total)
    return 0 if total == 0 else EXIT_UNSTABLE


def cmd_generate(args, rep, parser):
    import os
    for k in range(args.count):
        spec = GenSpec(args.model, args.n, args.t, args.seed + k, target_gamma=args.gamma,
                       max_tries=args.max_tries, dim=args.dim, scale=args.scale)
        inst, cert = generate(spec, planted=args.planted)
        path = corpus_path(args.out, spec)
        os.makedirs(os.path.dirname(path), exist_ok=True)
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(render(spec, inst, cert))
        rep.add("file", path)
        rep.add("sha256", digest(inst))
        if cert is not None:
            rep.add("gamma_star", _fmt(cert.gamma_star))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="stablesteiner",
                                description="Exact solvers and stability certificates for Steiner tree instances.")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--format", choices=("human", "tsv"), default="human")
    p.add_argument("--budget-steiner", type=int, metavar="K", default=None,
                   help="largest Steiner subset the exponential routes may use")
    p.add_argument("--budget-trees", type=int, metavar="M", default=None,
                   help="cap on enumerated canonical trees")
    sub = p.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("solve", help="solve an STP instance")
    s.add_argument("path")
    s.add_argument("--algorithm", choices=("exact", "dw", "mst", "fan-greedy", "contract"),
                   default="exact")
    s.add_argument("--gamma", type=float)
    s.add_argument("--oracle", choices=("exact", "mst", "fuzzed-exact"), default="exact")
    s.add_argument("--seed", type=int, default=None)
    s.set_defaults(fn=cmd_solve)

    g = sub.add_parser("gamma-star", help="stability margin and closest rival")
    g.add_argument("path")
    g.add_argument("--method", choices=("parametric", "enumerate"), default="parametric")
    g.set_defaults(fn=cmd_gamma_star)

    c = sub.add_parser("certify", help="exit 0 iff the instance is gamma-stable")
    c.add_argument("path")
    c.add_argument("--gamma", type=float, required=True)
    c.set_defaults(fn=cmd_certify)

    k = sub.add_parser("check-lemmas", help="run the structural checkers against the optimum")
    k.add_argument("path")
    k.add_argument("--gamma", type=float, required=True)
    k.add_argument("--lemma", action="append", choices=LEMMAS)
    k.set_defaults(fn=cmd_check_lemmas)

    gen = sub.add_parser("generate", help="write seeded (optionally certified) instances")
    gen.add_argument("--model", choices=("euclidean", "random-metric"), default="euclidean")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--t", type=int, required=True)
    gen.add_argument("--gamma", type=float, default=None)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--count", type=int, default=1)
    gen.add_argument("--dim", type=int, default=2)
    gen.add_argument("--scale", type=float, default=1.0)
    gen.add_argument("--max-tries", type=int, default=10000)
    gen.add_argument("--planted", action="store_true", help="use the no-Steiner planted generator")
    gen.add_argument("--out", default="corpus")
    gen.set_defaults(fn=cmd_generate)
    return p


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    rep = RunReport(["stablesteiner"] + argv)
    try:
        code = args.fn(args, rep, parser)
    except (StpError, OSError, UnicodeDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (BudgetExceeded, TooManyTerminals, SearchExhausted) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except OracleContractViolated as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ORACLE
    except ValueError as exc:
        parser.error(str(exc))
    rep.emit(args.format, sys.stdout)
    return code


if __name__ == "__main__":
    sys.exit(main())
