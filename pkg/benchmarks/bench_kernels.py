"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Each row is the best of ``--repeat`` runs on the same seeded input, and the
two backends' outputs are compared bit for bit before timing.
"""
import argparse
import time

import numpy as np

from stablesteiner import kernels


def _metric(rng, n):
    pts = rng.random((n, 2))
    return np.sqrt(((pts[:, None] - pts[None]) ** 2).sum(-1))


def cases(rng):
    w60 = _metric(rng, 60)
    w14 = _metric(rng, 14)
    d14, _ = kernels.floyd_warshall(w14)
    terms = np.arange(8, dtype=np.int64)
    verts = np.arange(60, dtype=np.int64)
    return [
        ("floyd_warshall n=60", "floyd_warshall", (w60,)),
        ("dreyfus_wagner n=14 t=8", "dreyfus_wagner", (d14, terms)),
        ("prim_mst n=60", "prim_mst", (w60, verts)),
        ("subset_mst_weights t=6 s=8", "subset_mst_weights", (w14, terms[:6], np.arange(6, 14, dtype=np.int64))),
    ]


def _same(a, b):
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def best_of(fn, args, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    impls = kernels.backends()
    if "cython" not in impls:
        print("compiled kernels are not built; only the fallback is available")
    print(f"{'kernel':<30}{'python s':>12}{'cython s':>12}{'speedup':>10}")
    for label, name, inputs in cases(np.random.default_rng(args.seed)):
        py = getattr(impls["python"], name)
        t_py = best_of(py, inputs, args.repeat)
        if "cython" in impls:
            cy = getattr(impls["cython"], name)
            if not _same(py(*inputs), cy(*inputs)):
                raise SystemExit(f"{name}: backends disagree")
            t_cy = best_of(cy, inputs, args.repeat)
            print(f"{label:<30}{t_py:>12.4f}{t_cy:>12.5f}{t_py / t_cy:>9.0f}x")
        else:
            print(f"{label:<30}{t_py:>12.4f}{'-':>12}{'-':>10}")


if __name__ == "__main__":
    main()
