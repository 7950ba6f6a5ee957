"""Compare the numba and pure-numpy oracle kernels.

    python benchmarks/bench_kernels.py [--repeats 3] [--seed 0]

Both backends are timed on the same random instances and their results are
checked for equality before any timing is reported.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from distortion_lab import _kernels
from distortion_lab.core import random_ordinal

CASES = [
    ("voting", 6, 4),
    ("voting", 8, 5),
    ("voting", 8, 6),
    ("matching", 4, 4),
    ("matching", 5, 5),
    ("matching", 6, 6),
]


def _run(backend: str, flavor: str, table, outcome):
    if flavor == "voting":
        fn = getattr(_kernels, f"voting_vertex_max_{backend}")
        return fn(table, outcome, 0, table.shape[1])
    fn = getattr(_kernels, f"matching_vertex_max_{backend}")
    return fn(table, outcome, 0, table.shape[1])


def _best_time(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if not _kernels.HAVE_NUMBA:
        print("numba is not importable; nothing to compare")
        return 1
    rng = np.random.default_rng(args.seed)
    print(f"{'flavor':<9}{'n':>3}{'m':>3}{'vertices':>10}{'numba s':>11}{'numpy s':>11}{'speedup':>9}")
    for flavor, n, m in CASES:
        ordinal = random_ordinal(n, m, rng)
        table, _ = _kernels.vertex_table(ordinal.positions())
        # give agent 0 her top alternative so the ratio stays finite and the
        # whole vertex set is enumerated (no early exit on a zero denominator)
        top = ordinal.top(0)
        if flavor == "voting":
            outcome = top
        else:
            perm = [int(x) for x in rng.permutation(n)]
            j = perm.index(top)
            perm[0], perm[j] = perm[j], perm[0]
            outcome = np.array(perm, dtype=np.int64)
        a = _run("numba", flavor, table, outcome)  # also compiles
        b = _run("numpy", flavor, table, outcome)
        if (a[0], a[1], tuple(a[2])) != (b[0], b[1], tuple(b[2])):
            raise SystemExit(f"backends disagree on {flavor} n={n} m={m}: {a} vs {b}")
        t_nb = _best_time(lambda: _run("numba", flavor, table, outcome), args.repeats)
        t_np = _best_time(lambda: _run("numpy", flavor, table, outcome), args.repeats)
        print(f"{flavor:<9}{n:>3}{m:>3}{m**n:>10}{t_nb:>11.4f}{t_np:>11.4f}{t_np / t_nb:>9.1f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
