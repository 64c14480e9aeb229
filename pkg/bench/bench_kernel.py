"""Benchmark the jitted product kernel against the pure-Python fallback.

Runs the same seeded workloads twice in fresh interpreters, once as-is and
once with WEYLIFT_NO_NUMBA=1, and prints the per-workload wall times side by
side.  Jit compilation is forced before timing starts, so the numba column
reflects steady-state throughput.

    python bench/bench_kernel.py            # both backends, default repeats
    python bench/bench_kernel.py -r 5       # more repeats per workload
"""

from __future__ import annotations

import argparse
import json
import os
import random
import subprocess
import sys
import time

WORKLOADS = [
    # (name, p, n, max_deg, rounds)
    ("mul p=3 n=1 deg<=6", 3, 1, 6, 400),
    ("mul p=3 n=2 deg<=5", 3, 2, 5, 120),
    ("mul p=5 n=2 deg<=6", 5, 2, 6, 40),
    ("analyze bkk p=3", 3, 2, 0, 1),
]


def run_workloads(repeat: int) -> dict[str, float]:
    from weylift import _kernel
    from weylift.endo import bkk_family
    from weylift.scalars import FieldParams
    from weylift.weyl import AlgebraParams

    _kernel.warmup()
    out: dict[str, float] = {}
    for name, p, n, max_deg, rounds in WORKLOADS:
        alg = AlgebraParams(n, FieldParams(p))
        rng = random.Random(("bench", name).__repr__())

        def rand_elem():
            terms = {}
            for _ in range(4):
                exps = [0] * alg.nvars
                for _ in range(rng.randint(1, max_deg)):
                    exps[rng.randrange(alg.nvars)] += 1
                terms[tuple(exps)] = alg.field.from_int(rng.randint(1, p - 1))
            return alg.from_terms(terms, "k")

        if name.startswith("analyze"):
            args = None
        else:
            args = [(rand_elem(), rand_elem()) for _ in range(rounds)]
        best = float("inf")
        for _ in range(repeat):
            t0 = time.perf_counter()
            if args is None:
                bkk_family(alg).analyze()
            else:
                for f, g in args:
                    f * g
            best = min(best, time.perf_counter() - t0)
        out[name] = best
    return out


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("-r", "--repeat", type=int, default=3,
                    help="repeats per workload, best time wins (default 3)")
    ap.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()

    if args.child:
        json.dump(run_workloads(args.repeat), sys.stdout)
        return 0

    results = {}
    for label, extra_env in (("numba", {}), ("python", {"WEYLIFT_NO_NUMBA": "1"})):
        env = dict(os.environ, **extra_env)
        proc = subprocess.run(
            [sys.executable, os.path.abspath(__file__), "--child", "-r", str(args.repeat)],
            env=env, capture_output=True, text=True, check=True,
        )
        results[label] = json.loads(proc.stdout)

    width = max(len(name) for name, *_ in WORKLOADS)
    print(f"{'workload':<{width}}  {'numba':>10}  {'python':>10}  {'speedup':>8}")
    for name, *_ in WORKLOADS:
        a, b = results["numba"][name], results["python"][name]
        ratio = b / a if a > 0 else float("inf")
        print(f"{name:<{width}}  {a * 1e3:>8.2f}ms  {b * 1e3:>8.2f}ms  {ratio:>7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
