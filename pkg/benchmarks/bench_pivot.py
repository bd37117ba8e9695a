"""Compare the compiled and pure-python phase-one pivot kernels.

Times the full feasibility solve (same verdicts, same pivots; only the
tableau arithmetic differs) on the local-model LPs this package actually
produces, across mesh sizes, plus dense random instances.

Usage: python3 benchmarks/bench_pivot.py [--repeat N]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from steercert.engine import lhs_feasibility_qubit
from steercert.lp import BACKEND, FeasibilityProblem, solve_feasibility_float
from steercert.scenario import assemblage_from_povms, pauli_povm, werner_state


def time_call(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_werner(repeat):
    rows = []
    asm = assemblage_from_povms(werner_state(0.69), [pauli_povm("x"), pauli_povm("z")])
    for mesh in (42, 162, 642):
        times = {}
        for backend in ("c", "py"):
            times[backend] = time_call(
                lambda: lhs_feasibility_qubit(asm, mesh=mesh, backend=backend), repeat
            )
        rows.append((f"werner p=0.69 mesh={mesh}", times["c"], times["py"]))
    return rows


def bench_random(repeat):
    rng = np.random.default_rng(8)
    rows = []
    for m, n in ((20, 200), (40, 800), (60, 2000)):
        a = rng.normal(size=(m, n))
        w = np.abs(rng.normal(size=n))
        problem = FeasibilityProblem(a=a, b=a @ w, num_vars=n)
        times = {}
        for backend in ("c", "py"):
            verdict = None

            def run():
                nonlocal verdict
                verdict = solve_feasibility_float(problem, backend=backend)

            times[backend] = time_call(run, repeat)
            assert verdict.is_feasible
        rows.append((f"random dense {m}x{n}", times["c"], times["py"]))
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3, help="best-of-N timing (default 3)")
    args = parser.parse_args()

    if BACKEND != "c":
        print("compiled kernel not built; only the pure-python path is available")
        return

    print(f"{'case':<28} {'compiled':>10} {'pure py':>10} {'speedup':>8}")
    for name, tc, tp in bench_werner(args.repeat) + bench_random(args.repeat):
        print(f"{name:<28} {tc * 1e3:>8.2f}ms {tp * 1e3:>8.2f}ms {tp / tc:>7.1f}x")


if __name__ == "__main__":
    main()
