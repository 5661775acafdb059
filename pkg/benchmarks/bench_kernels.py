"""Time the numba and numpy kernel backends on the same workloads.

    python3 benchmarks/bench_kernels.py [--repeat 3]

The first numba call of each kernel includes JIT compilation, so one warm-up
run is done before timing.  Both backends consume the same random streams and
must return identical results; the script checks that as it goes.
"""

import argparse
import time

from puzzlequbo import _kernels
from puzzlequbo.pipeline import compile_problem
from puzzlequbo.problems import TakuzuProblem
from puzzlequbo.queens import build_nqueens
from puzzlequbo.solvers import AnnealParams, solve_anneal, solve_exhaustive


def _best_of(fn, repeat):
    times = []
    result = None
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - start)
    return min(times), result


def workloads():
    q20 = compile_problem(TakuzuProblem(4, 5, row_ones=(2, 2, 2, 2), unique_lines=False)).qubo
    q8 = build_nqueens(8)
    q12 = build_nqueens(12)
    return [
        (f"exhaustive, {q20.num_vars} vars", lambda b: solve_exhaustive(q20, backend=b).energy),
        ("anneal 8-queens, 8x1000 sweeps", lambda b: solve_anneal(
            q8, AnnealParams(restarts=8, sweeps=1000, seed=1), backend=b).energy),
        ("anneal 12-queens, 4x2000 sweeps", lambda b: solve_anneal(
            q12, AnnealParams(restarts=4, sweeps=2000, seed=1), backend=b).energy),
    ]


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)

    backends = ["numpy"] + (["numba"] if _kernels.NUMBA_AVAILABLE else [])
    if len(backends) == 1:
        print("numba is not importable; timing the numpy backend only")

    header = f"{'workload':34}" + "".join(f"{b:>12}" for b in backends)
    if len(backends) == 2:
        header += f"{'speed-up':>10}"
    print(header)
    for name, fn in workloads():
        row, results, times = f"{name:34}", [], []
        for backend in backends:
            fn(backend)  # warm-up (JIT compile)
            elapsed, result = _best_of(lambda: fn(backend), args.repeat)
            times.append(elapsed)
            results.append(result)
            row += f"{elapsed * 1000:10.1f}ms"
        if len(backends) == 2:
            row += f"{times[0] / times[1]:9.1f}x"
        if len(set(map(str, results))) != 1:
            row += "  MISMATCH " + ", ".join(map(str, results))
        print(row)


if __name__ == "__main__":
    main()
