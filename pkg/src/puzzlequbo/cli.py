"""Command-line entry point: ``puzzlequbo <command> <puzzle-file> [options]``.

Exit codes: 0 solved and verified (or command succeeded), 1 proven
infeasible, 2 parse error, 3 the annealer gave up above the floor.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional

import numpy as np

from .board import InfeasibleError
from .oracle import enumerate_solutions, verify
from .pipeline import compile_problem
from .problems import MaxPiecesProblem, TakuzuProblem
from .puzzlefile import ParseError, Puzzle, format_board, parse, parse_solution
from .qubo import QuarterInt, export_qubo
from .solvers import AnnealParams, solve_anneal, solve_exhaustive

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_PARSE = 2
EXIT_GAVE_UP = 3

AUTO_EXHAUSTIVE_LIMIT = 20
OPTIMA_CAP = 4096


class _Report:
    """Collects ``key: value`` lines and prints them plainly or as ``key=value``."""

    def __init__(self, machine: bool, out=None):
        self.machine = machine
        self.out = out or sys.stdout
        self.fields: list[tuple[str, str]] = []
        self.grid: list[str] = []

    def add(self, key: str, value) -> None:
        self.fields.append((key, str(value)))

    def emit(self) -> None:
        if self.machine:
            for key, value in self.fields:
                print(f"{key}={value}", file=self.out)
            for k, row in enumerate(self.grid, start=1):
                print(f"grid.{k}={row}", file=self.out)
            return
        for row in self.grid:
            print(row, file=self.out)
        if self.grid:
            print(file=self.out)
        for key, value in self.fields:
            print(f"{key}: {value}", file=self.out)


def _load(path: str) -> Puzzle:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read file: {exc.strerror}", source=path) from None
    return parse(text, source=path)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="puzzlequbo", description="Compile logic puzzles to QUBO models and solve them.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("file", help="puzzle description file")
        p.add_argument("--machine", action="store_true", help="print a key=value block in a fixed order")
        p.add_argument("--soft-pairwise", action="store_true", help="use pairwise terms for saturated soft regions")

    p = sub.add_parser("build", help="print variable and term counts")
    common(p)
    p = sub.add_parser("reduce", help="print the preprocessing summary")
    common(p)
    p = sub.add_parser("solve", help="minimise the QUBO and verify the board")
    common(p)
    p.add_argument("--method", choices=("auto", "exhaustive", "anneal"), default="auto")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=AnnealParams.restarts)
    p.add_argument("--sweeps", type=int, default=AnnealParams.sweeps)
    p.add_argument("--cooling", type=float, default=AnnealParams.cooling)
    p.add_argument("--parallel", action="store_true", help="run annealing restarts concurrently")
    p = sub.add_parser("verify", help="check a solution grid against the rules")
    common(p)
    p.add_argument("--solution", required=True, help="file holding the solution grid")
    p = sub.add_parser("count", help="count solutions with the backtracking oracle")
    common(p)
    p.add_argument("--cap", type=int, default=10_000)
    p = sub.add_parser("export", help="write the QUBO text format")
    common(p)
    p.add_argument("--output", "-o", help="destination file (default: standard output)")
    return parser


def _cmd_build(puzzle: Puzzle, args, report: _Report) -> int:
    compiled = compile_problem(puzzle.problem, soft_pairwise=args.soft_pairwise)
    q = compiled.qubo
    report.add("family", compiled.family)
    report.add("variables", q.num_vars)
    report.add("linear_terms", q.num_linear)
    report.add("quadratic_terms", q.num_quadratic)
    report.add("offset", q.offset)
    report.add("floor", compiled.floor if compiled.floor is not None else "n/a")
    return EXIT_OK


def _cmd_reduce(puzzle: Puzzle, args, report: _Report) -> int:
    compiled = compile_problem(puzzle.problem, soft_pairwise=args.soft_pairwise)
    summary = compiled.varmap.summary()
    report.add("family", compiled.family)
    report.add("cells", puzzle.shape[0] * puzzle.shape[1])
    for key in ("free", "fixed", "aliased", "inactive"):
        report.add(key, summary[key])
    if isinstance(puzzle.problem, TakuzuProblem):
        report.add("bound", puzzle.problem.variable_bound())
    return EXIT_OK


def _verify_line(problem, board) -> tuple[bool, str]:
    rep = verify(problem, board)
    if rep.satisfied:
        return True, "ok"
    names = sorted({v[0] for v in rep.violations})
    return False, f"{len(rep.violations)} violation(s): " + ", ".join(names)


def _cmd_solve(puzzle: Puzzle, args, report: _Report) -> int:
    compiled = compile_problem(puzzle.problem, soft_pairwise=args.soft_pairwise)
    q = compiled.qubo
    floor: Optional[QuarterInt] = compiled.floor
    method = args.method
    if method == "auto":
        method = "exhaustive" if q.num_vars <= AUTO_EXHAUSTIVE_LIMIT else "anneal"
    if q.num_vars == 0:
        method = "exhaustive"
    report.add("family", compiled.family)
    report.add("variables", q.num_vars)
    report.add("method", method)

    if method == "exhaustive":
        result = solve_exhaustive(q, cap=OPTIMA_CAP)
        report.add("energy", result.energy)
        report.add("floor", floor if floor is not None else "n/a")
        if floor is not None and result.energy > floor:
            report.add("status", "infeasible")
            report.fields.insert(0, ("message", f"infeasible: exhaustive minimum {result.energy} > floor {floor}"))
            return EXIT_INFEASIBLE
        # Floor-energy boards the QUBO cannot tell apart (Takuzu line
        # uniqueness) are screened here by the verifier.
        for bits in result.optima:
            board = compiled.varmap.expand(bits)
            ok, line = _verify_line(puzzle.problem, board)
            if ok:
                return _finish(puzzle, board, line, report)
        if result.stats["capped"]:
            report.add("status", "gave-up")
            report.fields.insert(0, ("message", "gave up: no verified board among the stored minima"))
            return EXIT_GAVE_UP
        report.add("status", "infeasible")
        report.fields.insert(0, ("message", "infeasible: no minimum-energy board passes verification"))
        return EXIT_INFEASIBLE

    try:
        params = AnnealParams(restarts=args.restarts, sweeps=args.sweeps, cooling=args.cooling, seed=args.seed)
    except ValueError as exc:
        raise ParseError(str(exc), source="arguments") from None
    result = solve_anneal(q, params, target=floor, parallel=args.parallel)
    board = compiled.varmap.expand(result.best)
    report.add("energy", result.energy)
    report.add("floor", floor if floor is not None else "n/a")
    ok, line = _verify_line(puzzle.problem, board)
    if (floor is not None and result.energy > floor) or not ok:
        report.grid = format_board(puzzle, board)
        report.add("verifier", line)
        report.add("status", "gave-up")
        msg = f"gave up: annealing reached {result.energy}"
        if floor is not None:
            msg += f", floor is {floor}"
        report.fields.insert(0, ("message", msg))
        return EXIT_GAVE_UP
    return _finish(puzzle, board, line, report)


def _finish(puzzle: Puzzle, board, line: str, report: _Report) -> int:
    report.grid = format_board(puzzle, board)
    if isinstance(puzzle.problem, MaxPiecesProblem):
        weight = sum(puzzle.problem.weight((i + 1, j + 1)) for i, j in zip(*np.nonzero(board)))
        report.add("weight", weight)
    report.add("verifier", line)
    report.add("status", "solved")
    return EXIT_OK


def _cmd_verify(puzzle: Puzzle, args, report: _Report) -> int:
    try:
        with open(args.solution, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read file: {exc.strerror}", source=args.solution) from None
    board = parse_solution(puzzle, text, source=args.solution)
    rep = verify(puzzle.problem, board)
    report.add("satisfied", "yes" if rep.satisfied else "no")
    report.add("violations", len(rep.violations))
    for k, (name, where) in enumerate(rep.violations, start=1):
        report.add(f"violation.{k}", f"{name} {where}")
    return EXIT_OK if rep.satisfied else EXIT_INFEASIBLE


def _cmd_count(puzzle: Puzzle, args, report: _Report) -> int:
    if args.cap < 1:
        raise ParseError("--cap must be positive", source="arguments")
    res = enumerate_solutions(puzzle.problem, cap=args.cap)
    report.add("solutions", res.count)
    report.add("capped", "yes" if res.capped else "no")
    if res.best_weight is not None:
        report.add("best_weight", res.best_weight)
    return EXIT_OK if res.count else EXIT_INFEASIBLE


def _cmd_export(puzzle: Puzzle, args, report: _Report) -> int:
    compiled = compile_problem(puzzle.problem, soft_pairwise=args.soft_pairwise)
    text = export_qubo(compiled.qubo)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
        report.add("written", args.output)
        report.add("variables", compiled.qubo.num_vars)
    else:
        report.out.write(text)
    return EXIT_OK


COMMANDS = {
    "build": _cmd_build,
    "reduce": _cmd_reduce,
    "solve": _cmd_solve,
    "verify": _cmd_verify,
    "count": _cmd_count,
    "export": _cmd_export,
}


def run(argv=None, out=None) -> int:
    """Run one command and return its exit code; output goes to ``out``."""
    args = _build_parser().parse_args(argv)
    report = _Report(args.machine, out)
    err = sys.stderr
    try:
        puzzle = _load(args.file)
        code = COMMANDS[args.command](puzzle, args, report)
    except ParseError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_PARSE
    except InfeasibleError as exc:
        report.fields.insert(0, ("message", str(exc)))
        report.add("status", "infeasible")
        report.emit()
        return EXIT_INFEASIBLE
    report.emit()
    return code


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":  # pragma: no cover
    main()
