"""Compile any supported problem and compare its QUBO against the oracle."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .board import InfeasibleError, VarMap
from .oracle import enumerate_solutions
from .problems import (
    ColouredPiecesProblem,
    MaxPiecesProblem,
    QueensProblem,
    TakuzuProblem,
    TentsTreesProblem,
)
from .qubo import QuarterInt, Qubo
from .queens import (
    _check_lqueens,
    _compile_coloured,
    _compile_max,
    _compile_queens,
    _compile_tents,
)
from .solvers import describe, predicted_min_energy, solve_exhaustive
from .takuzu import build_ttp_generalized, check_global_nonrepetition, preprocess_takuzu

AGREEMENT_LIMIT = 20


@dataclass
class Compiled:
    problem: object
    family: str
    qubo: Qubo
    varmap: VarMap
    floor: Optional[QuarterInt]


def compile_problem(problem, soft_pairwise: bool = False, drop_region: bool = True) -> Compiled:
    """Reduce and build the QUBO for ``problem``.

    ``floor`` is the analytic minimum, or None for max-pieces where it
    depends on the instance.
    """
    desc = describe(problem, soft_pairwise=soft_pairwise)
    if isinstance(problem, QueensProblem):
        if problem.family == "nqueens":
            q, vm = _compile_queens(problem, "pp")
        elif problem.family == "lqueens":
            _check_lqueens(problem)
            q, vm = _compile_queens(problem, "pp", drop_region=drop_region)
        else:
            q, vm = _compile_queens(problem, "others", soft_pairwise=soft_pairwise)
    elif isinstance(problem, TentsTreesProblem):
        q, vm = _compile_tents(problem)
    elif isinstance(problem, TakuzuProblem):
        vm = preprocess_takuzu(problem)
        q = build_ttp_generalized(problem, vm)
    elif isinstance(problem, ColouredPiecesProblem):
        q, vm = _compile_coloured(problem)
    elif isinstance(problem, MaxPiecesProblem):
        q, vm = _compile_max(problem)
    else:
        raise ValueError(f"unknown problem type {type(problem).__name__}")
    floor = None if desc.family == "pieces-max" else predicted_min_energy(desc)
    return Compiled(problem, desc.family, q, vm, floor)


def _board_key(values) -> tuple:
    return tuple(int(v) for v in values.flatten())


def qubo_oracle_agreement(problem, soft_pairwise: bool = False) -> bool:
    """True iff the QUBO's floor-energy boards are exactly the oracle's solutions.

    For Takuzu with unique lines the QUBO side is filtered by the
    non-repetition check, which the QUBO cannot express. For max-pieces the
    floor is minus the oracle's best weight.
    """
    oracle = enumerate_solutions(problem, cap=1 << 20)
    expected = {_board_key(s) for s in oracle.solutions}
    try:
        compiled = compile_problem(problem, soft_pairwise=soft_pairwise)
    except InfeasibleError:
        return not expected
    q = compiled.qubo
    if q.num_vars > AGREEMENT_LIMIT:
        raise ValueError(f"agreement check limited to {AGREEMENT_LIMIT} free variables, got {q.num_vars}")
    floor = compiled.floor
    if floor is None:
        floor = QuarterInt.of(-(oracle.best_weight or 0))
    result = solve_exhaustive(q, cap=1 << 20)
    if result.energy < floor:
        return False
    found = set()
    if result.energy == floor:
        for bits in result.optima:
            board = compiled.varmap.expand(bits)
            if isinstance(problem, TakuzuProblem) and problem.unique_lines:
                if not check_global_nonrepetition(problem, board).ok:
                    continue
            found.add(_board_key(board))
    return found == expected
