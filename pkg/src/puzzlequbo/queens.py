"""QUBO builders for queens placement, Tents & Trees and chess-piece problems."""

from __future__ import annotations

import dataclasses
from fractions import Fraction

from .board import (
    Board,
    Cell,
    InfeasibleError,
    Region,
    VarMap,
    adjacency_cells,
    diagonal_cells,
    orthogonal_cells,
)
from .problems import (
    PIECES,
    ColouredPiecesProblem,
    MaxPiecesProblem,
    PieceSpec,
    QueensProblem,
    TentsTreesProblem,
)
from .qubo import Qubo

__all__ = [
    "propagate_queen_initials",
    "build_nqueens",
    "build_lqueens",
    "build_general_queens",
    "build_tents_trees",
    "threat_cells",
    "build_coloured_pieces",
    "build_max_pieces",
]


def _raise_conflict(vm: VarMap) -> None:
    if vm.conflict is not None:
        raise InfeasibleError(vm.conflict.rule, vm.conflict.cells)


def _group_kind(reg: Region) -> str:
    if reg.id.startswith("row"):
        return "row"
    if reg.id.startswith("col"):
        return "column"
    return "region"


# -- queens --------------------------------------------------------------------


def propagate_queen_initials(p: QueensProblem):
    """Fix pre-placed queens and everything they force.

    Returns ``(varmap, adjusted)``. In ``adjusted`` every region (rows and
    columns included, as ``row<i>``/``col<j>`` regions) carries its placed
    count in ``p``, and the row/column targets are reduced by the queens
    already standing in them.
    """
    vm = VarMap(p.board)
    for cell in sorted(p.initial):
        vm.fix(cell, 1, "initial")
    _raise_conflict(vm)

    groups = p.line_regions() + list(p.regions)
    placed = {}
    for reg in groups:
        ones = sum(1 for c in reg.cells if c in p.initial) + reg.p
        placed[reg.id, id(reg)] = ones
        if ones > reg.q + reg.t:
            raise InfeasibleError(_group_kind(reg), sorted(reg.cells & p.initial),
                                  f"{ones} queens placed, at most {reg.q + reg.t} allowed")
        if ones == reg.q + reg.t:
            for c in sorted(reg.cells - p.initial):
                vm.fix(c, 0, _group_kind(reg))
    _raise_conflict(vm)

    mapping = isinstance(p.diag_distance, dict)
    for queen in sorted(p.initial):
        d = p.distance(queen)
        if d != 0:
            for c in sorted(diagonal_cells(p.board, queen, d, "others")):
                vm.fix(c, 0, "diagonal")
    if mapping:
        # asymmetric distances: a cell may reach a queen that does not reach it
        for c in p.board.cells():
            d = p.distance(c)
            if d != 0 and c not in p.initial:
                if diagonal_cells(p.board, c, d, "others") & p.initial:
                    vm.fix(c, 0, "diagonal")
    _raise_conflict(vm)

    for reg in groups:
        ones = placed[reg.id, id(reg)]
        free = sum(1 for c in reg.cells if vm.value_of(c) is None)
        if ones + free < reg.q:
            raise InfeasibleError(_group_kind(reg), sorted(reg.cells)[:3],
                                  f"needs {reg.q} queens, only {ones + free} possible")

    adjusted_regions = [
        dataclasses.replace(reg, p=placed[reg.id, id(reg)]) for reg in p.regions
    ]
    row_targets = p.row_targets
    if row_targets is not None:
        row_targets = tuple(
            r - sum(1 for c in p.initial if c[0] == i) for i, r in enumerate(row_targets, 1)
        )
    col_targets = p.col_targets
    if col_targets is not None:
        col_targets = tuple(
            t - sum(1 for c in p.initial if c[1] == j) for j, t in enumerate(col_targets, 1)
        )
    adjusted = dataclasses.replace(
        p, regions=adjusted_regions, row_targets=row_targets, col_targets=col_targets
    )
    return vm, adjusted


def _split(vm: VarMap, cells):
    lits, ones = [], 0
    for c in sorted(cells):
        lit = vm.resolve(c)
        if lit.is_const:
            ones += lit.index
        else:
            lits.append(lit)
    return lits, ones


def _count_penalty(q: Qubo, vm: VarMap, reg: Region) -> bool:
    """Add the square penalty for one counted region; False when it has no free cell."""
    lits, ones = _split(vm, reg.cells)
    target = Fraction(reg.q - reg.p - ones) + Fraction(reg.t, 2)
    if lits:
        q.add_square_penalty(target, lits)
        return True
    q.add_offset(target * target)
    return False


def _diagonal_pairs(q: Qubo, vm: VarMap, p: QueensProblem, mode: str) -> None:
    for cell in p.board.cells():
        d = p.distance(cell)
        if d == 0:
            continue
        a = vm.resolve(cell)
        if a.is_const:
            continue
        for other in sorted(diagonal_cells(p.board, cell, d, mode)):
            b = vm.resolve(other)
            if not b.is_const:
                q.add_pair_interaction(a, b, 1)


def _compile_queens(p: QueensProblem, mode: str, drop_region: bool = False, soft_pairwise: bool = False):
    vm, _ = propagate_queen_initials(p)
    q = Qubo(vm.num_free)
    for reg in p.line_regions():
        _count_penalty(q, vm, reg)
    live = [reg for reg in p.regions if any(vm.value_of(c) is None for c in reg.cells)]
    dropped = live[-1] if drop_region and live else None
    for reg in p.regions:
        if reg is dropped:
            continue
        if soft_pairwise and reg.t == 1:
            lits, ones = _split(vm, reg.cells)
            if reg.q - reg.p - ones == 0:
                for a in lits:
                    for b in lits:
                        if a != b:
                            q.add_pair_interaction(a, b, 1)
                continue
        _count_penalty(q, vm, reg)
    _diagonal_pairs(q, vm, p, mode)
    return q, vm


def build_nqueens(n: int) -> Qubo:
    """Row, column and full-diagonal penalties on an n x n board (n^2 variables)."""
    if n < 1:
        raise ValueError("N must be at least 1")
    q, _ = _compile_queens(QueensProblem.nqueens(n), "pp")
    return q


def _check_lqueens(p: QueensProblem) -> None:
    n = p.board.height
    if p.board.width != n:
        raise ValueError("LQueens board must be square")
    if len(p.regions) != n:
        raise ValueError(f"LQueens needs {n} regions, got {len(p.regions)}")
    seen: set = set()
    for reg in p.regions:
        if reg.cells & seen:
            raise ValueError(f"region cover invalid: region {reg.id} overlaps another region")
        seen |= reg.cells
    if seen != set(p.board.cells()):
        raise ValueError("region cover invalid: regions must partition the active cells")


def build_lqueens(p: QueensProblem, drop_region: bool = True) -> Qubo:
    """LinkedIn Queens: one queen per row, column and region, adjacent diagonals only.

    Initial queens are eliminated first; one live region is left out of the
    region term when ``drop_region`` is set, since the row and column terms
    already force its queen.
    """
    _check_lqueens(p)
    q, _ = _compile_queens(p, "pp", drop_region=drop_region)
    return q


def build_general_queens(p: QueensProblem, soft_pairwise: bool = False) -> Qubo:
    """One square penalty per counted region, with a half-unit shift for soft ones.

    Diagonal pairs are taken from every cell to every cell within its own
    distance, so a symmetric pair contributes twice.
    """
    q, _ = _compile_queens(p, "others", soft_pairwise=soft_pairwise)
    return q


# -- tents & trees ---------------------------------------------------------------


def tents_varmap(p: TentsTreesProblem) -> VarMap:
    board = p.board
    vm = VarMap(board)
    for t in sorted(p.trees):
        vm.fix(t, 0, "tree")
    candidates = set()
    for t in p.trees:
        candidates |= orthogonal_cells(board, t)
    for c in board.cells():
        if c not in candidates:
            vm.fix(c, 0, "tent-placement")
    return vm


def _compile_tents(p: TentsTreesProblem):
    board = p.board
    vm = tents_varmap(p)
    q = Qubo(vm.num_free)
    for i, count in enumerate(p.row_counts, start=1):
        q.add_square_penalty(count, [vm.resolve(c) for c in board.row_cells(i)])
    for j, count in enumerate(p.col_counts, start=1):
        q.add_square_penalty(count, [vm.resolve(c) for c in board.col_cells(j)])
    for cell in board.cells():
        a = vm.resolve(cell)
        if a.is_const:
            continue
        for other in sorted(adjacency_cells(board, cell, include_orthogonal=True, below_only=True)):
            b = vm.resolve(other)
            if not b.is_const:
                q.add_pair_interaction(a, b, 1)
    for tree in sorted(p.trees):
        lits = [vm.resolve(c) for c in sorted(orthogonal_cells(board, tree) - p.trees)]
        if lits:
            q.add_square_penalty(Fraction(3, 2), lits)
        else:
            q.add_offset(Fraction(9, 4))
    return q, vm


def build_tents_trees(p: TentsTreesProblem) -> Qubo:
    """Row/column tent counts, no touching tents, and 1-or-2 tents beside each tree."""
    q, _ = _compile_tents(p)
    return q


# -- chess pieces ------------------------------------------------------------------


def threat_cells(spec: PieceSpec, board: Board, cell: Cell) -> set:
    """Cells attacked from ``cell``; pieces never block each other."""
    r, c = cell
    found = set()
    limit_all = board.height * board.width
    for (dr, dc), rng in spec.rays:
        limit = limit_all if rng is None else min(rng, limit_all)
        for k in range(1, limit + 1):
            nxt = board.normalize(r + dr * k, c + dc * k)
            if nxt is None or nxt == cell:
                break
            if nxt not in board.inactive:
                found.add(nxt)
    for dr, dc in spec.jumps:
        nxt = board.normalize(r + dr, c + dc)
        if nxt is not None and nxt != cell and nxt not in board.inactive:
            found.add(nxt)
    return found


def _threat_map(board: Board, pieces) -> dict:
    return {c: threat_cells(PIECES[pieces[c]], board, c) for c in board.cells()}


def _piece_varmap(board: Board, initial, threats) -> VarMap:
    vm = VarMap(board)
    for cell in sorted(initial):
        vm.fix(cell, 1, "initial")
    _raise_conflict(vm)
    for cell in sorted(initial):
        for other in sorted(threats[cell]):
            vm.fix(other, 0, "threat")
    for cell in board.cells():
        if threats[cell] & initial and cell not in initial:
            vm.fix(cell, 0, "threat")
    _raise_conflict(vm)
    return vm


def _threat_pairs(q: Qubo, vm: VarMap, board: Board, threats, weight) -> None:
    for cell in board.cells():
        a = vm.resolve(cell)
        if a.is_const:
            continue
        for other in sorted(threats[cell]):
            b = vm.resolve(other)
            if not b.is_const:
                q.add_pair_interaction(a, b, weight)


def _compile_coloured(p: ColouredPiecesProblem):
    threats = _threat_map(p.board, p.pieces)
    vm = _piece_varmap(p.board, p.initial, threats)
    for reg in p.regions:
        placed = reg.cells & p.initial
        if len(placed) > 1:
            raise InfeasibleError("region", sorted(placed), "two initial pieces in one region")
        if placed:
            for c in sorted(reg.cells - placed):
                vm.fix(c, 0, "region")
    _raise_conflict(vm)
    q = Qubo(vm.num_free)
    for reg in p.regions:
        if reg.cells & p.initial:
            continue
        q.add_square_penalty(1, [vm.resolve(c) for c in sorted(reg.cells)])
    _threat_pairs(q, vm, p.board, threats, 1)
    return q, vm


def build_coloured_pieces(p: ColouredPiecesProblem) -> Qubo:
    """Region one-hot terms plus one pair term per directed threat."""
    q, _ = _compile_coloured(p)
    return q


def default_lambda(p: MaxPiecesProblem) -> int:
    heaviest = max((p.weight(c) for c in p.board.cells()), default=1)
    return max(p.board.height * p.board.width, heaviest + 1)


def _compile_max(p: MaxPiecesProblem, lam=None):
    lam = lam if lam is not None else (p.lam if p.lam is not None else default_lambda(p))
    heaviest = max((p.weight(c) for c in p.board.cells()), default=1)
    if int(lam) != lam or lam < 2 or lam <= heaviest:
        raise ValueError(f"lambda must be an integer >= 2 and above the largest weight, got {lam}")
    threats = _threat_map(p.board, p.pieces)
    vm = _piece_varmap(p.board, p.initial, threats)
    q = Qubo(vm.num_free)
    for cell in p.board.cells():
        q.add_linear_term(vm.resolve(cell), -p.weight(cell))
    _threat_pairs(q, vm, p.board, threats, int(lam))
    return q, vm


def build_max_pieces(p: MaxPiecesProblem, lam=None) -> Qubo:
    """Reward every placed piece, penalise each directed threat by ``lam``."""
    q, _ = _compile_max(p, lam)
    return q
