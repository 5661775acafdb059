"""Ground truth that never looks at a QUBO.

Each puzzle is rewritten directly from its rules into counting
constraints ("the cells in this set hold a total in this allowed set").
:func:`verify` evaluates them on a finished board; :func:`enumerate_solutions`
runs a depth-first search over cells in row-major order, trying 1 before
0, and prunes whenever a constraint can no longer reach an allowed total.

Geometry (diagonals, piece moves, windows) is recomputed here on purpose
rather than shared with the formulation modules.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .problems import (
    PIECES,
    ColouredPiecesProblem,
    MaxPiecesProblem,
    QueensProblem,
    TakuzuProblem,
    TentsTreesProblem,
)

__all__ = ["VerifyReport", "Enumeration", "verify", "enumerate_solutions"]


@dataclass
class VerifyReport:
    satisfied: bool
    violations: list = field(default_factory=list)


@dataclass
class Enumeration:
    count: int
    solutions: list
    capped: bool
    best_weight: Optional[int] = None


@dataclass
class _Model:
    shape: tuple
    cells: list
    constraints: list = field(default_factory=list)  # (name, cells, allowed totals)
    leaf_check: Optional[Callable] = None
    weights: Optional[dict] = None

    def add(self, name, cells, allowed):
        self.constraints.append((name, tuple(cells), frozenset(allowed)))


def _wrap(shape, wrap_rows, wrap_cols, r, c):
    n, m = shape
    if wrap_rows:
        r = (r - 1) % n + 1
    if wrap_cols:
        c = (c - 1) % m + 1
    if 1 <= r <= n and 1 <= c <= m:
        return (r, c)
    return None


def _all_cells(shape):
    return [(r, c) for r in range(1, shape[0] + 1) for c in range(1, shape[1] + 1)]


def _walk(shape, wraps, start, step, reach):
    """Cells visited moving ``step`` at a time from ``start``, at most ``reach`` moves."""
    out = []
    r, c = start
    limit = shape[0] * shape[1] if reach is None else reach
    for k in range(1, limit + 1):
        nxt = _wrap(shape, *wraps, r + step[0] * k, c + step[1] * k)
        if nxt is None or nxt == start:
            break
        out.append(nxt)
    return out


def _not_both(model: _Model, name: str, pairs) -> None:
    seen = set()
    for a, b in pairs:
        key = (a, b) if a < b else (b, a)
        if a != b and key not in seen:
            seen.add(key)
            model.add(name, key, {0, 1})


# -- models per family --------------------------------------------------------------


def _queens_model(p: QueensProblem) -> _Model:
    board = p.board
    shape = board.shape
    wraps = (board.wrap_rows, board.wrap_cols)
    model = _Model(shape, _all_cells(shape))
    for cell in board.inactive:
        model.add("inactive", [cell], {0})
    for cell in p.initial:
        model.add("initial", [cell], {1})
    active = [c for c in model.cells if c not in board.inactive]
    if p.row_targets is not None:
        for i, t in enumerate(p.row_targets, start=1):
            model.add("row", [c for c in active if c[0] == i], {t})
    if p.col_targets is not None:
        for j, t in enumerate(p.col_targets, start=1):
            model.add("column", [c for c in active if c[1] == j], {t})
    for reg in p.regions:
        base = reg.q - reg.p
        model.add("region", sorted(reg.cells), {base, base + reg.t})
    pairs = []
    for cell in active:
        d = p.distance(cell)
        if d == 0:
            continue
        for step in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
            for other in _walk(shape, wraps, cell, step, d):
                if other not in board.inactive:
                    pairs.append((cell, other))
    _not_both(model, "diagonal", pairs)
    return model


def _threats(shape, wraps, letter, cell):
    spec = PIECES[letter]
    out = set()
    for step, reach in spec.rays:
        out.update(_walk(shape, wraps, cell, step, reach))
    for dr, dc in spec.jumps:
        nxt = _wrap(shape, *wraps, cell[0] + dr, cell[1] + dc)
        if nxt is not None and nxt != cell:
            out.add(nxt)
    return out


def _piece_model(p) -> _Model:
    board = p.board
    shape = board.shape
    wraps = (board.wrap_rows, board.wrap_cols)
    model = _Model(shape, _all_cells(shape))
    for cell in board.inactive:
        model.add("inactive", [cell], {0})
    for cell in p.initial:
        model.add("initial", [cell], {1})
    pairs = []
    for cell in model.cells:
        if cell in board.inactive:
            continue
        for other in _threats(shape, wraps, p.pieces[cell], cell):
            if other not in board.inactive:
                pairs.append((cell, other))
    _not_both(model, "threat", pairs)
    return model


def _coloured_model(p: ColouredPiecesProblem) -> _Model:
    model = _piece_model(p)
    for reg in p.regions:
        model.add("region", sorted(reg.cells), {1})
    return model


def _max_model(p: MaxPiecesProblem) -> _Model:
    model = _piece_model(p)
    model.weights = {c: p.weight(c) for c in model.cells if c not in p.board.inactive}
    return model


def _tents_model(p: TentsTreesProblem) -> _Model:
    shape = (len(p.row_counts), len(p.col_counts))
    model = _Model(shape, _all_cells(shape))
    orth = ((0, 1), (1, 0), (0, -1), (-1, 0))

    def neighbours(cell, steps):
        out = []
        for dr, dc in steps:
            nxt = _wrap(shape, False, False, cell[0] + dr, cell[1] + dc)
            if nxt is not None:
                out.append(nxt)
        return out

    for tree in p.trees:
        model.add("tree", [tree], {0})
        spots = [c for c in neighbours(tree, orth) if c not in p.trees]
        model.add("region", spots, set(range(1, len(spots) + 1)))
    for cell in model.cells:
        if cell not in p.trees and not any(n in p.trees for n in neighbours(cell, orth)):
            model.add("tent-placement", [cell], {0})
    for i, t in enumerate(p.row_counts, start=1):
        model.add("row", [c for c in model.cells if c[0] == i], {t})
    for j, t in enumerate(p.col_counts, start=1):
        model.add("column", [c for c in model.cells if c[1] == j], {t})
    kings = [(dr, dc) for dr in (-1, 0, 1) for dc in (-1, 0, 1) if (dr, dc) != (0, 0)]
    pairs = [(c, n) for c in model.cells for n in neighbours(c, kings)]
    _not_both(model, "adjacency", pairs)
    return model


def _takuzu_model(p: TakuzuProblem) -> _Model:
    shape = (p.height, p.width)
    model = _Model(shape, _all_cells(shape))
    for cell in p.zeros:
        model.add("given", [cell], {0})
    for cell in p.ones:
        model.add("given", [cell], {1})
    for i in range(1, p.height + 1):
        model.add("regularity", [(i, j) for j in range(1, p.width + 1)], {p.row_target(i)})
    for j in range(1, p.width + 1):
        model.add("regularity", [(i, j) for i in range(1, p.height + 1)], {p.col_target(j)})
    steps = [(0, 1), (1, 0)]
    if p.diagonal_repetition:
        steps += [(1, 1), (1, -1)]
    wraps = (p.wrap_rows, p.wrap_cols)
    seen = set()
    for cell in model.cells:
        for dr, dc in steps:
            window = [cell]
            for k in (1, 2):
                nxt = _wrap(shape, *wraps, cell[0] + dr * k, cell[1] + dc * k)
                if nxt is None:
                    break
                window.append(nxt)
            if len(window) == 3 and (dr, dc, tuple(window)) not in seen:
                seen.add((dr, dc, tuple(window)))
                model.add("repetition", window, {1, 2})
    for cells, ones in p.regions:
        model.add("region", sorted(cells), {ones})
    for s in p.symbols:
        if s.kind == "equal":
            model.add("equal-symbol", [s.a, s.b], {0, 2})
        else:
            model.add("cross-symbol", [s.a, s.b], {1})
    if p.unique_lines:
        model.leaf_check = _distinct_lines
    return model


def _distinct_lines(values: np.ndarray) -> list:
    out = []
    for axis, lines in (("row", values), ("column", values.T)):
        for a in range(len(lines)):
            for b in range(a + 1, len(lines)):
                if np.array_equal(lines[a], lines[b]):
                    out.append(("non-repetition", (axis, a + 1, b + 1)))
    return out


def _model(problem) -> _Model:
    if isinstance(problem, QueensProblem):
        return _queens_model(problem)
    if isinstance(problem, TentsTreesProblem):
        return _tents_model(problem)
    if isinstance(problem, TakuzuProblem):
        return _takuzu_model(problem)
    if isinstance(problem, ColouredPiecesProblem):
        return _coloured_model(problem)
    if isinstance(problem, MaxPiecesProblem):
        return _max_model(problem)
    raise ValueError(f"unknown problem type {type(problem).__name__}")


# -- verification ------------------------------------------------------------------


def verify(problem, assignment) -> VerifyReport:
    """Check a complete board (rows x cols array of 0/1) against every rule."""
    model = _model(problem)
    values = np.asarray(assignment)
    if values.shape != model.shape:
        raise ValueError(f"assignment has shape {values.shape}, expected {model.shape}")
    if not np.isin(values, (0, 1)).all():
        raise ValueError("assignment is incomplete: every cell needs a 0 or 1")
    violations = []
    for name, cells, allowed in model.constraints:
        total = sum(int(values[r - 1, c - 1]) for r, c in cells)
        if total not in allowed:
            violations.append((name, cells))
    if model.leaf_check is not None:
        violations.extend(model.leaf_check(values))
    return VerifyReport(not violations, violations)


# -- enumeration -------------------------------------------------------------------


def enumerate_solutions(problem, cap: int = 10_000) -> Enumeration:
    """Depth-first enumeration of every valid board, up to ``cap`` of them.

    For the max-pieces problem the boards returned are those of maximum
    total weight, and ``best_weight`` holds that weight.
    """
    model = _model(problem)
    cells = model.cells
    index = {c: k for k, c in enumerate(cells)}
    ncells = len(cells)
    members = [[] for _ in cells]
    allowed = []
    remaining = []
    for k, (_, ccells, allow) in enumerate(model.constraints):
        for c in ccells:
            members[index[c]].append(k)
        allowed.append(sorted(allow))
        remaining.append(len(ccells))
    sums = [0] * len(model.constraints)
    values = np.zeros(model.shape, dtype=np.int8)
    found: list = []
    state = {"count": 0, "capped": False, "best": None}
    weights = model.weights
    suffix_weight = None
    if weights is not None:
        suffix_weight = [0] * (ncells + 1)
        for k in range(ncells - 1, -1, -1):
            suffix_weight[k] = suffix_weight[k + 1] + weights.get(cells[k], 0)

    def feasible(k):
        lo, hi = sums[k], sums[k] + remaining[k]
        return any(lo <= a <= hi for a in allowed[k])

    def record(weight):
        if model.leaf_check is not None and model.leaf_check(values):
            return
        if weights is not None:
            if state["best"] is None or weight > state["best"]:
                state["best"] = weight
                state["count"] = 0
                found.clear()
            elif weight < state["best"]:
                return
        if len(found) >= cap:
            state["capped"] = True
            return
        state["count"] += 1
        found.append(values.copy())

    def dfs(pos, weight):
        if state["capped"] and weights is None:
            return
        if pos == ncells:
            record(weight)
            return
        if weights is not None and state["best"] is not None:
            if weight + suffix_weight[pos] < state["best"]:
                return
        cell = cells[pos]
        for v in (1, 0):
            ok = True
            touched = members[pos]
            for k in touched:
                sums[k] += v
                remaining[k] -= 1
            for k in touched:
                if not feasible(k):
                    ok = False
                    break
            if ok:
                values[cell[0] - 1, cell[1] - 1] = v
                extra = weights.get(cell, 0) if (weights is not None and v) else 0
                dfs(pos + 1, weight + extra)
                values[cell[0] - 1, cell[1] - 1] = 0
            for k in touched:
                sums[k] -= v
                remaining[k] += 1

    dfs(0, 0)
    return Enumeration(state["count"], found, state["capped"], state["best"])
