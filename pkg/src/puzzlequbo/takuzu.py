"""Takuzu / Tango: variable elimination and QUBO construction."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .board import Cell, InfeasibleError, VarMap
from .problems import TakuzuProblem
from .qubo import Qubo

__all__ = [
    "NonRepetitionReport",
    "preprocess_takuzu",
    "ttp_windows",
    "build_ttp",
    "build_ttp_generalized",
    "check_global_nonrepetition",
]

THREE_HALVES = Fraction(3, 2)


def _raise_conflict(vm: VarMap) -> None:
    if vm.conflict is not None:
        raise InfeasibleError(vm.conflict.rule, vm.conflict.cells)


def _lines(p: TakuzuProblem):
    """(kind, cells, ones target, wraps) for every row and column."""
    for i in range(1, p.height + 1):
        yield "row", [(i, j) for j in range(1, p.width + 1)], p.row_target(i), p.wrap_cols
    for j in range(1, p.width + 1):
        yield "column", [(i, j) for i in range(1, p.height + 1)], p.col_target(j), p.wrap_rows


def _saturate(vm: VarMap, kind: str, cells, target: int) -> bool:
    values = [vm.value_of(c) for c in cells]
    ones = values.count(1)
    zeros = values.count(0)
    if ones > target or zeros > len(cells) - target:
        raise InfeasibleError("regularity", cells, f"{kind} cannot hold {target} ones")
    changed = False
    if ones == target and zeros < len(cells) - target:
        for c, v in zip(cells, values):
            if v is None:
                changed |= vm.fix(c, 0, "regularity")
    elif zeros == len(cells) - target and ones < target:
        for c, v in zip(cells, values):
            if v is None:
                changed |= vm.fix(c, 1, "regularity")
    return changed


def _pair_rule(vm: VarMap, cells, wraps: bool) -> bool:
    n = len(cells)
    changed = False
    stops = range(n) if wraps else range(n - 1)
    for k in stops:
        a, b = cells[k], cells[(k + 1) % n]
        va, vb = vm.value_of(a), vm.value_of(b)
        if va is None or va != vb:
            continue
        flanks = []
        if wraps:
            flanks = [cells[(k - 1) % n], cells[(k + 2) % n]]
        else:
            if k - 1 >= 0:
                flanks.append(cells[k - 1])
            if k + 2 < n:
                flanks.append(cells[k + 2])
        for f in flanks:
            if f not in (a, b):
                changed |= vm.fix(f, 1 - va, "repetition")
    return changed


def preprocess_takuzu(p: TakuzuProblem, alias_symbols: bool = True) -> VarMap:
    """Fix and alias cells until nothing more follows.

    Givens are fixed, symbols become parity aliases (which also carries a
    fixed endpoint over to its partner), full lines are completed with the
    opposite value, and two equal neighbours force the cells flanking them.
    ``alias_symbols=False`` leaves symbols for explicit penalty terms.
    """
    vm = VarMap(p.board)
    for c in sorted(p.zeros):
        vm.fix(c, 0, "given")
    for c in sorted(p.ones):
        vm.fix(c, 1, "given")
    _raise_conflict(vm)
    if alias_symbols:
        for s in p.symbols:
            if s.kind == "equal":
                vm.alias_equal(s.a, s.b)
            else:
                vm.alias_cross(s.a, s.b)
            _raise_conflict(vm)
    lines = list(_lines(p))
    changed = True
    while changed:
        changed = False
        for kind, cells, target, wraps in lines:
            changed |= _saturate(vm, kind, cells, target)
            _raise_conflict(vm)
            changed |= _pair_rule(vm, cells, wraps)
            _raise_conflict(vm)
    return vm


def ttp_windows(p: TakuzuProblem, generalized: bool = True) -> list:
    """Three-cell windows that may not be constant.

    Horizontal and vertical windows always; diagonal ones when the problem
    asks for them. Windows cross the seam of a wrapped dimension.
    """
    n, m = p.height, p.width
    wr = generalized and p.wrap_rows
    wc = generalized and p.wrap_cols
    row_starts = range(1, n + 1) if wr else range(1, n - 1)
    col_starts = range(1, m + 1) if wc else range(1, m - 1)

    def cell(r, c) -> Cell:
        return ((r - 1) % n + 1, (c - 1) % m + 1)

    out = []
    for i in range(1, n + 1):
        for j in col_starts:
            out.append(tuple(cell(i, j + k) for k in range(3)))
    for j in range(1, m + 1):
        for i in row_starts:
            out.append(tuple(cell(i + k, j) for k in range(3)))
    if generalized and p.diagonal_repetition:
        for i in row_starts:
            for j in col_starts:
                out.append(tuple(cell(i + k, j + k) for k in range(3)))
        left_starts = range(1, m + 1) if wc else range(3, m + 1)
        for i in row_starts:
            for j in left_starts:
                out.append(tuple(cell(i + k, j - k) for k in range(3)))
    return out


def _add_symbol_terms(q: Qubo, vm: VarMap, p: TakuzuProblem) -> None:
    for s in p.symbols:
        a, b = vm.resolve(s.a), vm.resolve(s.b)
        if s.kind == "equal":
            q.add_pair_interaction(a, b.negate(), 1)
            q.add_pair_interaction(a.negate(), b, 1)
        else:
            q.add_pair_interaction(a, b, 1)
            q.add_pair_interaction(a.negate(), b.negate(), 1)


def _compile(p: TakuzuProblem, vm: VarMap, generalized: bool, explicit_symbols: bool) -> Qubo:
    q = Qubo(vm.num_free)
    for window in ttp_windows(p, generalized):
        q.add_square_penalty(THREE_HALVES, [vm.resolve(c) for c in window])
    for _, cells, target, _ in _lines(p):
        q.add_square_penalty(target, [vm.resolve(c) for c in cells])
    if generalized:
        for cells, ones in p.regions:
            q.add_square_penalty(ones, [vm.resolve(c) for c in sorted(cells)])
    if explicit_symbols:
        _add_symbol_terms(q, vm, p)
    return q


def build_ttp(p: TakuzuProblem, vm: Optional[VarMap] = None, explicit_symbols: bool = False) -> Qubo:
    """Repetition windows plus row/column regularity over the reduced variables.

    ``explicit_symbols`` adds the equal/cross pair penalties instead of
    relying on aliasing; pair it with ``preprocess_takuzu(p, alias_symbols=False)``.
    """
    if p.regions or p.diagonal_repetition or p.wrap_rows or p.wrap_cols:
        raise ValueError("problem uses generalisations; use build_ttp_generalized")
    if vm is None:
        vm = preprocess_takuzu(p, alias_symbols=not explicit_symbols)
    _raise_conflict(vm)
    return _compile(p, vm, generalized=False, explicit_symbols=explicit_symbols)


def build_ttp_generalized(
    p: TakuzuProblem, vm: Optional[VarMap] = None, explicit_symbols: bool = False
) -> Qubo:
    """As :func:`build_ttp`, adding diagonal windows, regions and wrapped windows."""
    for i in range(1, p.height + 1):
        p.row_target(i)
    for j in range(1, p.width + 1):
        p.col_target(j)
    if vm is None:
        vm = preprocess_takuzu(p, alias_symbols=not explicit_symbols)
    _raise_conflict(vm)
    return _compile(p, vm, generalized=True, explicit_symbols=explicit_symbols)


@dataclass(frozen=True)
class NonRepetitionReport:
    ok: bool
    offending: Optional[tuple] = None


def _first_duplicate(lines: np.ndarray):
    sums = lines.sum(axis=1)
    for a in range(len(lines)):
        for b in range(a + 1, len(lines)):
            # identical iff the ones coincide: equal counts and overlap equal to the count
            same = sums[a] == sums[b] and int(lines[a] @ lines[b]) == sums[a]
            if same != bool(np.array_equal(lines[a], lines[b])):
                raise AssertionError("dot-product test disagrees with direct comparison")
            if same:
                return a + 1, b + 1
    return None


def check_global_nonrepetition(p: TakuzuProblem, values) -> NonRepetitionReport:
    """Report the first pair of identical rows, else identical columns."""
    values = np.asarray(values)
    if values.shape != (p.height, p.width):
        raise ValueError(f"board has shape {values.shape}, expected {(p.height, p.width)}")
    if not np.isin(values, (0, 1)).all():
        raise ValueError("board is incomplete: every cell needs a 0 or 1")
    values = values.astype(np.int64)
    dup = _first_duplicate(values)
    if dup:
        return NonRepetitionReport(False, ("row",) + dup)
    dup = _first_duplicate(values.T)
    if dup:
        return NonRepetitionReport(False, ("column",) + dup)
    return NonRepetitionReport(True)
