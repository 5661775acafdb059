"""Reader for the plain-text puzzle description format.

A file is a sequence of ``key: value`` sections. A key with nothing after
the colon opens a block that runs until the next key line::

    type: lqueens
    rows: 4
    cols: 4
    grid:
    a a b b
    a a b b
    c c d d
    c c d d
    initial:
    Q 1 2

Coordinates are 1-based ``row col``. Lines starting with ``#`` are
comments everywhere except inside the ``grid:`` block, where ``#`` marks an
inactive cell.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .board import Board, Region
from .problems import (
    PIECES,
    ColouredPiecesProblem,
    MaxPiecesProblem,
    QueensProblem,
    Symbol,
    TakuzuProblem,
    TentsTreesProblem,
)

TYPES = ("nqueens", "lqueens", "general-queens", "tents", "pieces-coloured", "pieces-max", "takuzu")
KEYS = (
    "type", "rows", "cols", "grid", "initial", "symbols", "counts-rows", "counts-cols",
    "regions", "toroidal", "lambda", "diagonal", "diagonal-repetition", "unique-lines", "weights",
)
REQUIRED = ("type", "rows", "cols", "grid")

_KEY_LINE = re.compile(r"^([A-Za-z][A-Za-z-]*):(.*)$")


class ParseError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None, col: Optional[int] = None, source: str = "<puzzle>"):
        self.line = line
        self.col = col
        self.source = source
        where = source
        if line is not None:
            where += f":{line}"
            if col is not None:
                where += f":{col}"
        super().__init__(f"{where}: {message}")


@dataclass
class _Section:
    key: str
    line: int
    value: str
    col: int
    body: list = field(default_factory=list)  # (lineno, text)


@dataclass
class Puzzle:
    """A parsed file: the typed problem plus what is needed to print boards."""

    type: str
    problem: object
    shape: tuple
    grid: list


def _sections(text: str, source: str) -> dict:
    sections: dict[str, _Section] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip()
        if not line.strip():
            continue
        if line.lstrip().startswith("#") and (current is None or current.key != "grid"):
            continue
        m = _KEY_LINE.match(line.strip())
        if m:
            key = m.group(1).lower()
            if key not in KEYS:
                raise ParseError(f"unknown key {key!r}", lineno, 1, source)
            if key in sections:
                raise ParseError(f"duplicate key {key!r}", lineno, 1, source)
            value = m.group(2).strip()
            col = line.index(":") + 2
            current = _Section(key, lineno, value, col)
            sections[key] = current
            continue
        if current is None:
            raise ParseError("content before the first key", lineno, 1, source)
        if current.value:
            raise ParseError(f"key {current.key!r} already has an inline value", lineno, 1, source)
        current.body.append((lineno, line))
    for key in REQUIRED:
        if key not in sections:
            raise ParseError(f"missing required key {key!r}", None, None, source)
    return sections


class _Reader:
    def __init__(self, sections: dict, source: str):
        self.s = sections
        self.source = source

    def error(self, msg, line=None, col=None):
        return ParseError(msg, line, col, self.source)

    def scalar(self, key: str, default=None) -> Optional[str]:
        sec = self.s.get(key)
        if sec is None:
            return default
        if not sec.value:
            raise self.error(f"key {key!r} needs a value on the same line", sec.line)
        return sec.value

    def integer(self, key: str, default=None, minimum=None):
        text = self.scalar(key)
        if text is None:
            return default
        sec = self.s[key]
        try:
            value = int(text)
        except ValueError:
            raise self.error(f"{key} must be an integer, got {text!r}", sec.line, sec.col) from None
        if minimum is not None and value < minimum:
            raise self.error(f"{key} must be at least {minimum}", sec.line, sec.col)
        return value

    def flag(self, key: str, default: bool) -> bool:
        text = self.scalar(key)
        if text is None:
            return default
        low = text.lower()
        if low in ("yes", "true", "on", "1"):
            return True
        if low in ("no", "false", "off", "0"):
            return False
        raise self.error(f"{key} must be yes or no", self.s[key].line, self.s[key].col)

    def block(self, key: str) -> list:
        sec = self.s.get(key)
        if sec is None:
            return []
        if sec.value:
            if key in ("counts-rows", "counts-cols"):
                return [(sec.line, sec.value)]
            raise self.error(f"key {key!r} opens a block; put its content on the following lines", sec.line)
        return sec.body

    def ints(self, lineno: int, tokens, expected: Optional[int] = None):
        if expected is not None and len(tokens) != expected:
            raise self.error(f"expected {expected} fields, got {len(tokens)}", lineno)
        out = []
        for t in tokens:
            try:
                out.append(int(t))
            except ValueError:
                raise self.error(f"expected an integer, got {t!r}", lineno) from None
        return out


def _cell(reader: _Reader, lineno: int, r: int, c: int, shape) -> tuple:
    if not (1 <= r <= shape[0] and 1 <= c <= shape[1]):
        raise reader.error(f"cell ({r},{c}) outside the {shape[0]}x{shape[1]} board", lineno)
    return (r, c)


def parse(text: str, source: str = "<puzzle>") -> Puzzle:
    """Parse a puzzle file into a typed problem. Raises :class:`ParseError`."""
    reader = _Reader(_sections(text, source), source)
    kind = reader.scalar("type").lower()
    if kind not in TYPES:
        sec = reader.s["type"]
        raise reader.error(f"unknown puzzle type {kind!r}", sec.line, sec.col)
    n = reader.integer("rows", minimum=1)
    m = reader.integer("cols", minimum=1)
    shape = (n, m)
    grid_lines = reader.block("grid")
    if len(grid_lines) != n:
        line = grid_lines[-1][0] if grid_lines else reader.s["grid"].line
        raise reader.error(f"grid has {len(grid_lines)} lines, expected {n}", line)
    grid = []
    for lineno, line in grid_lines:
        tokens = line.split()
        if len(tokens) != m:
            raise reader.error(f"grid line has {len(tokens)} tokens, expected {m}", lineno, 1)
        grid.append(tokens)
    wrap = (reader.scalar("toroidal") or "none").lower()
    if wrap not in ("none", "rows", "cols", "both"):
        sec = reader.s["toroidal"]
        raise reader.error("toroidal must be none, rows, cols or both", sec.line, sec.col)
    wrap_rows = wrap in ("rows", "both")
    wrap_cols = wrap in ("cols", "both")

    builders = {
        "nqueens": _queens,
        "lqueens": _queens,
        "general-queens": _queens,
        "tents": _tents,
        "pieces-coloured": _pieces,
        "pieces-max": _pieces,
        "takuzu": _takuzu,
    }
    try:
        problem = builders[kind](reader, kind, shape, grid, grid_lines, wrap_rows, wrap_cols)
    except ValueError as exc:
        if isinstance(exc, ParseError):
            raise
        raise reader.error(str(exc)) from None
    return Puzzle(kind, problem, shape, grid)


def _grid_tokens(reader, grid, grid_lines, allowed):
    for (lineno, _), row in zip(grid_lines, grid):
        for k, tok in enumerate(row, start=1):
            if allowed is not None and tok not in allowed:
                raise reader.error(f"unexpected grid token {tok!r}", lineno, k)


def _initial(reader, shape, letters):
    out = {}
    for lineno, line in reader.block("initial"):
        tokens = line.split()
        if len(tokens) != 3 or tokens[0] not in letters:
            raise reader.error(f"initial lines look like '{letters[0]} row col'", lineno)
        r, c = reader.ints(lineno, tokens[1:])
        out[_cell(reader, lineno, r, c, shape)] = tokens[0]
    return out


def _regions(reader, shape, default_q=1, with_t=True):
    """``R<id> q [t]`` headers followed by ``row col`` member lines."""
    regions = {}
    order = []
    current = None
    for lineno, line in reader.block("regions"):
        tokens = line.split()
        if tokens and tokens[0].startswith("R"):
            rid = tokens[0][1:]
            if not rid:
                raise reader.error("region header needs an id after 'R'", lineno)
            nums = reader.ints(lineno, tokens[1:])
            q = nums[0] if nums else default_q
            t = nums[1] if len(nums) > 1 and with_t else 0
            if len(nums) > (2 if with_t else 1):
                raise reader.error("too many fields in region header", lineno)
            if rid in regions:
                raise reader.error(f"region {rid!r} declared twice", lineno)
            regions[rid] = {"q": q, "t": t, "cells": set(), "line": lineno}
            order.append(rid)
            current = rid
        else:
            if current is None:
                raise reader.error("region member before any 'R<id>' header", lineno)
            r, c = reader.ints(lineno, tokens, expected=2)
            regions[current]["cells"].add(_cell(reader, lineno, r, c, shape))
    return regions, order


def _counts(reader, key, length):
    lines = reader.block(key)
    if not lines:
        return None
    tokens = []
    for _, line in lines:
        tokens.extend(line.split())
    values = reader.ints(lines[0][0], tokens)
    if len(values) != length:
        raise reader.error(f"{key} needs {length} values, got {len(values)}", lines[0][0])
    return values


def _queens(reader, kind, shape, grid, grid_lines, wrap_rows, wrap_cols):
    n, m = shape
    inactive = {(i, j) for i, row in enumerate(grid, 1) for j, t in enumerate(row, 1) if t == "#"}
    initial = set(_initial(reader, shape, ("Q",)))
    if kind == "nqueens":
        if n != m:
            raise reader.error("nqueens needs a square board")
        _grid_tokens(reader, grid, grid_lines, {".", "#", "Q"})
        initial |= {(i, j) for i, row in enumerate(grid, 1) for j, t in enumerate(row, 1) if t == "Q"}
        return QueensProblem.nqueens(n, initial, inactive, wrap_rows, wrap_cols)

    labels: dict[str, set] = {}
    for i, row in enumerate(grid, 1):
        for j, t in enumerate(row, 1):
            if t not in (".", "#"):
                labels.setdefault(t, set()).add((i, j))
    extra, order = _regions(reader, shape)
    regions = []
    for label in sorted(labels):
        spec = extra.pop(label, None)
        cells = labels[label] | (spec["cells"] if spec else set())
        q, t = (spec["q"], spec["t"]) if spec else (1, 0)
        regions.append(Region(label, cells, q=q, t=t))
    for rid in order:
        if rid in extra:
            spec = extra[rid]
            regions.append(Region(rid, spec["cells"], q=spec["q"], t=spec["t"]))

    if kind == "lqueens":
        if n != m:
            raise reader.error("lqueens needs a square board")
        if inactive:
            raise reader.error("lqueens boards cannot have inactive cells")
        p = QueensProblem(
            Board(n, n, frozenset(), wrap_rows, wrap_cols),
            regions=regions,
            diag_distance=1,
            initial=frozenset(initial),
            row_targets=[1] * n,
            col_targets=[1] * n,
            family="lqueens",
        )
        return p

    diag = (reader.scalar("diagonal") or "0").lower()
    if diag in ("inf", "unbounded", "all"):
        distance = None
    else:
        try:
            distance = int(diag)
        except ValueError:
            sec = reader.s["diagonal"]
            raise reader.error("diagonal must be an integer or 'inf'", sec.line, sec.col) from None
    return QueensProblem(
        Board(n, m, frozenset(inactive), wrap_rows, wrap_cols),
        regions=regions,
        diag_distance=distance,
        initial=frozenset(initial),
        row_targets=_counts(reader, "counts-rows", n),
        col_targets=_counts(reader, "counts-cols", m),
        family="general",
    )


def _tents(reader, kind, shape, grid, grid_lines, wrap_rows, wrap_cols):
    _grid_tokens(reader, grid, grid_lines, {"T", "."})
    if wrap_rows or wrap_cols:
        raise reader.error("tents boards do not wrap")
    trees = {(i, j) for i, row in enumerate(grid, 1) for j, t in enumerate(row, 1) if t == "T"}
    rows = _counts(reader, "counts-rows", shape[0])
    cols = _counts(reader, "counts-cols", shape[1])
    if rows is None or cols is None:
        raise reader.error("tents needs counts-rows and counts-cols")
    return TentsTreesProblem(trees, rows, cols)


def _pieces(reader, kind, shape, grid, grid_lines, wrap_rows, wrap_cols):
    _grid_tokens(reader, grid, grid_lines, set(PIECES) | {"#"})
    n, m = shape
    inactive = {(i, j) for i, row in enumerate(grid, 1) for j, t in enumerate(row, 1) if t == "#"}
    board = Board(n, m, frozenset(inactive), wrap_rows, wrap_cols)
    pieces = {(i, j): t for i, row in enumerate(grid, 1) for j, t in enumerate(row, 1) if t != "#"}
    initial = frozenset(_initial(reader, shape, ("Q",) + tuple(PIECES)))
    if kind == "pieces-coloured":
        specs, order = _regions(reader, shape)
        regions = [Region(rid, specs[rid]["cells"]) for rid in order]
        return ColouredPiecesProblem(board, pieces, regions, initial)
    weights = {}
    for lineno, line in reader.block("weights"):
        tokens = line.split()
        if len(tokens) != 2 or tokens[0] not in PIECES:
            raise reader.error("weight lines look like '<piece letter> <weight>'", lineno)
        weights[tokens[0]] = reader.ints(lineno, tokens[1:])[0]
    lam = reader.integer("lambda")
    return MaxPiecesProblem(board, pieces, initial, weights, lam)


def _takuzu(reader, kind, shape, grid, grid_lines, wrap_rows, wrap_cols):
    _grid_tokens(reader, grid, grid_lines, {"0", "1", "."})
    zeros = {(i, j) for i, row in enumerate(grid, 1) for j, t in enumerate(row, 1) if t == "0"}
    ones = {(i, j) for i, row in enumerate(grid, 1) for j, t in enumerate(row, 1) if t == "1"}
    for cell, v in _initial(reader, shape, ("1", "0")).items():
        (ones if v == "1" else zeros).add(cell)
    symbols = []
    for lineno, line in reader.block("symbols"):
        tokens = line.split()
        if len(tokens) != 5 or tokens[0] not in ("=", "x"):
            raise reader.error("symbol lines look like '= r1 c1 r2 c2' or 'x r1 c1 r2 c2'", lineno)
        r1, c1, r2, c2 = reader.ints(lineno, tokens[1:])
        a = _cell(reader, lineno, r1, c1, shape)
        b = _cell(reader, lineno, r2, c2, shape)
        if a == b:
            raise reader.error("symbol endpoints must differ", lineno)
        symbols.append(Symbol("equal" if tokens[0] == "=" else "cross", a, b))
    specs, order = _regions(reader, shape, default_q=0, with_t=False)
    regions = [(specs[rid]["cells"], specs[rid]["q"]) for rid in order]
    return TakuzuProblem(
        shape[0],
        shape[1],
        zeros=frozenset(zeros),
        ones=frozenset(ones),
        symbols=tuple(symbols),
        row_ones=_counts(reader, "counts-rows", shape[0]),
        col_ones=_counts(reader, "counts-cols", shape[1]),
        regions=tuple(regions),
        diagonal_repetition=reader.flag("diagonal-repetition", False),
        wrap_rows=wrap_rows,
        wrap_cols=wrap_cols,
        unique_lines=reader.flag("unique-lines", True),
    )


# -- boards in and out -------------------------------------------------------------


def format_board(puzzle: Puzzle, values) -> list:
    """Solution rows using the puzzle's own alphabet."""
    values = np.asarray(values)
    out = []
    for i, row in enumerate(puzzle.grid):
        tokens = []
        for j, tok in enumerate(row):
            v = int(values[i, j])
            if puzzle.type == "takuzu":
                tokens.append(str(v))
            elif tok == "#":
                tokens.append("#")
            elif puzzle.type == "tents":
                tokens.append("T" if tok == "T" else ("A" if v else "."))
            elif puzzle.type.startswith("pieces"):
                tokens.append(tok if v else ".")
            else:
                tokens.append("Q" if v else ".")
        out.append(" ".join(tokens))
    return out


def parse_solution(puzzle: Puzzle, text: str, source: str = "<solution>") -> np.ndarray:
    """Read a solution grid written in the output alphabet of :func:`format_board`."""
    if puzzle.type == "takuzu":
        ones, zeros = {"1"}, {"0"}
    elif puzzle.type == "tents":
        ones, zeros = {"A", "1"}, {".", "T", "0"}
    elif puzzle.type.startswith("pieces"):
        ones, zeros = set(PIECES) | {"1"}, {".", "#", "0"}
    else:
        ones, zeros = {"Q", "1"}, {".", "#", "0"}
    rows = [(k, line.split()) for k, line in enumerate(text.splitlines(), 1) if line.strip()]
    n, m = puzzle.shape
    if len(rows) != n:
        raise ParseError(f"solution has {len(rows)} rows, expected {n}", None, None, source)
    values = np.zeros(puzzle.shape, dtype=np.int8)
    for i, (lineno, tokens) in enumerate(rows):
        if len(tokens) != m:
            raise ParseError(f"solution row has {len(tokens)} tokens, expected {m}", lineno, 1, source)
        for j, tok in enumerate(tokens):
            if tok in ones:
                values[i, j] = 1
            elif tok not in zeros:
                raise ParseError(f"unexpected solution token {tok!r}", lineno, j + 1, source)
    return values
