"""Problem descriptions shared by the formulations and the oracle.

These are plain data: no QUBO construction happens here, so the oracle
can depend on this module without touching any formulation code.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .board import Board, Cell, Region


@dataclass
class QueensProblem:
    """Generalised queens placement.

    ``diag_distance`` is either one value for every cell or a mapping from
    cell to value (missing cells get ``default_distance``). A value of 0
    disables the diagonal constraint, ``None`` makes it unbounded.
    ``family`` records which builder the instance was written for.
    """

    board: Board
    regions: list = field(default_factory=list)
    diag_distance: object = 0
    initial: frozenset = frozenset()
    row_targets: Optional[Sequence[int]] = None
    col_targets: Optional[Sequence[int]] = None
    family: str = "general"
    default_distance: Optional[int] = 0

    def __post_init__(self):
        self.initial = frozenset(self.initial)
        self.regions = list(self.regions)
        for cell in self.initial:
            if not self.board.is_active(cell):
                raise ValueError(f"initial queen {cell} is not on an active cell")
        for reg in self.regions:
            bad = [c for c in reg.cells if not self.board.is_active(c)]
            if bad:
                raise ValueError(f"region {reg.id} contains inactive cells {sorted(bad)}")
        if self.row_targets is not None:
            self.row_targets = tuple(self.row_targets)
            if len(self.row_targets) != self.board.height or min(self.row_targets) < 0:
                raise ValueError("row_targets must give one nonnegative count per row")
        if self.col_targets is not None:
            self.col_targets = tuple(self.col_targets)
            if len(self.col_targets) != self.board.width or min(self.col_targets) < 0:
                raise ValueError("col_targets must give one nonnegative count per column")
        if self.family not in ("nqueens", "lqueens", "general"):
            raise ValueError(f"unknown queens family {self.family!r}")

    def distance(self, cell: Cell) -> Optional[int]:
        if isinstance(self.diag_distance, Mapping):
            return self.diag_distance.get(cell, self.default_distance)
        return self.diag_distance

    def line_regions(self) -> list:
        """Rows and columns with targets, expressed as regions."""
        out = []
        if self.row_targets is not None:
            for i, r in enumerate(self.row_targets, start=1):
                out.append(Region(f"row{i}", self.board.row_cells(i), q=r))
        if self.col_targets is not None:
            for j, c in enumerate(self.col_targets, start=1):
                out.append(Region(f"col{j}", self.board.col_cells(j), q=c))
        return out

    @classmethod
    def nqueens(cls, n: int, initial=(), inactive=(), wrap_rows=False, wrap_cols=False):
        board = Board(n, n, frozenset(inactive), wrap_rows, wrap_cols)
        return cls(
            board,
            diag_distance=None,
            initial=frozenset(initial),
            row_targets=[1] * n,
            col_targets=[1] * n,
            family="nqueens",
        )

    @classmethod
    def lqueens(cls, region_grid: Sequence[Sequence[str]], initial=()):
        """LinkedIn Queens from a square grid of region labels."""
        n = len(region_grid)
        if any(len(row) != n for row in region_grid):
            raise ValueError("LQueens grid must be square")
        members: dict[str, set] = {}
        for i, row in enumerate(region_grid, start=1):
            for j, label in enumerate(row, start=1):
                members.setdefault(label, set()).add((i, j))
        regions = [Region(str(k), cells, q=1) for k, cells in members.items()]
        return cls(
            Board(n, n),
            regions=regions,
            diag_distance=1,
            initial=frozenset(initial),
            row_targets=[1] * n,
            col_targets=[1] * n,
            family="lqueens",
        )


@dataclass(frozen=True)
class PieceSpec:
    """Movement pattern: sliding rays with optional range, plus fixed jumps."""

    name: str
    letter: str
    rays: tuple = ()
    jumps: tuple = ()


_ROOK_DIRS = ((0, 1), (0, -1), (1, 0), (-1, 0))
_BISHOP_DIRS = ((1, 1), (1, -1), (-1, 1), (-1, -1))

PIECES = {
    "Q": PieceSpec("queen", "Q", tuple((d, None) for d in _ROOK_DIRS + _BISHOP_DIRS)),
    "R": PieceSpec("rook", "R", tuple((d, None) for d in _ROOK_DIRS)),
    "B": PieceSpec("bishop", "B", tuple((d, None) for d in _BISHOP_DIRS)),
    "N": PieceSpec(
        "knight",
        "N",
        jumps=((1, 2), (2, 1), (-1, 2), (-2, 1), (1, -2), (2, -1), (-1, -2), (-2, -1)),
    ),
    "K": PieceSpec("king", "K", tuple((d, 1) for d in _ROOK_DIRS + _BISHOP_DIRS)),
}


def _piece_grid(board: Board, pieces) -> dict:
    if isinstance(pieces, str):
        return {cell: pieces for cell in board.cells()}
    pieces = dict(pieces)
    for cell in board.cells():
        if cell not in pieces:
            raise ValueError(f"no piece type given for cell {cell}")
        if pieces[cell] not in PIECES:
            raise ValueError(f"unknown piece letter {pieces[cell]!r} at {cell}")
    return pieces


@dataclass
class ColouredPiecesProblem:
    """One piece per coloured region, no piece threatening another."""

    board: Board
    pieces: object
    regions: list
    initial: frozenset = frozenset()

    def __post_init__(self):
        self.pieces = _piece_grid(self.board, self.pieces)
        self.regions = list(self.regions)
        self.initial = frozenset(self.initial)
        seen: dict[Cell, str] = {}
        for reg in self.regions:
            for cell in reg.cells:
                if not self.board.is_active(cell):
                    raise ValueError(f"region {reg.id} contains inactive cell {cell}")
                if cell in seen:
                    raise ValueError(f"regions {seen[cell]} and {reg.id} overlap at {cell}")
                seen[cell] = reg.id
        missing = [c for c in self.board.cells() if c not in seen]
        if missing:
            raise ValueError(f"cells not covered by any region: {missing[:5]}")
        for cell in self.initial:
            if not self.board.is_active(cell):
                raise ValueError(f"initial piece {cell} is not on an active cell")


@dataclass
class MaxPiecesProblem:
    """Place as many (or as heavily weighted) pieces as possible without threats."""

    board: Board
    pieces: object
    initial: frozenset = frozenset()
    weights: Mapping = field(default_factory=dict)
    lam: Optional[int] = None

    def __post_init__(self):
        self.pieces = _piece_grid(self.board, self.pieces)
        self.initial = frozenset(self.initial)
        self.weights = dict(self.weights)
        for letter, w in self.weights.items():
            if letter not in PIECES or int(w) != w or w < 1:
                raise ValueError(f"weight for {letter!r} must be a positive integer")

    def weight(self, cell: Cell) -> int:
        return int(self.weights.get(self.pieces[cell], 1))


@dataclass
class TentsTreesProblem:
    trees: frozenset
    row_counts: Sequence[int]
    col_counts: Sequence[int]

    def __post_init__(self):
        self.trees = frozenset(self.trees)
        self.row_counts = tuple(self.row_counts)
        self.col_counts = tuple(self.col_counts)
        n, m = len(self.row_counts), len(self.col_counts)
        if n < 1 or m < 1:
            raise ValueError("tents board needs at least one row and column")
        for r, c in self.trees:
            if not (1 <= r <= n and 1 <= c <= m):
                raise ValueError(f"tree ({r},{c}) outside the board")
        if min(self.row_counts) < 0 or min(self.col_counts) < 0:
            raise ValueError("tent counts must be nonnegative")
        if sum(self.row_counts) != sum(self.col_counts):
            raise ValueError(
                f"inconsistent counts: rows sum to {sum(self.row_counts)}, "
                f"columns to {sum(self.col_counts)}"
            )

    @property
    def board(self) -> Board:
        return Board(len(self.row_counts), len(self.col_counts))


@dataclass(frozen=True)
class Symbol:
    """'=' (``kind == "equal"``) or 'x' (``kind == "cross"``) between two cells."""

    kind: str
    a: Cell
    b: Cell

    def __post_init__(self):
        if self.kind not in ("equal", "cross"):
            raise ValueError(f"unknown symbol kind {self.kind!r}")
        if self.a == self.b:
            raise ValueError("symbol endpoints must differ")


@dataclass
class TakuzuProblem:
    """Binary grid with regularity, repetition and symbol constraints.

    ``row_ones``/``col_ones`` default to half the line length. ``regions``
    is a sequence of ``(cells, ones)`` pairs. ``unique_lines`` switches on
    the Takuzu rule that no two rows (or columns) may coincide; Tango
    leaves it off.
    """

    height: int
    width: int
    zeros: frozenset = frozenset()
    ones: frozenset = frozenset()
    symbols: tuple = ()
    row_ones: Optional[Sequence[int]] = None
    col_ones: Optional[Sequence[int]] = None
    regions: tuple = ()
    diagonal_repetition: bool = False
    wrap_rows: bool = False
    wrap_cols: bool = False
    unique_lines: bool = True

    def __post_init__(self):
        if self.height < 1 or self.width < 1:
            raise ValueError("board dimensions must be positive")
        self.zeros = frozenset(self.zeros)
        self.ones = frozenset(self.ones)
        self.symbols = tuple(self.symbols)
        self.regions = tuple((frozenset(cells), int(m)) for cells, m in self.regions)
        both = self.zeros & self.ones
        if both:
            raise ValueError(f"cells given as both 0 and 1: {sorted(both)}")
        board = self.board
        for cell in self.zeros | self.ones:
            if not board.in_bounds(cell):
                raise ValueError(f"given cell {cell} outside the board")
        for s in self.symbols:
            if not (board.in_bounds(s.a) and board.in_bounds(s.b)):
                raise ValueError(f"symbol {s} has an endpoint outside the board")
        if self.row_ones is not None:
            self.row_ones = tuple(self.row_ones)
            if len(self.row_ones) != self.height:
                raise ValueError("row_ones needs one entry per row")
            if any(not 0 <= v <= self.width for v in self.row_ones):
                raise ValueError("row_ones entries must lie in [0, width]")
        if self.col_ones is not None:
            self.col_ones = tuple(self.col_ones)
            if len(self.col_ones) != self.width:
                raise ValueError("col_ones needs one entry per column")
            if any(not 0 <= v <= self.height for v in self.col_ones):
                raise ValueError("col_ones entries must lie in [0, height]")
        if self.wrap_rows and self.height < 3 or self.wrap_cols and self.width < 3:
            raise ValueError("a wrapped dimension needs at least 3 cells")

    @property
    def board(self) -> Board:
        return Board(self.height, self.width, frozenset(), self.wrap_rows, self.wrap_cols)

    def row_target(self, i: int) -> int:
        if self.row_ones is not None:
            return self.row_ones[i - 1]
        if self.width % 2:
            raise ValueError(f"balanced row target requested for odd width {self.width}")
        return self.width // 2

    def col_target(self, j: int) -> int:
        if self.col_ones is not None:
            return self.col_ones[j - 1]
        if self.height % 2:
            raise ValueError(f"balanced column target requested for odd height {self.height}")
        return self.height // 2

    def symbol_counts(self) -> dict[str, int]:
        """Counts of horizontal/vertical '=' and 'x' symbols between adjacent cells."""
        counts = {"He": 0, "Hc": 0, "Ve": 0, "Vc": 0, "long": 0}
        for s in self.symbols:
            (r1, c1), (r2, c2) = s.a, s.b
            suffix = "e" if s.kind == "equal" else "c"
            if r1 == r2 and abs(c1 - c2) == 1:
                counts["H" + suffix] += 1
            elif c1 == c2 and abs(r1 - r2) == 1:
                counts["V" + suffix] += 1
            else:
                counts["long"] += 1
        return counts

    def variable_bound(self) -> int:
        """NM minus givens minus symbols: the most variables left after reduction."""
        return self.height * self.width - len(self.zeros) - len(self.ones) - len(self.symbols)


def equality_region(cells: Sequence[Cell]) -> list:
    """'=' symbols chaining ``cells`` so they all share one value."""
    cells = list(cells)
    return [Symbol("equal", a, b) for a, b in zip(cells, cells[1:])]


def opposed_regions(first: Sequence[Cell], second: Sequence[Cell]) -> list:
    """Two equality regions forced to opposite values by a single 'x'."""
    return equality_region(first) + equality_region(second) + [Symbol("cross", first[0], second[0])]
