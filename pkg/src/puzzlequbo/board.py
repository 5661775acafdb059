"""Board geometry and the cell-to-variable map used by every formulation.

Cells are ``(row, col)`` tuples, 1-based, matching the usual puzzle
indexing. A :class:`VarMap` tracks which cells are free variables, which
are fixed constants and which are parity aliases of another cell.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from .qubo import CONST0, CONST1, Literal, neg, pos

Cell = tuple[int, int]

UNBOUNDED = None

DIAGONAL_DIRECTIONS = ((1, 1), (1, -1), (-1, 1), (-1, -1))


class InfeasibleError(Exception):
    """A contradiction was derived while fixing or aliasing cells."""

    def __init__(self, rule: str, cells=(), detail: str = ""):
        self.rule = rule
        self.cells = tuple(cells)
        msg = f"infeasible: {rule}"
        if self.cells:
            msg += " at " + ", ".join(f"({r},{c})" for r, c in self.cells)
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


@dataclass(frozen=True)
class Board:
    height: int
    width: int
    inactive: frozenset = frozenset()
    wrap_rows: bool = False
    wrap_cols: bool = False

    def __post_init__(self):
        if self.height < 1 or self.width < 1:
            raise ValueError("board dimensions must be positive")
        object.__setattr__(self, "inactive", frozenset(self.inactive))
        for r, c in self.inactive:
            if not (1 <= r <= self.height and 1 <= c <= self.width):
                raise ValueError(f"inactive cell ({r},{c}) outside the board")
        if len(self.inactive) == self.height * self.width:
            raise ValueError("board needs at least one active cell")

    @property
    def shape(self) -> tuple[int, int]:
        return self.height, self.width

    def in_bounds(self, cell: Cell) -> bool:
        r, c = cell
        return 1 <= r <= self.height and 1 <= c <= self.width

    def is_active(self, cell: Cell) -> bool:
        return self.in_bounds(cell) and cell not in self.inactive

    def normalize(self, r: int, c: int) -> Optional[Cell]:
        """Wrap coordinates where the board wraps; None when off the board."""
        if self.wrap_rows:
            r = (r - 1) % self.height + 1
        if self.wrap_cols:
            c = (c - 1) % self.width + 1
        if 1 <= r <= self.height and 1 <= c <= self.width:
            return (r, c)
        return None

    def cells(self) -> Iterator[Cell]:
        """Active cells in row-major order."""
        for r in range(1, self.height + 1):
            for c in range(1, self.width + 1):
                if (r, c) not in self.inactive:
                    yield (r, c)

    def row_cells(self, r: int) -> list[Cell]:
        return [(r, c) for c in range(1, self.width + 1) if (r, c) not in self.inactive]

    def col_cells(self, c: int) -> list[Cell]:
        return [(r, c) for r in range(1, self.height + 1) if (r, c) not in self.inactive]

    @property
    def num_active(self) -> int:
        return self.height * self.width - len(self.inactive)

    def toroidal_warning(self) -> None:
        """Warn when a wrapped square side has a prime factor below 5."""
        for flag, side in ((self.wrap_rows, self.height), (self.wrap_cols, self.width)):
            if flag and side > 1 and _min_prime_factor(side) < 5:
                warnings.warn(
                    f"toroidal side {side} has a prime factor below 5; "
                    "queen placements on it are likely unsolvable",
                    stacklevel=2,
                )


def _min_prime_factor(n: int) -> int:
    p = 2
    while p * p <= n:
        if n % p == 0:
            return p
        p += 1
    return n


@dataclass
class Region:
    """A set of cells with a target count.

    ``t == 1`` allows ``q`` or ``q + 1`` marked cells; ``p`` counts marks
    already placed by initial conditions.
    """

    id: str
    cells: frozenset
    q: int = 1
    t: int = 0
    p: int = 0

    def __post_init__(self):
        self.cells = frozenset(self.cells)
        if self.t not in (0, 1):
            raise ValueError(f"region {self.id}: t must be 0 or 1")
        if self.q < 0 or self.p < 0:
            raise ValueError(f"region {self.id}: counts must be nonnegative")

    @property
    def remaining(self) -> int:
        return self.q - self.p


def diagonal_cells(board: Board, cell: Cell, distance=UNBOUNDED, mode: str = "others") -> set[Cell]:
    """Active cells on the four diagonals of ``cell`` within ``distance`` steps.

    ``mode`` is ``"full"`` (includes the cell), ``"others"`` (every diagonal
    cell but the cell itself) or ``"pp"`` (only cells after ``cell`` in
    row-major order, so each unordered pair is produced once when summed
    over the board). ``distance=None`` walks until the board edge, or until
    a wrapped diagonal closes on itself.
    """
    if mode not in ("full", "others", "pp"):
        raise ValueError(f"unknown diagonal mode {mode!r}")
    if distance is not None and distance < 0:
        raise ValueError("distance must be nonnegative")
    r0, c0 = cell
    limit = board.height * board.width
    if distance is not None:
        limit = min(limit, distance)
    found: set[Cell] = set()
    for dr, dc in DIAGONAL_DIRECTIONS:
        for k in range(1, limit + 1):
            nxt = board.normalize(r0 + dr * k, c0 + dc * k)
            if nxt is None or nxt == cell:
                break
            if nxt not in board.inactive:
                found.add(nxt)
    if mode == "full":
        if board.is_active(cell):
            found.add(cell)
    elif mode == "pp":
        found = {x for x in found if x > cell}
    return found


_ORTHOGONAL = ((0, 1), (1, 0), (0, -1), (-1, 0))
_DIAGONAL_STEPS = ((1, 1), (1, -1), (-1, 1), (-1, -1))


def adjacency_cells(
    board: Board, cell: Cell, include_orthogonal: bool = True, below_only: bool = False
) -> set[Cell]:
    """King-move neighbours of ``cell`` that are active.

    With ``below_only`` only the right neighbour and the lower row are kept,
    so summing pair terms over the board visits each adjacent pair once.
    """
    r, c = cell
    if below_only:
        offsets = [(1, -1), (1, 1)]
        if include_orthogonal:
            offsets += [(0, 1), (1, 0)]
    else:
        offsets = list(_DIAGONAL_STEPS)
        if include_orthogonal:
            offsets += list(_ORTHOGONAL)
    found = set()
    for dr, dc in offsets:
        nxt = board.normalize(r + dr, c + dc)
        if nxt is not None and nxt != cell and nxt not in board.inactive:
            found.add(nxt)
    return found


def orthogonal_cells(board: Board, cell: Cell) -> set[Cell]:
    r, c = cell
    found = set()
    for dr, dc in _ORTHOGONAL:
        nxt = board.normalize(r + dr, c + dc)
        if nxt is not None and nxt != cell and nxt not in board.inactive:
            found.add(nxt)
    return found


@dataclass(frozen=True)
class Conflict:
    rule: str
    cells: tuple


def _rep_key(cell: Cell) -> tuple[int, int]:
    # leftmost column first, then topmost row
    return (cell[1], cell[0])


class VarMap:
    """Union-find with parity over board cells.

    Each class has a root; the root is either fixed to a constant or is a
    free optimisation variable. Roots are always the leftmost (then
    topmost) cell of their class. Free variables are numbered densely in
    row-major order of their roots.
    """

    def __init__(self, board: Board):
        self.board = board
        self._parent: dict[Cell, tuple[Cell, int]] = {}
        self._fixed: dict[Cell, int] = {}
        self.conflict: Optional[Conflict] = None
        self._index: Optional[dict[Cell, int]] = None
        for cell in board.inactive:
            self._fixed[cell] = 0

    # -- union-find core ------------------------------------------------------

    def find(self, cell: Cell) -> tuple[Cell, int]:
        """Return ``(root, parity)`` with ``value(cell) = value(root) XOR parity``."""
        path = []
        cur, par = cell, 0
        while cur in self._parent:
            nxt, p = self._parent[cur]
            path.append((cur, par))
            par ^= p
            cur = nxt
        # path compression: par is the full parity from `cell` to root
        total = par
        for node, prefix in path:
            self._parent[node] = (cur, total ^ prefix)
        return cur, total

    def _record(self, rule: str, cells) -> None:
        if self.conflict is None:
            self.conflict = Conflict(rule, tuple(cells))

    def _check_cell(self, cell: Cell) -> None:
        if not self.board.in_bounds(cell):
            raise ValueError(f"cell {cell} outside the board")

    def fix(self, cell: Cell, value: int, rule: str = "fixed") -> bool:
        """Fix ``cell`` to ``value``. Returns True when something changed."""
        self._check_cell(cell)
        if value not in (0, 1):
            raise ValueError("fixed value must be 0 or 1")
        root, par = self.find(cell)
        want = value ^ par
        if root in self._fixed:
            if self._fixed[root] != want:
                self._record(rule, (cell,))
            return False
        self._fixed[root] = want
        self._index = None
        return True

    def _union(self, a: Cell, b: Cell, parity: int, rule: str) -> bool:
        self._check_cell(a)
        self._check_cell(b)
        if a == b:
            raise ValueError("cannot relate a cell to itself")
        ra, pa = self.find(a)
        rb, pb = self.find(b)
        rel = pa ^ pb ^ parity
        if ra == rb:
            if rel != 0:
                self._record(rule, (a, b))
            return False
        fa, fb = self._fixed.get(ra), self._fixed.get(rb)
        if fa is not None and fb is not None and fa ^ fb != rel:
            self._record(rule, (a, b))
            return False
        root, other = (ra, rb) if _rep_key(ra) < _rep_key(rb) else (rb, ra)
        self._parent[other] = (root, rel)
        if other in self._fixed:
            value = self._fixed.pop(other)
            self._fixed.setdefault(root, value ^ rel)
        self._index = None
        return True

    def alias_equal(self, a: Cell, b: Cell, rule: str = "equal-symbol") -> bool:
        return self._union(a, b, 0, rule)

    def alias_cross(self, a: Cell, b: Cell, rule: str = "cross-symbol") -> bool:
        return self._union(a, b, 1, rule)

    # -- queries --------------------------------------------------------------

    def _indices(self) -> dict[Cell, int]:
        if self._index is None:
            roots = [c for c in self.board.cells() if c not in self._parent and c not in self._fixed]
            self._index = {c: k for k, c in enumerate(roots)}
        return self._index

    @property
    def num_free(self) -> int:
        return len(self._indices())

    def free_cells(self) -> list[Cell]:
        """Root cells of the free variables, indexed by variable number."""
        return list(self._indices())

    def value_of(self, cell: Cell) -> Optional[int]:
        """The fixed value of ``cell``, or None if it depends on a free variable."""
        root, par = self.find(cell)
        if root in self._fixed:
            return self._fixed[root] ^ par
        return None

    def state(self, cell: Cell):
        """``("fixed", v)``, ``("free", index)`` or ``("alias", root, parity)``."""
        root, par = self.find(cell)
        if root in self._fixed:
            return ("fixed", self._fixed[root] ^ par)
        if root == cell:
            return ("free", self._indices()[cell])
        return ("alias", root, par)

    def resolve(self, cell: Cell) -> Literal:
        if self.conflict is not None:
            raise InfeasibleError(self.conflict.rule, self.conflict.cells)
        root, par = self.find(cell)
        if root in self._fixed:
            return CONST1 if self._fixed[root] ^ par else CONST0
        idx = self._indices()[root]
        return neg(idx) if par else pos(idx)

    def summary(self) -> dict[str, int]:
        counts = {"free": 0, "fixed": 0, "aliased": 0, "inactive": len(self.board.inactive)}
        for cell in self.board.cells():
            counts[self.state(cell)[0].replace("alias", "aliased")] += 1
        return counts

    def expand(self, bits) -> np.ndarray:
        """Board values (height x width, int8) for an assignment of the free variables."""
        if self.conflict is not None:
            raise InfeasibleError(self.conflict.rule, self.conflict.cells)
        if len(bits) != self.num_free:
            raise ValueError(f"expected {self.num_free} bits, got {len(bits)}")
        out = np.zeros(self.board.shape, dtype=np.int8)
        for cell in self.board.cells():
            out[cell[0] - 1, cell[1] - 1] = self.resolve(cell).value(bits)
        return out

    def project(self, values) -> Optional[np.ndarray]:
        """Free-variable bits matching a full board, or None if the board contradicts the map."""
        values = np.asarray(values)
        bits = np.zeros(self.num_free, dtype=np.int8)
        for cell, k in self._indices().items():
            bits[k] = values[cell[0] - 1, cell[1] - 1]
        if not np.array_equal(self.expand(bits), np.where(self._active_mask(), values, 0)):
            return None
        return bits

    def _active_mask(self) -> np.ndarray:
        mask = np.ones(self.board.shape, dtype=bool)
        for r, c in self.board.inactive:
            mask[r - 1, c - 1] = False
        return mask

    def copy(self) -> "VarMap":
        vm = VarMap.__new__(VarMap)
        vm.board = self.board
        vm._parent = dict(self._parent)
        vm._fixed = dict(self._fixed)
        vm.conflict = self.conflict
        vm._index = None
        return vm


def resolve(vm: VarMap, cell: Cell) -> Literal:
    return vm.resolve(cell)


def alias_equal(vm: VarMap, a: Cell, b: Cell) -> VarMap:
    vm.alias_equal(a, b)
    return vm


def alias_cross(vm: VarMap, a: Cell, b: Cell) -> VarMap:
    vm.alias_cross(a, b)
    return vm
