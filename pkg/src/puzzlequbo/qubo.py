"""Exact binary quadratic models on the quarter-integer grid.

Every coefficient is stored as an integer count of quarters, so all
penalty constructions with integer or half-integer targets stay exact.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np


class StructureError(ValueError):
    """Raised for malformed models: bad indices, diagonal keys, parse errors."""


@functools.total_ordering
class QuarterInt:
    """An exact multiple of 1/4, stored as its integer numerator."""

    __slots__ = ("numerator",)

    def __init__(self, numerator: int = 0):
        if isinstance(numerator, (bool, np.bool_)) or not isinstance(numerator, (int, np.integer)):
            raise TypeError(f"QuarterInt numerator must be an integer, got {numerator!r}")
        self.numerator = int(numerator)

    @classmethod
    def of(cls, value) -> "QuarterInt":
        """Convert an int, Fraction, float or QuarterInt lying on the quarter grid."""
        if isinstance(value, QuarterInt):
            return value
        if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
            return cls(4 * int(value))
        frac = Fraction(value)
        scaled = frac * 4
        if scaled.denominator != 1:
            raise ValueError(f"{value!r} is not a multiple of 1/4")
        return cls(scaled.numerator)

    def to_fraction(self) -> Fraction:
        return Fraction(self.numerator, 4)

    def __float__(self) -> float:
        return self.numerator / 4

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return QuarterInt(self.numerator + other.numerator)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return QuarterInt(self.numerator - other.numerator)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return QuarterInt(other.numerator - self.numerator)

    def __neg__(self):
        return QuarterInt(-self.numerator)

    def __mul__(self, other):
        if isinstance(other, (int, np.integer)) and not isinstance(other, bool):
            return QuarterInt(self.numerator * int(other))
        if isinstance(other, Fraction):
            product = self.numerator * other
            if product.denominator != 1:
                raise ValueError(f"{self} * {other} leaves the quarter grid")
            return QuarterInt(product.numerator)
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, QuarterInt):
            return self.numerator == other.numerator
        if _is_real(other):
            return self.to_fraction() == other
        return NotImplemented

    def __lt__(self, other):
        if isinstance(other, QuarterInt):
            return self.numerator < other.numerator
        if _is_real(other):
            return self.to_fraction() < other
        return NotImplemented

    def __hash__(self):
        return hash(("QuarterInt", self.numerator))

    def __repr__(self):
        return f"QuarterInt({self.numerator})"

    def __str__(self):
        return str(self.to_fraction())


def _is_real(value) -> bool:
    return isinstance(value, (int, float, np.integer, np.floating, Fraction)) and not isinstance(value, bool)


def _coerce(value):
    if isinstance(value, QuarterInt):
        return value
    if isinstance(value, (int, np.integer, Fraction)) and not isinstance(value, bool):
        try:
            return QuarterInt.of(value)
        except ValueError:
            return NotImplemented
    return NotImplemented


@dataclass(frozen=True)
class Literal:
    """A free variable, its negation, or a constant.

    ``kind`` is one of ``"pos"``, ``"neg"``, ``"const"``; for constants
    ``index`` holds the value (0 or 1).
    """

    kind: str
    index: int

    def __post_init__(self):
        if self.kind not in ("pos", "neg", "const"):
            raise ValueError(f"unknown literal kind {self.kind!r}")
        if self.kind == "const" and self.index not in (0, 1):
            raise ValueError("constant literal must be 0 or 1")
        if self.kind != "const" and self.index < 0:
            raise StructureError(f"negative variable index {self.index}")

    @property
    def is_const(self) -> bool:
        return self.kind == "const"

    def affine(self) -> tuple[int, int]:
        """Return (a, b) with literal = a + b * x_index."""
        if self.kind == "pos":
            return 0, 1
        if self.kind == "neg":
            return 1, -1
        return self.index, 0

    def value(self, assignment: Sequence[int]) -> int:
        if self.kind == "const":
            return self.index
        x = int(assignment[self.index])
        return x if self.kind == "pos" else 1 - x

    def negate(self) -> "Literal":
        if self.kind == "const":
            return CONST1 if self.index == 0 else CONST0
        return Literal("neg" if self.kind == "pos" else "pos", self.index)

    def __str__(self):
        if self.kind == "const":
            return str(self.index)
        return f"x{self.index}" if self.kind == "pos" else f"~x{self.index}"


def pos(i: int) -> Literal:
    return Literal("pos", i)


def neg(i: int) -> Literal:
    return Literal("neg", i)


CONST0 = Literal("const", 0)
CONST1 = Literal("const", 1)


def _as_quarters(weight) -> int:
    return QuarterInt.of(weight).numerator


class Qubo:
    """Sparse binary quadratic form ``offset + sum a_i x_i + sum b_ij x_i x_j``.

    Coefficients are kept in quarter units. Builder methods mutate in place
    and return ``self``; once handed to a solver a model is treated as
    read-only.
    """

    def __init__(self, num_vars: int):
        if num_vars < 0:
            raise StructureError("num_vars must be nonnegative")
        self.num_vars = int(num_vars)
        self._offset = 0
        self._linear: dict[int, int] = {}
        self._quad: dict[tuple[int, int], int] = {}

    # -- coefficient access -------------------------------------------------

    @property
    def offset(self) -> QuarterInt:
        return QuarterInt(self._offset)

    @property
    def linear(self) -> dict[int, QuarterInt]:
        return {i: QuarterInt(v) for i, v in sorted(self._linear.items())}

    @property
    def quadratic(self) -> dict[tuple[int, int], QuarterInt]:
        return {k: QuarterInt(v) for k, v in sorted(self._quad.items())}

    def linear_coeff(self, i: int) -> QuarterInt:
        return QuarterInt(self._linear.get(i, 0))

    def quad_coeff(self, i: int, j: int) -> QuarterInt:
        if i > j:
            i, j = j, i
        return QuarterInt(self._quad.get((i, j), 0))

    @property
    def num_linear(self) -> int:
        return len(self._linear)

    @property
    def num_quadratic(self) -> int:
        return len(self._quad)

    # -- raw quarter-unit mutation -------------------------------------------

    def _check(self, i: int) -> None:
        if not 0 <= i < self.num_vars:
            raise StructureError(f"variable index {i} out of range for {self.num_vars} variables")

    def _add_offset(self, n: int) -> None:
        self._offset += n

    def _add_linear(self, i: int, n: int) -> None:
        if n == 0:
            return
        self._check(i)
        v = self._linear.get(i, 0) + n
        if v:
            self._linear[i] = v
        else:
            del self._linear[i]

    def _add_quad(self, i: int, j: int, n: int) -> None:
        if n == 0:
            return
        self._check(i)
        self._check(j)
        if i == j:
            self._add_linear(i, n)
            return
        key = (i, j) if i < j else (j, i)
        v = self._quad.get(key, 0) + n
        if v:
            self._quad[key] = v
        else:
            del self._quad[key]

    # -- penalty construction -------------------------------------------------

    def add_square_penalty(self, target, literals: Iterable[Literal], weight: int = 1) -> "Qubo":
        """Add ``weight * (target - sum(literals))**2``.

        ``target`` must be an integer or half-integer. Constants and negated
        literals are folded so only free variables carry coefficients, and
        repeated variables are merged before squaring.
        """
        literals = list(literals)
        if not literals:
            raise StructureError("square penalty needs at least one literal")
        if isinstance(weight, bool) or not isinstance(weight, (int, np.integer)) or weight < 1:
            raise ValueError(f"square penalty weight must be a positive integer, got {weight!r}")
        twice = Fraction(target) * 2
        if twice.denominator != 1:
            raise ValueError(f"target {target!r} is not a half-integer")
        # residual = c2/2 - sum_v beta_v x_v
        c2 = int(twice)
        beta: dict[int, int] = {}
        for lit in literals:
            a, b = lit.affine()
            c2 -= 2 * a
            if b:
                self._check(lit.index)
                beta[lit.index] = beta.get(lit.index, 0) + b
        beta = {v: b for v, b in beta.items() if b}
        w = int(weight)
        self._add_offset(w * c2 * c2)
        for v, b in beta.items():
            self._add_linear(v, w * (4 * b * b - 4 * c2 * b))
        items = sorted(beta.items())
        for k, (v, bv) in enumerate(items):
            for u, bu in items[k + 1:]:
                self._add_quad(v, u, w * 8 * bv * bu)
        return self

    def add_pair_interaction(self, a: Literal, b: Literal, weight=1) -> "Qubo":
        """Add ``weight * a * b`` with constants and negations folded."""
        w = _as_quarters(weight)
        a0, a1 = a.affine()
        b0, b1 = b.affine()
        if a1:
            self._check(a.index)
        if b1:
            self._check(b.index)
        self._add_offset(w * a0 * b0)
        if b1:
            self._add_linear(b.index, w * a0 * b1)
        if a1:
            self._add_linear(a.index, w * b0 * a1)
        if a1 and b1:
            self._add_quad(a.index, b.index, w * a1 * b1)
        return self

    def add_linear_term(self, a: Literal, weight) -> "Qubo":
        """Add ``weight * a``."""
        w = _as_quarters(weight)
        a0, a1 = a.affine()
        self._add_offset(w * a0)
        if a1:
            self._add_linear(a.index, w * a1)
        return self

    def add_offset(self, value) -> "Qubo":
        self._add_offset(_as_quarters(value))
        return self

    # -- evaluation -----------------------------------------------------------

    def energy4(self, assignment: Sequence[int]) -> int:
        """Energy in quarter units."""
        if len(assignment) != self.num_vars:
            raise StructureError(
                f"assignment has length {len(assignment)}, expected {self.num_vars}"
            )
        x = [int(v) for v in assignment]
        total = self._offset
        for i, v in self._linear.items():
            if x[i]:
                total += v
        for (i, j), v in self._quad.items():
            if x[i] and x[j]:
                total += v
        return total

    def energy(self, assignment: Sequence[int]) -> QuarterInt:
        return QuarterInt(self.energy4(assignment))

    def to_arrays(self):
        """Return ``(offset4, h4, indptr, indices, data4)``.

        ``h4`` holds linear coefficients, the CSR triple holds the symmetric
        coupling matrix; every value is an int64 count of quarters.
        """
        n = self.num_vars
        h = np.zeros(n, dtype=np.int64)
        for i, v in self._linear.items():
            h[i] = v
        counts = np.zeros(n + 1, dtype=np.int64)
        for i, j in self._quad:
            counts[i + 1] += 1
            counts[j + 1] += 1
        indptr = np.cumsum(counts)
        indices = np.empty(indptr[-1], dtype=np.int64)
        data = np.empty(indptr[-1], dtype=np.int64)
        fill = indptr[:-1].copy()
        for (i, j), v in sorted(self._quad.items()):
            indices[fill[i]] = j
            data[fill[i]] = v
            fill[i] += 1
            indices[fill[j]] = i
            data[fill[j]] = v
            fill[j] += 1
        return self._offset, h, indptr, indices, data

    # -- identity -------------------------------------------------------------

    def copy(self) -> "Qubo":
        q = Qubo(self.num_vars)
        q._offset = self._offset
        q._linear = dict(self._linear)
        q._quad = dict(self._quad)
        return q

    def scaled(self, factor: int) -> "Qubo":
        q = Qubo(self.num_vars)
        q._offset = self._offset * factor
        q._linear = {k: v * factor for k, v in self._linear.items()}
        q._quad = {k: v * factor for k, v in self._quad.items()}
        return q

    def __eq__(self, other):
        if not isinstance(other, Qubo):
            return NotImplemented
        return (
            self.num_vars == other.num_vars
            and self._offset == other._offset
            and self._linear == other._linear
            and self._quad == other._quad
        )

    def __repr__(self):
        return (
            f"Qubo(num_vars={self.num_vars}, offset={self.offset}, "
            f"linear={len(self._linear)}, quadratic={len(self._quad)})"
        )


# module-level spellings of the builder methods


def add_square_penalty(q: Qubo, target, literals, weight: int = 1) -> Qubo:
    return q.add_square_penalty(target, literals, weight)


def add_pair_interaction(q: Qubo, a: Literal, b: Literal, weight=1) -> Qubo:
    return q.add_pair_interaction(a, b, weight)


def add_linear_term(q: Qubo, a: Literal, weight) -> Qubo:
    return q.add_linear_term(a, weight)


def energy(q: Qubo, assignment) -> QuarterInt:
    return q.energy(assignment)


# -- text interchange format --------------------------------------------------


def export_qubo(q: Qubo) -> str:
    """Serialize to the line-oriented ``QUBO`` format (quarter-unit integers)."""
    lines = [f"QUBO {q.num_vars}", f"C {q._offset}"]
    for i, v in sorted(q._linear.items()):
        lines.append(f"L {i} {v}")
    for (i, j), v in sorted(q._quad.items()):
        lines.append(f"Q {i} {j} {v}")
    return "\n".join(lines) + "\n"


def import_qubo(text: str) -> Qubo:
    """Parse the ``QUBO`` text format; ``#`` lines and blank lines are skipped."""
    q: Qubo | None = None
    seen_offset = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            nums = [int(p) for p in parts[1:]]
        except ValueError:
            raise StructureError(f"line {lineno}: non-integer field in {line!r}") from None
        tag = parts[0]
        if q is None:
            if tag != "QUBO" or len(nums) != 1 or nums[0] < 0:
                raise StructureError(f"line {lineno}: expected 'QUBO <num_vars>' header")
            q = Qubo(nums[0])
            continue
        if tag == "C" and len(nums) == 1:
            if seen_offset:
                raise StructureError(f"line {lineno}: duplicate offset")
            seen_offset = True
            q._offset = nums[0]
        elif tag == "L" and len(nums) == 2:
            i, v = nums
            if not 0 <= i < q.num_vars:
                raise StructureError(f"line {lineno}: index {i} out of range")
            if i in q._linear:
                raise StructureError(f"line {lineno}: duplicate linear key {i}")
            if v:
                q._linear[i] = v
        elif tag == "Q" and len(nums) == 3:
            i, j, v = nums
            if i >= j:
                raise StructureError(f"line {lineno}: quadratic key needs i < j, got {i} {j}")
            if not (0 <= i and j < q.num_vars):
                raise StructureError(f"line {lineno}: index out of range in {line!r}")
            if (i, j) in q._quad:
                raise StructureError(f"line {lineno}: duplicate quadratic key {i} {j}")
            if v:
                q._quad[(i, j)] = v
        else:
            raise StructureError(f"line {lineno}: malformed line {line!r}")
    if q is None:
        raise StructureError("missing 'QUBO <num_vars>' header")
    return q
