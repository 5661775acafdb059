"""Random instance generators shared by the tests and the acceptance suite."""

import itertools
import random
from fractions import Fraction

import numpy as np

from puzzlequbo import CONST0, CONST1, Qubo, neg, pos
from puzzlequbo.oracle import enumerate_solutions
from puzzlequbo.problems import Symbol, TakuzuProblem


def random_literal(rng: random.Random, num_vars: int):
    roll = rng.random()
    if roll < 0.1:
        return CONST0
    if roll < 0.2:
        return CONST1
    i = rng.randrange(num_vars)
    return pos(i) if rng.random() < 0.6 else neg(i)


def literal_value(lit, bits) -> int:
    if lit.kind == "const":
        return lit.index
    v = int(bits[lit.index])
    return v if lit.kind == "pos" else 1 - v


def random_penalty(rng: random.Random, num_vars: int):
    """(target, literals, weight) for one square penalty of at most 4 literals."""
    k = rng.randint(1, 4)
    lits = [random_literal(rng, num_vars) for _ in range(k)]
    target = Fraction(rng.randint(-2, 8), 2)
    return target, lits, rng.randint(1, 3)


def symbolic_penalty(target, lits, weight, bits) -> Fraction:
    s = sum(literal_value(lit, bits) for lit in lits)
    return weight * (Fraction(target) - s) ** 2


def random_qubo(rng: random.Random, max_vars: int = 12) -> Qubo:
    n = rng.randint(0, max_vars)
    q = Qubo(n)
    q._offset = rng.randint(-50, 50)
    for i in range(n):
        if rng.random() < 0.7:
            v = rng.randint(-40, 40)
            if v:
                q._linear[i] = v
    for i, j in itertools.combinations(range(n), 2):
        if rng.random() < 0.3:
            v = rng.randint(-40, 40)
            if v:
                q._quad[(i, j)] = v
    return q


def all_assignments(n: int):
    return itertools.product((0, 1), repeat=n)


def brute_force_minima(q: Qubo):
    """(min energy, sorted list of minimising bit tuples) by plain enumeration."""
    best, arg = None, []
    for bits in all_assignments(q.num_vars):
        e = q.energy(bits)
        if best is None or e < best:
            best, arg = e, [bits]
        elif e == best:
            arg.append(bits)
    return best, arg


_SOLUTIONS: dict = {}


def takuzu_solutions(height: int, width: int, unique_lines: bool):
    key = (height, width, unique_lines)
    if key not in _SOLUTIONS:
        p = TakuzuProblem(height, width, unique_lines=unique_lines)
        _SOLUTIONS[key] = enumerate_solutions(p, cap=1 << 20).solutions
    return _SOLUTIONS[key]


def _acyclic_add(parent: dict, a, b) -> bool:
    def find(x):
        while parent.get(x, x) != x:
            x = parent[x]
        return x

    ra, rb = find(a), find(b)
    if ra == rb:
        return False
    parent[ra] = rb
    return True


def puzzle_from_board(rng: random.Random, board: np.ndarray, n_givens: int, n_symbols: int,
                      unique_lines: bool, adjacent_only: bool = True) -> TakuzuProblem:
    """Givens and '='/'x' symbols read off a valid board.

    Symbols join two non-given cells and never close a cycle, so each one
    removes a distinct variable.
    """
    height, width = board.shape
    cells = [(i, j) for i in range(1, height + 1) for j in range(1, width + 1)]
    givens = set(rng.sample(cells, n_givens))
    free = [c for c in cells if c not in givens]
    parent: dict = {}
    symbols = []
    attempts = 0
    while len(symbols) < n_symbols and attempts < 1000:
        attempts += 1
        a = rng.choice(free)
        if adjacent_only:
            dr, dc = rng.choice(((0, 1), (1, 0)))
            b = (a[0] + dr, a[1] + dc)
        else:
            b = rng.choice(free)
        if b == a or b not in free or not _acyclic_add(parent, a, b):
            continue
        same = board[a[0] - 1, a[1] - 1] == board[b[0] - 1, b[1] - 1]
        symbols.append(Symbol("equal" if same else "cross", a, b))
    zeros = frozenset(c for c in givens if board[c[0] - 1, c[1] - 1] == 0)
    ones = frozenset(c for c in givens if board[c[0] - 1, c[1] - 1] == 1)
    return TakuzuProblem(height, width, zeros=zeros, ones=ones, symbols=tuple(symbols),
                         unique_lines=unique_lines)


def random_tango_6x6(rng: random.Random, n_givens: int = 8, n_symbols: int = 6) -> TakuzuProblem:
    sols = takuzu_solutions(6, 6, unique_lines=False)
    board = sols[rng.randrange(len(sols))]
    return puzzle_from_board(rng, board, n_givens, n_symbols, unique_lines=False)
