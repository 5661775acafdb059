"""Exact and annealing minimisers for :class:`~puzzlequbo.qubo.Qubo` models."""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels
from .problems import (
    ColouredPiecesProblem,
    MaxPiecesProblem,
    QueensProblem,
    TakuzuProblem,
    TentsTreesProblem,
)
from .qubo import QuarterInt, Qubo

MAX_EXHAUSTIVE_VARS = 24


@dataclass
class SolveResult:
    best: np.ndarray
    energy: QuarterInt
    optima: Optional[list] = None
    stats: dict = field(default_factory=dict)


@dataclass(frozen=True)
class AnnealParams:
    restarts: int = 20
    sweeps: int = 2000
    initial_temperature: Optional[float] = None
    cooling: float = 0.97
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1 or self.sweeps < 1:
            raise ValueError("restarts and sweeps must be positive")
        if not 0.0 < self.cooling < 1.0:
            raise ValueError("cooling factor must lie in (0, 1)")
        if self.initial_temperature is not None and self.initial_temperature <= 0:
            raise ValueError("initial temperature must be positive")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")


def _decode(codes, n: int) -> list:
    shifts = np.arange(n, dtype=np.int64)
    return [((int(c) >> shifts) & 1).astype(np.int8) for c in sorted(int(c) for c in codes)]


def solve_exhaustive(q: Qubo, cap: int = 1024, backend: Optional[str] = None) -> SolveResult:
    """Enumerate every assignment; keep up to ``cap`` minimisers (sorted by code)."""
    if q.num_vars > MAX_EXHAUSTIVE_VARS:
        raise ValueError(
            f"exhaustive search limited to {MAX_EXHAUSTIVE_VARS} variables, model has {q.num_vars}"
        )
    start = time.perf_counter()
    offset, h, indptr, indices, data = q.to_arrays()
    best, codes, count = _kernels.exhaustive(h, indptr, indices, data, cap, backend)
    optima = _decode(codes, q.num_vars)
    energy = QuarterInt(int(best) + offset)
    assert q.energy(optima[0]) == energy
    return SolveResult(
        best=optima[0],
        energy=energy,
        optima=optima,
        stats={
            "optima_count": int(count),
            "capped": int(count) > len(optima),
            "states": 1 << q.num_vars,
            "elapsed": time.perf_counter() - start,
            "backend": backend or _kernels.DEFAULT_BACKEND,
        },
    )


def _restart_inputs(q_arrays, params: AnnealParams, seq: np.random.SeedSequence, backend):
    _, h, indptr, indices, data = q_arrays
    rng = np.random.default_rng(seq)
    n = h.shape[0]
    x = rng.integers(0, 2, size=n).astype(np.int64)
    uniforms = rng.random((params.sweeps, n))
    if params.initial_temperature is not None:
        t0 = 4.0 * params.initial_temperature
    else:
        f = _kernels.local_fields(h, indptr, indices, data, x, backend)
        t0 = float(np.abs(f).max()) if n else 1.0
        t0 = max(t0, 1.0)
    temps = t0 * params.cooling ** np.arange(params.sweeps, dtype=np.float64)
    temps = np.maximum(temps, 1e-300)
    return x, uniforms, temps


def solve_anneal(
    q: Qubo,
    params: AnnealParams = AnnealParams(),
    target=None,
    parallel: bool = False,
    backend: Optional[str] = None,
) -> SolveResult:
    """Simulated annealing with independent seeded restarts.

    Each restart draws its start state and acceptance uniforms from its own
    child of ``SeedSequence(params.seed)``, so results do not depend on
    ``parallel`` or on the backend. With ``target`` set, the first restart
    (in index order) to reach it wins and later restarts are skipped.
    """
    if q.num_vars < 1:
        raise ValueError("annealing needs at least one variable")
    start = time.perf_counter()
    arrays = q.to_arrays()
    offset, h, indptr, indices, data = arrays
    target4 = np.iinfo(np.int64).min if target is None else QuarterInt.of(target).numerator - offset
    seqs = np.random.SeedSequence(params.seed).spawn(params.restarts)

    def run(k):
        x, uniforms, temps = _restart_inputs(arrays, params, seqs[k], backend)
        return _kernels.anneal_restart(h, indptr, indices, data, x, uniforms, temps, target4, backend)

    results = []
    if parallel:
        with ThreadPoolExecutor() as pool:
            results = list(pool.map(run, range(params.restarts)))
    else:
        for k in range(params.restarts):
            results.append(run(k))
            if results[-1][1] <= target4:
                break
    chosen = None
    for k, (bx, be, _) in enumerate(results):
        if be <= target4:
            chosen = k
            break
    if chosen is None:
        chosen = min(range(len(results)), key=lambda k: (results[k][1], k))
    best_x, best_e, _ = results[chosen]
    best = np.asarray(best_x, dtype=np.int8)
    energy = QuarterInt(int(best_e) + offset)
    assert q.energy(best) == energy
    return SolveResult(
        best=best,
        energy=energy,
        stats={
            "flips": int(sum(r[2] for r in results)),
            "restarts": len(results),
            "winning_restart": chosen,
            "elapsed": time.perf_counter() - start,
            "backend": backend or _kernels.DEFAULT_BACKEND,
        },
    )


# -- analytic floors --------------------------------------------------------------


@dataclass(frozen=True)
class FloorDescriptor:
    """Formulation family plus the number of half-target penalties it carries."""

    family: str
    fractional_terms: int = 0


FAMILIES = ("nqueens", "lqueens", "general-queens", "tents", "pieces-coloured", "takuzu")


def takuzu_window_count(p: TakuzuProblem) -> int:
    n, m = p.height, p.width
    rows = n if p.wrap_rows else max(n - 2, 0)
    cols = m if p.wrap_cols else max(m - 2, 0)
    count = n * cols + rows * m
    if p.diagonal_repetition:
        count += 2 * rows * cols
    return count


def describe(problem, soft_pairwise: bool = False) -> FloorDescriptor:
    """Floor descriptor for a problem instance."""
    if isinstance(problem, QueensProblem):
        family = {"nqueens": "nqueens", "lqueens": "lqueens"}.get(problem.family, "general-queens")
        soft = 0
        if family == "general-queens":
            for reg in problem.regions:
                if reg.t == 1:
                    placed = reg.p + len(reg.cells & problem.initial)
                    if not (soft_pairwise and reg.q - placed == 0):
                        soft += 1
        return FloorDescriptor(family, soft)
    if isinstance(problem, TentsTreesProblem):
        return FloorDescriptor("tents", len(problem.trees))
    if isinstance(problem, TakuzuProblem):
        return FloorDescriptor("takuzu", takuzu_window_count(problem))
    if isinstance(problem, ColouredPiecesProblem):
        return FloorDescriptor("pieces-coloured", 0)
    if isinstance(problem, MaxPiecesProblem):
        return FloorDescriptor("pieces-max", 0)
    raise ValueError(f"unknown problem type {type(problem).__name__}")


def predicted_min_energy(descriptor) -> QuarterInt:
    """Energy of any assignment that satisfies every constraint.

    Each half-target square penalty bottoms out at 1/4 and every other term
    at 0, so the floor is a quarter per fractional term. Accepts a
    :class:`FloorDescriptor` or a problem instance.
    """
    if not isinstance(descriptor, FloorDescriptor):
        descriptor = describe(descriptor)
    if descriptor.family not in FAMILIES:
        raise ValueError(f"no closed-form floor for family {descriptor.family!r}")
    return QuarterInt(descriptor.fractional_terms)
