"""Hot loops for the solvers.

Each kernel is written once as plain Python over numpy arrays. When numba
is importable and ``PUZZLEQUBO_DISABLE_NUMBA`` is unset, the same source is
compiled with ``@njit``; otherwise the Python version runs as-is. The
exhaustive search has a separate vectorised numpy fallback because a Python
Gray-code loop over 2^n states would be far too slow.

All energies are int64 counts of quarter units. The coupling matrix is
symmetric CSR: ``indptr``, ``indices``, ``data``.
"""

import math
import os

import numpy as np

_DISABLED = os.environ.get("PUZZLEQUBO_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")

try:
    if _DISABLED:
        raise ImportError("numba disabled by PUZZLEQUBO_DISABLE_NUMBA")
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:
    NUMBA_AVAILABLE = False

DEFAULT_BACKEND = "numba" if NUMBA_AVAILABLE else "numpy"


def local_fields_py(h, indptr, indices, data, x):
    f = h.copy()
    for i in range(h.shape[0]):
        if x[i]:
            for p in range(indptr[i], indptr[i + 1]):
                f[indices[p]] += data[p]
    return f


def anneal_restart_py(h, indptr, indices, data, x, uniforms, temps, target):
    """Metropolis single-flip sweeps with incremental local fields.

    ``x`` is modified in place. Returns ``(best_x, best_energy, flips)``
    where the energy excludes the model offset. Stops as soon as the energy
    drops to ``target``.
    """
    n = h.shape[0]
    f = h.copy()
    for i in range(n):
        if x[i]:
            for p in range(indptr[i], indptr[i + 1]):
                f[indices[p]] += data[p]
    e = 0
    for i in range(n):
        if x[i]:
            e += h[i] + f[i]
    e //= 2
    best_e = e
    best_x = x.copy()
    flips = 0
    if best_e <= target:
        return best_x, best_e, flips
    for s in range(temps.shape[0]):
        t = temps[s]
        for i in range(n):
            d = f[i] if x[i] == 0 else -f[i]
            if d > 0 and uniforms[s, i] >= math.exp(-d / t):
                continue
            step = 1 if x[i] == 0 else -1
            x[i] = 1 - x[i]
            e += d
            flips += 1
            for p in range(indptr[i], indptr[i + 1]):
                f[indices[p]] += step * data[p]
            if e < best_e:
                best_e = e
                best_x[:] = x
                if best_e <= target:
                    return best_x, best_e, flips
    return best_x, best_e, flips


def flip_walk_py(h, indptr, indices, data, x, order):
    """Flip ``order[k]`` in turn; return the energy (offset excluded) after each flip."""
    n = h.shape[0]
    f = h.copy()
    for i in range(n):
        if x[i]:
            for p in range(indptr[i], indptr[i + 1]):
                f[indices[p]] += data[p]
    e = 0
    for i in range(n):
        if x[i]:
            e += h[i] + f[i]
    e //= 2
    out = np.empty(order.shape[0], dtype=np.int64)
    for k in range(order.shape[0]):
        i = order[k]
        d = f[i] if x[i] == 0 else -f[i]
        step = 1 if x[i] == 0 else -1
        x[i] = 1 - x[i]
        e += d
        for p in range(indptr[i], indptr[i + 1]):
            f[indices[p]] += step * data[p]
        out[k] = e
    return out


def exhaustive_gray_py(h, indptr, indices, data, cap):
    """Visit all 2^n states in Gray-code order.

    Returns ``(best_energy, optima_codes, optima_count)``; at most ``cap``
    codes are kept but the count covers every optimum.
    """
    n = h.shape[0]
    x = np.zeros(n, dtype=np.int64)
    f = h.copy()
    e = 0
    best = 0
    count = 1
    keep = max(cap, 1)
    codes = np.zeros(keep, dtype=np.int64)
    code = 0
    total = 1 << n
    for k in range(1, total):
        i = 0
        while not (k >> i) & 1:
            i += 1
        d = f[i] if x[i] == 0 else -f[i]
        step = 1 if x[i] == 0 else -1
        x[i] = 1 - x[i]
        e += d
        code ^= 1 << i
        for p in range(indptr[i], indptr[i + 1]):
            f[indices[p]] += step * data[p]
        if e < best:
            best = e
            count = 1
            codes[0] = code
        elif e == best:
            if count < keep:
                codes[count] = code
            count += 1
    return best, codes[: min(count, keep)], count


def exhaustive_numpy(h, indptr, indices, data, cap, chunk=1 << 15):
    """Vectorised enumeration in fixed-size blocks of consecutive codes."""
    n = h.shape[0]
    dense = np.zeros((n, n), dtype=np.float64)
    for i in range(n):
        for p in range(indptr[i], indptr[i + 1]):
            j = indices[p]
            if j > i:
                dense[i, j] = data[p]
    hf = h.astype(np.float64)
    shifts = np.arange(n, dtype=np.int64)
    best = None
    count = 0
    kept = []
    keep = max(cap, 1)
    for start in range(0, 1 << n, chunk):
        codes = np.arange(start, min(start + chunk, 1 << n), dtype=np.int64)
        bits = ((codes[:, None] >> shifts) & 1).astype(np.float64)
        energies = np.rint(bits @ hf + ((bits @ dense) * bits).sum(axis=1)).astype(np.int64)
        low = int(energies.min())
        if best is None or low < best:
            best = low
            count = 0
            kept = []
        if low == best:
            hits = codes[energies == best]
            count += hits.shape[0]
            room = keep - sum(len(k) for k in kept)
            if room > 0:
                kept.append(hits[:room])
    optima = np.concatenate(kept) if kept else np.zeros(0, dtype=np.int64)
    return best, optima, count


if NUMBA_AVAILABLE:
    local_fields_nb = njit(cache=True, nogil=True)(local_fields_py)
    anneal_restart_nb = njit(cache=True, nogil=True)(anneal_restart_py)
    flip_walk_nb = njit(cache=True, nogil=True)(flip_walk_py)
    exhaustive_gray_nb = njit(cache=True, nogil=True)(exhaustive_gray_py)
else:  # pragma: no cover - exercised only without numba
    local_fields_nb = anneal_restart_nb = flip_walk_nb = exhaustive_gray_nb = None


def _check_backend(backend):
    backend = backend or DEFAULT_BACKEND
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "numba" and not NUMBA_AVAILABLE:
        raise RuntimeError("numba backend requested but numba is unavailable or disabled")
    return backend


def anneal_restart(h, indptr, indices, data, x, uniforms, temps, target, backend=None):
    if _check_backend(backend) == "numba":
        return anneal_restart_nb(h, indptr, indices, data, x, uniforms, temps, target)
    return anneal_restart_py(h, indptr, indices, data, x, uniforms, temps, target)


def flip_walk(h, indptr, indices, data, x, order, backend=None):
    if _check_backend(backend) == "numba":
        return flip_walk_nb(h, indptr, indices, data, x, order)
    return flip_walk_py(h, indptr, indices, data, x, order)


def local_fields(h, indptr, indices, data, x, backend=None):
    if _check_backend(backend) == "numba":
        return local_fields_nb(h, indptr, indices, data, x)
    return local_fields_py(h, indptr, indices, data, x)


def exhaustive(h, indptr, indices, data, cap, backend=None):
    if _check_backend(backend) == "numba":
        return exhaustive_gray_nb(h, indptr, indices, data, cap)
    return exhaustive_numpy(h, indptr, indices, data, cap)
