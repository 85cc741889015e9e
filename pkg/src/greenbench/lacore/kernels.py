"""The four benchmark kernels: axpy, element-wise product, dot, SpMV.

Vectors are 1-D float64 NumPy arrays. Each kernel accepts ``workers``; the
result is bitwise identical for any worker count. Reductions always use
fixed chunks of :data:`CHUNK` elements, each summed left to right, with the
chunk sums then combined left to right, so the worker count only changes
who computes a chunk, never the order of additions.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ..errors import DimensionError
from .csr import CsrMatrix

CHUNK = 4096


def as_vector(x, name: str = "x") -> np.ndarray:
    """Validate and return ``x`` as a finite 1-D float64 array (no copy if possible)."""
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1:
        raise DimensionError(f"{name} must be 1-D, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} contains non-finite values")
    return v


def _same_length(x: np.ndarray, y: np.ndarray) -> None:
    if x.shape != y.shape:
        raise DimensionError(f"length mismatch: {x.size} vs {y.size}")


def _split(n: int, parts: int) -> list[tuple[int, int]]:
    parts = max(1, min(parts, n)) if n else 1
    bounds = np.linspace(0, n, parts + 1).astype(np.int64)
    return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:])]


def _map_ranges(func, n: int, workers: int) -> list:
    ranges = _split(n, workers)
    if workers <= 1 or len(ranges) == 1:
        return [func(a, b) for a, b in ranges]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda ab: func(*ab), ranges))


def axpy(alpha: float, x, y, workers: int = 1) -> np.ndarray:
    """``alpha * x + y``."""
    x, y = as_vector(x), as_vector(y, "y")
    _same_length(x, y)
    alpha = float(alpha)
    out = np.empty_like(x)

    def block(a, b):
        np.multiply(alpha, x[a:b], out=out[a:b])
        out[a:b] += y[a:b]

    _map_ranges(block, x.size, workers)
    return out


def ewmul(x, y, workers: int = 1) -> np.ndarray:
    """Element-wise (Hadamard) product."""
    x, y = as_vector(x), as_vector(y, "y")
    _same_length(x, y)
    out = np.empty_like(x)

    def block(a, b):
        np.multiply(x[a:b], y[a:b], out=out[a:b])

    _map_ranges(block, x.size, workers)
    return out


def _sequential_sum_rows(block: np.ndarray) -> np.ndarray:
    # cumsum is a strict left-to-right recurrence, unlike np.sum's pairwise scheme
    return np.cumsum(block, axis=1)[:, -1]


def chunked_sum(values, workers: int = 1) -> float:
    """Reproducible sum: fixed 4096-element chunks, ordered combine."""
    v = np.asarray(values, dtype=np.float64).reshape(-1)
    n = v.size
    if n == 0:
        return 0.0
    n_chunks = -(-n // CHUNK)
    # chunk boundaries per worker must fall on CHUNK multiples
    chunk_ranges = _split(n_chunks, workers)

    def block(ca, cb):
        seg = v[ca * CHUNK : min(cb * CHUNK, n)]
        pad = (cb - ca) * CHUNK - seg.size
        if pad:
            seg = np.concatenate((seg, np.zeros(pad)))
        return _sequential_sum_rows(seg.reshape(cb - ca, CHUNK))

    if workers <= 1 or len(chunk_ranges) == 1:
        parts = [block(a, b) for a, b in chunk_ranges]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda ab: block(*ab), chunk_ranges))
    sums = np.concatenate(parts)
    return float(np.cumsum(sums)[-1])


def dot(x, y, workers: int = 1) -> float:
    x, y = as_vector(x), as_vector(y, "y")
    _same_length(x, y)
    return chunked_sum(x * y, workers)


def norm2(x, workers: int = 1) -> float:
    x = as_vector(x)
    return float(np.sqrt(chunked_sum(x * x, workers)))


def spmv(A: CsrMatrix, x, workers: int = 1) -> np.ndarray:
    """``y = A x``; rows are independent, so partitioning over rows is free."""
    x = as_vector(x)
    if A.n_cols != x.size:
        raise DimensionError(f"A has {A.n_cols} columns, x has {x.size} entries")
    y = np.zeros(A.n_rows)
    IA, JA, AA = A.IA, A.JA, A.AA

    def block(r0, r1):
        k0, k1 = IA[r0], IA[r1]
        if k1 == k0:
            return
        products = AA[k0:k1] * x[JA[k0:k1]]
        starts = IA[r0:r1] - k0
        filled = IA[r0 + 1 : r1 + 1] > IA[r0:r1]
        y[r0:r1][filled] = np.add.reduceat(products, starts[filled])

    _map_ranges(block, A.n_rows, workers)
    return y
