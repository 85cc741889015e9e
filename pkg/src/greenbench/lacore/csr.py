"""Compressed sparse row storage.

Three arrays describe an ``n_rows x n_cols`` matrix with ``nnz`` stored
entries:

* ``AA`` -- the stored values, row by row;
* ``JA`` -- the column of each ``AA`` entry;
* ``IA`` -- offsets, row ``i`` occupies ``AA[IA[i]:IA[i+1]]``.

Indices are 0-based. Columns are strictly increasing within each row.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from ..errors import DimensionError

INDEX_DTYPE = np.int64


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    if a.flags.writeable:
        a = a.copy()
        a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class CsrMatrix:
    n_rows: int
    n_cols: int
    AA: np.ndarray
    JA: np.ndarray
    IA: np.ndarray

    def __post_init__(self):
        n_rows, n_cols = int(self.n_rows), int(self.n_cols)
        if n_rows < 0 or n_cols < 0:
            raise ValueError("matrix dimensions must be non-negative")
        AA = np.asarray(self.AA, dtype=np.float64).reshape(-1)
        JA = np.asarray(self.JA, dtype=INDEX_DTYPE).reshape(-1)
        IA = np.asarray(self.IA, dtype=INDEX_DTYPE).reshape(-1)
        nnz = AA.size
        if JA.size != nnz:
            raise ValueError(f"JA has {JA.size} entries, AA has {nnz}")
        if IA.size != n_rows + 1:
            raise ValueError(f"IA must have n_rows+1={n_rows + 1} entries, got {IA.size}")
        if IA[0] != 0 or IA[-1] != nnz:
            raise ValueError("IA must start at 0 and end at nnz")
        if np.any(np.diff(IA) < 0):
            raise ValueError("IA must be non-decreasing")
        if nnz:
            if JA.min() < 0 or JA.max() >= n_cols:
                raise ValueError("column index out of range")
            if not np.all(np.isfinite(AA)):
                raise ValueError("AA contains non-finite values")
            # strictly increasing columns inside each row
            step = np.diff(JA)
            row_start = np.zeros(nnz, dtype=bool)
            row_start[IA[:-1][IA[:-1] < nnz]] = True
            if np.any((step <= 0) & ~row_start[1:]):
                raise ValueError("columns must be strictly increasing within each row")
        object.__setattr__(self, "n_rows", n_rows)
        object.__setattr__(self, "n_cols", n_cols)
        object.__setattr__(self, "AA", _frozen(AA))
        object.__setattr__(self, "JA", _frozen(JA))
        object.__setattr__(self, "IA", _frozen(IA))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_rows, self.n_cols)

    @property
    def nnz(self) -> int:
        return int(self.AA.size)

    def row_counts(self) -> np.ndarray:
        return np.diff(self.IA)

    def row_indices(self) -> np.ndarray:
        """Row number of every stored entry."""
        return np.repeat(np.arange(self.n_rows, dtype=INDEX_DTYPE), self.row_counts())

    def diagonal(self) -> np.ndarray:
        d = np.zeros(min(self.shape))
        rows = self.row_indices()
        on = rows == self.JA
        d[rows[on]] = self.AA[on]
        return d

    def to_dense(self) -> np.ndarray:
        dense = np.zeros(self.shape)
        dense[self.row_indices(), self.JA] = self.AA
        return dense

    def transpose(self) -> CsrMatrix:
        return csr_from_arrays(self.n_cols, self.n_rows, self.JA, self.row_indices(), self.AA)

    def __repr__(self) -> str:
        return f"CsrMatrix(shape={self.shape}, nnz={self.nnz})"


def csr_from_arrays(n_rows: int, n_cols: int, rows, cols, values) -> CsrMatrix:
    """Build CSR from parallel coordinate arrays, summing duplicates.

    Duplicates are summed in input order, so assembly is reproducible. A
    duplicate set whose sum is exactly zero stays as a stored entry.
    """
    rows = np.asarray(rows, dtype=INDEX_DTYPE).reshape(-1)
    cols = np.asarray(cols, dtype=INDEX_DTYPE).reshape(-1)
    values = np.asarray(values, dtype=np.float64).reshape(-1)
    if not (rows.size == cols.size == values.size):
        raise DimensionError("rows, cols and values must have equal length")
    if n_rows < 0 or n_cols < 0:
        raise ValueError("matrix dimensions must be non-negative")
    if rows.size:
        if rows.min() < 0 or rows.max() >= n_rows or cols.min() < 0 or cols.max() >= n_cols:
            raise IndexError("triplet index out of range")
        if not np.all(np.isfinite(values)):
            raise ValueError("triplet values must be finite")

    order = np.lexsort((cols, rows))  # stable: equal keys keep input order
    r, c, v = rows[order], cols[order], values[order]
    if r.size:
        new_key = np.ones(r.size, dtype=bool)
        new_key[1:] = (r[1:] != r[:-1]) | (c[1:] != c[:-1])
        starts = np.flatnonzero(new_key)
        AA = np.add.reduceat(v, starts) if starts.size < v.size else v.copy()
        JA = c[starts]
        counts = np.bincount(r[starts], minlength=n_rows)
    else:
        AA = np.zeros(0)
        JA = np.zeros(0, dtype=INDEX_DTYPE)
        counts = np.zeros(n_rows, dtype=INDEX_DTYPE)
    IA = np.zeros(n_rows + 1, dtype=INDEX_DTYPE)
    np.cumsum(counts, out=IA[1:])
    return CsrMatrix(n_rows, n_cols, AA, JA, IA)


def csr_from_triplets(n_rows: int, n_cols: int, triplets: Iterable[tuple[int, int, float]]) -> CsrMatrix:
    triplets = list(triplets)
    if not triplets:
        return csr_from_arrays(n_rows, n_cols, [], [], [])
    rows, cols, vals = zip(*triplets)
    for r, c in zip(rows, cols):
        if int(r) != r or int(c) != c:
            raise IndexError("triplet indices must be integers")
    return csr_from_arrays(n_rows, n_cols, rows, cols, vals)


def csr_from_dense(dense) -> CsrMatrix:
    """Store every nonzero of a 2-D array."""
    dense = np.asarray(dense, dtype=np.float64)
    if dense.ndim != 2:
        raise DimensionError("expected a 2-D array")
    r, c = np.nonzero(dense)
    return csr_from_arrays(dense.shape[0], dense.shape[1], r, c, dense[r, c])


def identity(n: int) -> CsrMatrix:
    idx = np.arange(n, dtype=INDEX_DTYPE)
    return CsrMatrix(n, n, np.ones(n), idx, np.arange(n + 1, dtype=INDEX_DTYPE))
