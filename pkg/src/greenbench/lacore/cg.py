"""Unpreconditioned conjugate gradient on CSR matrices."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ..errors import BreakdownError, DimensionError
from .csr import CsrMatrix
from .kernels import as_vector, axpy, dot, norm2, spmv


@dataclass
class CgReport:
    iterations: int
    residual_history: list[float] = field(default_factory=list)
    converged: bool = False
    final_relative_residual: float = float("nan")


def cg_solve(
    A: CsrMatrix,
    b,
    tol: float = 1e-10,
    max_iter: Optional[int] = None,
    workers: int = 1,
    callback: Optional[Callable[[int, np.ndarray], None]] = None,
) -> tuple[np.ndarray, CgReport]:
    """Solve ``A x = b`` from ``x0 = 0``.

    Iterates until the recursively updated residual satisfies
    ``||r|| / ||b|| <= tol`` or ``max_iter`` (default: the matrix order) is
    reached. At that point the true residual ``b - A x`` is recomputed; if
    it fails the tolerance while iterations remain, the recursive residual
    is replaced by the true one and the iteration restarts from the current
    ``x``. ``residual_history`` holds ``||r_k||`` for k = 0..iterations.

    ``callback(k, x_k)`` is invoked after each iteration.

    Raises :class:`BreakdownError` when ``p^T A p <= 0``.
    """
    b = as_vector(b, "b")
    if A.n_rows != A.n_cols:
        raise DimensionError("CG needs a square matrix")
    if A.n_rows != b.size:
        raise DimensionError(f"matrix order {A.n_rows} does not match rhs length {b.size}")
    if not 0.0 < tol < 1.0:
        raise ValueError("tol must lie in (0, 1)")
    if max_iter is None:
        max_iter = max(1, A.n_rows)
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")

    x = np.zeros_like(b)
    b_norm = norm2(b, workers)
    if b_norm == 0.0:
        return x, CgReport(0, [0.0], True, 0.0)

    r = b.copy()
    p = r.copy()
    rr = dot(r, r, workers)
    history = [float(np.sqrt(rr))]
    k = 0
    while True:
        while k < max_iter and history[-1] / b_norm > tol:
            Ap = spmv(A, p, workers)
            pAp = dot(p, Ap, workers)
            if not pAp > 0.0:
                raise BreakdownError(f"p^T A p = {pAp!r} at iteration {k}; matrix is not SPD")
            alpha = rr / pAp
            x = axpy(alpha, p, x, workers)
            r = axpy(-alpha, Ap, r, workers)
            rr_new = dot(r, r, workers)
            p = axpy(rr_new / rr, p, r, workers)
            rr = rr_new
            k += 1
            history.append(float(np.sqrt(rr)))
            if callback is not None:
                callback(k, x)
        true_r = b - spmv(A, x, workers)
        rel = norm2(true_r, workers) / b_norm
        if rel <= tol or k >= max_iter:
            break
        # recursive residual drifted below the true one: replace and restart
        r = true_r
        p = r.copy()
        rr = dot(r, r, workers)
        history[-1] = float(np.sqrt(rr))
    return x, CgReport(k, history, rel <= tol, float(rel))
