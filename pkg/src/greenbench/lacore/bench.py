"""Phase-annotated kernel benchmark runner.

One run walks through ``idle -> alloc_copy -> kernel -> copy_back -> idle``
and records wall-clock boundaries for each phase, so the schedule can be
lined up against a power trace. The kernel phase runs the kernel
``repetitions`` times; the reported kernel time is the median of those.
"""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..phases import BENCH_PHASES, Phase, PhaseSchedule
from .cg import cg_solve
from .csr import CsrMatrix
from .kernels import axpy, dot, ewmul, spmv

KERNELS = ("axpy", "ewmul", "dot", "spmv", "cg")
MATRIX_KERNELS = ("spmv", "cg")
WORD = 8


@dataclass
class BenchmarkResult:
    kernel: str
    n: int
    schedule: PhaseSchedule
    samples_s: list[float]
    kernel_time_s: float
    nnz: Optional[int] = None
    cg_iterations: Optional[int] = None
    extra: dict = field(default_factory=dict)


def traffic_bytes(kernel: str, n: int, nnz: int = 0, cg_iterations: int = 0) -> int:
    """Bytes moved by one call, counting 8-byte values and 8-byte indices."""
    spmv_bytes = nnz * 3 * WORD + (n + 1) * WORD + n * WORD
    if kernel in ("axpy", "ewmul"):
        return 3 * n * WORD
    if kernel == "dot":
        return 2 * n * WORD
    if kernel == "spmv":
        return spmv_bytes
    if kernel == "cg":
        per_iter = spmv_bytes + 2 * (2 * n * WORD) + 3 * (3 * n * WORD)
        return max(1, cg_iterations) * per_iter
    raise ValueError(f"unknown kernel {kernel!r}")


def modeled_kernel_time(kernel: str, n: int, nnz: int = 0, cg_iterations: int = 0,
                        bandwidth_bytes_per_s: float = 10e9) -> float:
    """Memory-bound time estimate; deterministic stand-in for wall-clock."""
    if bandwidth_bytes_per_s <= 0:
        raise ValueError("bandwidth must be positive")
    return traffic_bytes(kernel, n, nnz, cg_iterations) / bandwidth_bytes_per_s


def _matrix_for_size(size: int) -> CsrMatrix:
    from ..matrixgen import GridSpec, generate_gravity_matrix, grid_for_order

    nx, ny, nz = grid_for_order(size)
    A, _ = generate_gravity_matrix(GridSpec(nx, ny, nz))
    return A


def run_kernel_benchmark(
    kernel: str,
    size: Optional[int] = None,
    matrix: Optional[CsrMatrix] = None,
    repetitions: int = 5,
    *,
    idle_s: float = 0.001,
    seed: int = 0,
    workers: int = 1,
    cg_tol: float = 1e-8,
) -> BenchmarkResult:
    """Time ``kernel`` and return its phase schedule.

    Vector kernels take ``size``. ``spmv`` and ``cg`` take ``matrix``; given
    only ``size`` they build a gravity matrix of roughly that order.
    """
    if kernel not in KERNELS:
        raise ValueError(f"unknown kernel {kernel!r}; expected one of {', '.join(KERNELS)}")
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    if kernel in MATRIX_KERNELS:
        if matrix is None:
            if size is None:
                raise ValueError(f"{kernel} needs a matrix or a size")
            matrix = _matrix_for_size(int(size))
        n = matrix.n_rows
    else:
        if size is None:
            if matrix is None:
                raise ValueError(f"{kernel} needs a size")
            size = matrix.n_rows
        n = int(size)
    if n < 1:
        raise ValueError("size must be >= 1")

    rng = np.random.default_rng(seed)
    marks = [time.perf_counter()]
    time.sleep(idle_s)
    marks.append(time.perf_counter())

    try:
        x_host = rng.standard_normal(n)
        y_host = rng.standard_normal(n)
        x = x_host.copy()
        y = y_host.copy()
    except MemoryError as exc:
        raise MemoryError(f"cannot allocate operands of size {n}") from exc
    if kernel == "cg":
        b = spmv(matrix, x, workers)
    marks.append(time.perf_counter())

    samples = []
    iterations = None
    result = None
    for _ in range(repetitions):
        t0 = time.perf_counter()
        if kernel == "axpy":
            result = axpy(2.0, x, y, workers)
        elif kernel == "ewmul":
            result = ewmul(x, y, workers)
        elif kernel == "dot":
            result = np.array([dot(x, y, workers)])
        elif kernel == "spmv":
            result = spmv(matrix, x, workers)
        else:
            result, report = cg_solve(matrix, b, tol=cg_tol, workers=workers)
            iterations = report.iterations
        samples.append(time.perf_counter() - t0)
    marks.append(time.perf_counter())

    _ = np.array(result, copy=True)
    marks.append(time.perf_counter())
    time.sleep(idle_s)
    marks.append(time.perf_counter())

    base = marks[0]
    rel = [m - base for m in marks]
    for i in range(1, len(rel)):
        if rel[i] <= rel[i - 1]:
            rel[i] = np.nextafter(rel[i - 1], np.inf)
    schedule = PhaseSchedule(
        tuple(Phase(name, rel[i], rel[i + 1]) for i, name in enumerate(BENCH_PHASES))
    )
    return BenchmarkResult(
        kernel=kernel,
        n=n,
        schedule=schedule,
        samples_s=samples,
        kernel_time_s=float(statistics.median(samples)),
        nnz=matrix.nnz if kernel in MATRIX_KERNELS else None,
        cg_iterations=iterations,
    )


def format_timings_csv(result: BenchmarkResult) -> str:
    lines = ["repetition,kernel_s"]
    lines += [f"{i},{s:.9f}" for i, s in enumerate(result.samples_s)]
    lines.append(f"median,{result.kernel_time_s:.9f}")
    return "\n".join(lines) + "\n"
