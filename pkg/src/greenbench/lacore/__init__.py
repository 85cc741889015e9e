"""CSR matrices, vector kernels, conjugate gradient and the benchmark runner."""

from .bench import KERNELS, BenchmarkResult, modeled_kernel_time, run_kernel_benchmark, traffic_bytes
from .cg import CgReport, cg_solve
from .csr import CsrMatrix, csr_from_arrays, csr_from_dense, csr_from_triplets, identity
from .kernels import CHUNK, as_vector, axpy, chunked_sum, dot, ewmul, norm2, spmv
from .mmio import (
    format_matrix_market,
    parse_matrix_market,
    read_matrix_market,
    read_vector,
    write_matrix_market,
    write_vector,
)

__all__ = [
    "CHUNK",
    "KERNELS",
    "BenchmarkResult",
    "CgReport",
    "CsrMatrix",
    "as_vector",
    "axpy",
    "cg_solve",
    "chunked_sum",
    "csr_from_arrays",
    "csr_from_dense",
    "csr_from_triplets",
    "dot",
    "ewmul",
    "format_matrix_market",
    "identity",
    "modeled_kernel_time",
    "norm2",
    "parse_matrix_market",
    "read_matrix_market",
    "read_vector",
    "run_kernel_benchmark",
    "spmv",
    "traffic_bytes",
    "write_matrix_market",
    "write_vector",
]
