"""Energy-aware benchmarking of sparse linear-algebra kernels.

Subpackages:

* :mod:`greenbench.matrixgen` -- Q1 gravity-model test matrices and their statistics
* :mod:`greenbench.lacore` -- CSR storage, vector kernels, conjugate gradient, benchmark runner
* :mod:`greenbench.tracekit` -- power-trace parsing, filtering, step detection, energy
* :mod:`greenbench.powersim` -- synthetic power traces with known ground truth
* :mod:`greenbench.campaign` -- repeated experiments, pattern grouping, reports
"""

__version__ = "0.1.0"
