"""Gravity-model test matrices.

The potential of a density anomaly satisfies ``-lap(phi) = 4 pi G drho`` in
a box with homogeneous Dirichlet data. Discretizing with trilinear (Q1)
hexahedra on a uniform ``nx x ny x nz`` element grid and keeping only
interior nodes gives an SPD matrix of order ``(nx-1)(ny-1)(nz-1)`` with at
most 27 nonzeros per row.

Lengths are taken in the units given (km by convention); the source term is
``4 pi G drho`` in SI units. Neither choice affects the sparsity structure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .lacore.csr import CsrMatrix, csr_from_arrays

G_NEWTON = 6.674e-11

# reference cube node a = ix + 2*iy + 4*iz sits at (-1)^(1+i) along each axis
_LOCAL = np.array([[ix, iy, iz] for iz in (0, 1) for iy in (0, 1) for ix in (0, 1)])
_GAUSS = 1.0 / math.sqrt(3.0)


@dataclass(frozen=True)
class AnomalyBox:
    bounds: tuple[tuple[float, float], tuple[float, float], tuple[float, float]] = (
        (10.0, 190.0),
        (10.0, 190.0),
        (0.0, 10.0),
    )
    delta_rho: float = -300.0
    G: float = G_NEWTON

    def __post_init__(self):
        bounds = tuple((float(a), float(b)) for a, b in self.bounds)
        if len(bounds) != 3:
            raise ValueError("anomaly bounds need three (lo, hi) pairs")
        object.__setattr__(self, "bounds", bounds)
        for lo, hi in bounds:
            if not (math.isfinite(lo) and math.isfinite(hi)) or not hi > lo:
                raise ValueError(f"anomaly interval ({lo}, {hi}) must be finite with hi > lo")
        if not math.isfinite(self.delta_rho):
            raise ValueError("delta_rho must be finite")
        if not (math.isfinite(self.G) and self.G > 0):
            raise ValueError("G must be finite and positive")

    @classmethod
    def centered(cls, lx: float, ly: float, lz: float, delta_rho: float = -300.0, G: float = G_NEWTON):
        """Full-depth anomaly spanning the middle 90% of the box horizontally."""
        return cls(((0.05 * lx, 0.95 * lx), (0.05 * ly, 0.95 * ly), (0.0, lz)), delta_rho, G)

    @property
    def source(self) -> float:
        """Right-hand side value ``4 pi G drho`` inside the box."""
        return 4.0 * math.pi * self.G * self.delta_rho


@dataclass(frozen=True)
class GridSpec:
    nx: int
    ny: int
    nz: int
    lx: float = 200.0
    ly: float = 200.0
    lz: float = 10.0
    anomaly: Optional[AnomalyBox] = None  # default: AnomalyBox.centered over the box

    def __post_init__(self):
        for name in ("nx", "ny", "nz"):
            v = getattr(self, name)
            if int(v) != v or v < 2:
                raise ValueError(f"{name}={v}: need an integer >= 2 to have interior nodes")
            object.__setattr__(self, name, int(v))
        for name in ("lx", "ly", "lz"):
            v = float(getattr(self, name))
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be finite and positive")
            object.__setattr__(self, name, v)
        if self.anomaly is None:
            object.__setattr__(self, "anomaly", AnomalyBox.centered(self.lx, self.ly, self.lz))
        for (lo, hi), length in zip(self.anomaly.bounds, self.lengths):
            if lo < 0 or hi > length:
                raise ValueError("anomaly box must lie inside the domain")

    @property
    def lengths(self) -> tuple[float, float, float]:
        return (self.lx, self.ly, self.lz)

    @property
    def spacing(self) -> tuple[float, float, float]:
        return (self.lx / self.nx, self.ly / self.ny, self.lz / self.nz)

    @property
    def order(self) -> int:
        return (self.nx - 1) * (self.ny - 1) * (self.nz - 1)


def q1_element_stiffness(hx: float, hy: float, hz: float) -> np.ndarray:
    """8x8 Laplacian stiffness of a brick element, 2x2x2 Gauss quadrature."""
    signs = 2 * _LOCAL - 1  # (8, 3) entries in {-1, +1}
    pts = np.array([[gx, gy, gz] for gz in (-_GAUSS, _GAUSS) for gy in (-_GAUSS, _GAUSS)
                    for gx in (-_GAUSS, _GAUSS)])
    scale = np.array([2.0 / hx, 2.0 / hy, 2.0 / hz])
    det = hx * hy * hz / 8.0
    K = np.zeros((8, 8))
    for p in pts:
        lin = 1.0 + signs * p  # (8, 3): the three 1-D factors of each node
        grads = np.empty((8, 3))
        for d in range(3):
            others = [e for e in range(3) if e != d]
            grads[:, d] = 0.125 * signs[:, d] * lin[:, others[0]] * lin[:, others[1]] * scale[d]
        K += det * (grads @ grads.T)
    return 0.5 * (K + K.T)


def _overlap_hat_integrals(n: int, h: float, lo: float, hi: float) -> np.ndarray:
    """Integral of the two 1-D linear shape functions of every element over [lo, hi].

    Returns shape ``(n, 2)``: column 0 for the left node, column 1 for the right.
    """
    x0 = np.arange(n) * h
    x1 = x0 + h
    p = np.clip(lo, x0, x1)
    q = np.clip(hi, x0, x1)
    left = ((x1 - p) ** 2 - (x1 - q) ** 2) / (2.0 * h)
    right = ((q - x0) ** 2 - (p - x0) ** 2) / (2.0 * h)
    return np.stack((left, right), axis=1)


def _element_nodes(spec: GridSpec) -> np.ndarray:
    """Global node ids of every element, elements ordered x fastest."""
    nx, ny, nz = spec.nx, spec.ny, spec.nz
    ez, ey, ex = np.meshgrid(np.arange(nz), np.arange(ny), np.arange(nx), indexing="ij")
    ex, ey, ez = ex.ravel(), ey.ravel(), ez.ravel()
    ix = ex[:, None] + _LOCAL[None, :, 0]
    iy = ey[:, None] + _LOCAL[None, :, 1]
    iz = ez[:, None] + _LOCAL[None, :, 2]
    return ix, iy, iz


def _interior_index(spec: GridSpec, ix, iy, iz) -> np.ndarray:
    nx, ny, nz = spec.nx, spec.ny, spec.nz
    inside = (ix > 0) & (ix < nx) & (iy > 0) & (iy < ny) & (iz > 0) & (iz < nz)
    idx = (ix - 1) + (nx - 1) * ((iy - 1) + (ny - 1) * (iz - 1))
    return np.where(inside, idx, -1)


def generate_gravity_matrix(spec: GridSpec) -> tuple[CsrMatrix, np.ndarray]:
    """Assemble the interior-node Q1 stiffness matrix and load vector.

    Elements are visited in a fixed order, so the matrix is bitwise
    symmetric and identical across runs.
    """
    hx, hy, hz = spec.spacing
    Ke = q1_element_stiffness(hx, hy, hz)
    ix, iy, iz = _element_nodes(spec)
    dof = _interior_index(spec, ix, iy, iz)  # (n_elem, 8)

    rows = np.repeat(dof, 8, axis=1)  # (n_elem, 64): a-major
    cols = np.tile(dof, (1, 8))
    vals = np.broadcast_to(Ke.reshape(1, 64), rows.shape)
    keep = (rows >= 0) & (cols >= 0)
    h = spec.order
    A = csr_from_arrays(h, h, rows[keep], cols[keep], vals[keep])

    f = spec.anomaly.source
    (bx, by, bz) = spec.anomaly.bounds
    Ix = _overlap_hat_integrals(spec.nx, hx, *bx)
    Iy = _overlap_hat_integrals(spec.ny, hy, *by)
    Iz = _overlap_hat_integrals(spec.nz, hz, *bz)
    ex, ey, ez = ix[:, 0], iy[:, 0], iz[:, 0]
    loads = (
        f
        * Ix[ex[:, None], _LOCAL[None, :, 0]]
        * Iy[ey[:, None], _LOCAL[None, :, 1]]
        * Iz[ez[:, None], _LOCAL[None, :, 2]]
    )
    mask = dof >= 0
    rhs = np.bincount(dof[mask], weights=loads[mask], minlength=h).astype(np.float64)
    return A, rhs


def grid_for_order(order: int) -> tuple[int, int, int]:
    """Smallest cubic element grid with at least ``order`` interior nodes."""
    if order < 1:
        raise ValueError("order must be >= 1")
    m = 1
    while m**3 < order:
        m += 1
    return (m + 1, m + 1, m + 1)


@dataclass(frozen=True)
class MatrixStats:
    h: int
    nz: int
    density: float
    bandwidth: int
    max_row: int
    mean_row: float
    row_stddev: float

    def as_row(self) -> tuple:
        return (self.h, self.nz, self.density, self.bandwidth, self.max_row, self.mean_row, self.row_stddev)

    def csv_row(self) -> str:
        return ",".join(f"{v:.12g}" if isinstance(v, float) else str(v) for v in self.as_row())


STATS_HEADER = "h,nz,density,bandwidth,max_row,mean_row,row_stddev"


def matrix_stats(m: CsrMatrix) -> MatrixStats:
    """Structural statistics. ``density`` is a fraction, not a percentage."""
    h = m.n_rows
    counts = m.row_counts()
    nz = m.nnz
    bandwidth = int(np.max(np.abs(m.row_indices() - m.JA))) if nz else 0
    cells = h * m.n_cols
    return MatrixStats(
        h=h,
        nz=nz,
        density=nz / cells if cells else 0.0,
        bandwidth=bandwidth,
        max_row=int(counts.max()) if h else 0,
        mean_row=nz / h if h else 0.0,
        row_stddev=float(np.std(counts)) if h else 0.0,
    )
