"""Matrix Market coordinate files and one-value-per-line vectors.

Files are 1-based on disk and 0-based in memory. Writing always produces
``coordinate real general`` with entries sorted by (row, col); reading also
accepts ``symmetric`` (mirrored on load) and ``integer``/``pattern`` fields.
"""

from __future__ import annotations

import io

import numpy as np

from .._io import atomic_write_text
from .csr import CsrMatrix, csr_from_arrays


def format_matrix_market(A: CsrMatrix, comment: str | None = None) -> str:
    out = io.StringIO()
    out.write("%%MatrixMarket matrix coordinate real general\n")
    if comment:
        for line in comment.splitlines():
            out.write(f"% {line}\n")
    out.write(f"{A.n_rows} {A.n_cols} {A.nnz}\n")
    rows = A.row_indices() + 1
    cols = A.JA + 1
    for r, c, v in zip(rows.tolist(), cols.tolist(), A.AA.tolist()):
        out.write(f"{r} {c} {v!r}\n")
    return out.getvalue()


def write_matrix_market(A: CsrMatrix, path, comment: str | None = None) -> None:
    atomic_write_text(path, format_matrix_market(A, comment))


def parse_matrix_market(text: str) -> CsrMatrix:
    lines = text.splitlines()
    if not lines or not lines[0].lower().startswith("%%matrixmarket"):
        raise ValueError("missing %%MatrixMarket banner")
    banner = lines[0].split()
    if len(banner) != 5:
        raise ValueError(f"malformed banner: {lines[0]!r}")
    _, obj, fmt, field, symmetry = (t.lower() for t in banner)
    if obj != "matrix" or fmt != "coordinate":
        raise ValueError("only 'matrix coordinate' files are supported")
    if field not in ("real", "integer", "pattern", "double"):
        raise ValueError(f"unsupported field {field!r}")
    if symmetry not in ("general", "symmetric"):
        raise ValueError(f"unsupported symmetry {symmetry!r}")

    body = (ln.strip() for ln in lines[1:])
    body = [ln for ln in body if ln and not ln.startswith("%")]
    if not body:
        raise ValueError("missing size line")
    try:
        n_rows, n_cols, nnz = (int(t) for t in body[0].split())
    except ValueError:
        raise ValueError(f"malformed size line: {body[0]!r}") from None
    entries = body[1:]
    if len(entries) != nnz:
        raise ValueError(f"size line declares {nnz} entries, found {len(entries)}")

    rows = np.empty(nnz, dtype=np.int64)
    cols = np.empty(nnz, dtype=np.int64)
    vals = np.ones(nnz)
    for k, ln in enumerate(entries):
        parts = ln.split()
        want = 2 if field == "pattern" else 3
        if len(parts) != want:
            raise ValueError(f"entry {k + 1}: expected {want} fields, got {len(parts)}")
        rows[k] = int(parts[0]) - 1
        cols[k] = int(parts[1]) - 1
        if field != "pattern":
            vals[k] = float(parts[2])
    if symmetry == "symmetric":
        off = rows != cols
        rows, cols, vals = (
            np.concatenate((rows, cols[off])),
            np.concatenate((cols, rows[off])),
            np.concatenate((vals, vals[off])),
        )
    return csr_from_arrays(n_rows, n_cols, rows, cols, vals)


def read_matrix_market(path) -> CsrMatrix:
    with open(path, encoding="utf-8") as fh:
        return parse_matrix_market(fh.read())


def format_vector(v) -> str:
    return "".join(f"{x!r}\n" for x in np.asarray(v, dtype=np.float64).tolist())


def write_vector(v, path) -> None:
    atomic_write_text(path, format_vector(v))


def parse_vector(text: str) -> np.ndarray:
    values = []
    for lineno, ln in enumerate(text.splitlines(), start=1):
        ln = ln.strip()
        if not ln or ln.startswith("#") or ln.startswith("%"):
            continue
        try:
            values.append(float(ln))
        except ValueError:
            raise ValueError(f"vector line {lineno}: not a number: {ln!r}") from None
    return np.asarray(values, dtype=np.float64)


def read_vector(path) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        return parse_vector(fh.read())
