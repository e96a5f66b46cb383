"""Plain-text matrix files: first line "rows cols", one row per line.

Values are written with 17 significant digits, which round-trips float64
exactly, so the format is lossless and diffable.
"""

from __future__ import annotations

import os

import numpy as np

from .linalg import as_matrix


class MatrixParseError(ValueError):
    """Malformed matrix file; carries the 1-based offending line number."""

    def __init__(self, path: str, line: int, msg: str):
        self.path = path
        self.line = line
        super().__init__(f"{path}:{line}: {msg}")


def write_matrix(path: str | os.PathLike, m) -> None:
    m = as_matrix(m, "matrix")
    with open(path, "w") as fh:
        fh.write(f"{m.shape[0]} {m.shape[1]}\n")
        for row in m:
            fh.write(" ".join(f"{x:.17g}" for x in row) + "\n")


def read_matrix(path: str | os.PathLike) -> np.ndarray:
    path = os.fspath(path)
    with open(path) as fh:
        header = fh.readline()
        if not header:
            raise MatrixParseError(path, 1, "empty file")
        parts = header.split()
        if len(parts) != 2:
            raise MatrixParseError(path, 1, "expected header 'rows cols'")
        try:
            rows, cols = int(parts[0]), int(parts[1])
        except ValueError:
            raise MatrixParseError(path, 1, "header entries must be integers") from None
        if rows < 1 or cols < 1:
            raise MatrixParseError(path, 1, "dimensions must be positive")
        out = np.empty((rows, cols))
        for i in range(rows):
            line = fh.readline()
            if not line:
                raise MatrixParseError(path, i + 2, f"expected {rows} data rows")
            vals = line.split()
            if len(vals) != cols:
                raise MatrixParseError(path, i + 2,
                                       f"expected {cols} values, got {len(vals)}")
            try:
                out[i] = [float(v) for v in vals]
            except ValueError:
                raise MatrixParseError(path, i + 2, "non-numeric value") from None
        if not np.isfinite(out).all():
            raise MatrixParseError(path, 0, "matrix contains non-finite entries")
    return out
