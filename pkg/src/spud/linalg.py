"""Dense real linear algebra used by every other module.

All matrices are 2-D float64 numpy arrays in C (row-major) order.  Entries
must be finite; NaN/Inf inputs are rejected at the public entry points and
never produced by the operations here.
"""

from __future__ import annotations

import warnings

import numpy as np
from scipy.linalg import lu_factor, lu_solve

DEFAULT_RANK_TOL = 1e-10


class SingularMatrixError(ValueError):
    """A solve hit a pivot below the singularity tolerance."""

    def __init__(self, pivot: float, tol: float):
        self.pivot = float(pivot)
        self.tol = float(tol)
        super().__init__(f"matrix singular to tolerance: |pivot|={pivot:.3e} <= {tol:.3e}")


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Validate and return *a* as a finite 2-D float64 array."""
    m = np.ascontiguousarray(a, dtype=float)
    if m.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got ndim={m.ndim}")
    if m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"{name} must have positive dimensions, got {m.shape}")
    if not np.isfinite(m).all():
        raise ValueError(f"{name} contains non-finite entries")
    return m


def matmul(a, b) -> np.ndarray:
    """Matrix product a @ b with dimension checking."""
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape} @ {b.shape}")
    return a @ b


def frobenius(a) -> float:
    """Frobenius norm."""
    return float(np.linalg.norm(as_matrix(a), "fro"))


def rank(a, tol: float = DEFAULT_RANK_TOL) -> int:
    """Numerical rank via row reduction with partial pivoting.

    A pivot counts if its magnitude exceeds ``tol * largest_pivot``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    m = as_matrix(a).copy()
    rows, cols = m.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        i = r + int(np.argmax(np.abs(m[r:, c])))
        piv = m[i, c]
        if piv == 0.0:
            continue
        if i != r:
            m[[r, i]] = m[[i, r]]
        pivots.append(abs(piv))
        m[r + 1:, :] -= np.outer(m[r + 1:, c] / piv, m[r, :])
        m[r + 1:, c] = 0.0
        r += 1
    if not pivots:
        return 0
    largest = max(pivots)
    return int(sum(p > tol * largest for p in pivots))


def solve(a, b, tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Solve a @ x = b for square a via LU with partial pivoting.

    Raises SingularMatrixError (carrying the offending pivot magnitude) when
    the smallest pivot falls at or below ``tol * largest_pivot``.
    """
    a = as_matrix(a, "a")
    b2 = np.ascontiguousarray(b, dtype=float)
    vector_in = b2.ndim == 1
    if vector_in:
        b2 = b2[:, None]
    b2 = as_matrix(b2, "b")
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"a must be square, got {a.shape}")
    if b2.shape[0] != a.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b2.shape}")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")   # the pivot check below owns singularity
        lu, piv = lu_factor(a, check_finite=False)
    diag = np.abs(np.diag(lu))
    largest = float(diag.max()) if diag.size else 0.0
    smallest = float(diag.min()) if diag.size else 0.0
    if largest == 0.0 or smallest <= tol * largest:
        raise SingularMatrixError(smallest, tol * largest)
    x = lu_solve((lu, piv), b2, check_finite=False)
    return x[:, 0] if vector_in else x


def inverse(a, tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Matrix inverse via solve against the identity."""
    a = as_matrix(a, "a")
    return solve(a, np.eye(a.shape[0]), tol=tol)
