"""Permutation/scaling-invariant comparison of dictionaries.

The relative error of A_hat against A is

    re = min over permutation P and nonzero diagonal L of ||A_hat L P - A||_F / ||A||_F.

The Frobenius objective separates by matched column pair, the optimal scale
per pair is the least-squares one, and the optimal permutation is a
minimum-cost perfect matching on the per-pair residual costs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .linalg import as_matrix


@dataclass(frozen=True)
class MatchReport:
    """Optimal assignment: recovered column i plays truth column permutation[i]."""

    permutation: np.ndarray        # int, len m
    scales: np.ndarray             # float, len m; scale applied to A_hat column i
    rel_error: float
    per_column_errors: np.ndarray  # residual 2-norm per matched pair


def _pair_costs(A_hat: np.ndarray, A: np.ndarray) -> np.ndarray:
    """cost[i, j] = min over scale s of ||s * ahat_i - a_j||^2."""
    nrm2 = (A * A).sum(axis=0)
    dots = A_hat.T @ A
    denom = (A_hat * A_hat).sum(axis=0)
    gain = np.zeros_like(dots)
    nz = denom > 0.0
    gain[nz, :] = dots[nz, :] ** 2 / denom[nz, None]
    return np.maximum(nrm2[None, :] - gain, 0.0)


def relative_error(A_hat, A) -> MatchReport:
    """Best-case relative Frobenius error over column permutations and scales."""
    A_hat = as_matrix(A_hat, "A_hat")
    A = as_matrix(A, "A")
    if A_hat.shape != A.shape:
        raise ValueError(f"dimension mismatch: {A_hat.shape} vs {A.shape}")
    denom = float(np.linalg.norm(A, "fro"))
    if denom == 0.0:
        raise ValueError("A must be nonzero")

    cost = _pair_costs(A_hat, A)
    rows, cols = linear_sum_assignment(cost)
    perm = np.empty(A.shape[1], dtype=int)
    perm[rows] = cols

    scales = np.zeros(A.shape[1])
    for i, j in zip(rows, cols):
        d = float((A_hat[:, i] ** 2).sum())
        scales[i] = float(A_hat[:, i] @ A[:, j]) / d if d > 0.0 else 0.0
    per_col = np.sqrt(cost[rows, cols])
    rel = float(np.sqrt(cost[rows, cols].sum()) / denom)
    return MatchReport(permutation=perm, scales=scales, rel_error=rel,
                       per_column_errors=per_col)


def apply_match(A_hat, report: MatchReport) -> np.ndarray:
    """Rebuild A_hat * L * P for the reported scales and permutation."""
    A_hat = as_matrix(A_hat, "A_hat")
    out = np.zeros_like(A_hat)
    for i, j in enumerate(report.permutation):
        out[:, j] = report.scales[i] * A_hat[:, i]
    return out


def support_match(X_hat, X, zero_tol: float, row_map=None) -> float:
    """Fraction of rows of X_hat whose nonzero pattern matches its X row.

    Entries with magnitude <= zero_tol count as zero.  `row_map` (for
    example a MatchReport permutation) sends X_hat row i to X row
    row_map[i]; identity when omitted.
    """
    X_hat = as_matrix(X_hat, "X_hat")
    X = as_matrix(X, "X")
    if X_hat.shape != X.shape:
        raise ValueError(f"dimension mismatch: {X_hat.shape} vs {X.shape}")
    m = X.shape[0]
    if row_map is None:
        row_map = np.arange(m)
    hits = 0
    for i in range(m):
        a = np.abs(X_hat[i]) > zero_tol
        b = np.abs(X[int(row_map[i])]) > zero_tol
        hits += bool((a == b).all())
    return hits / m
