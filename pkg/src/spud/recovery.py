"""Dictionary recovery algorithms.

Four routes to (A_hat, X_hat) from Y:

* `erspud`  — pair columns of Y, solve one constrained l1 program per pair,
  collect the candidate rows w^T Y.
* `greedy`  — pick candidate rows by ascending numeric l0, keeping a row
  only if it raises the rank, until rank n; then A = Y Y^T (X Y^T)^{-1}.
* `recover_rectangular` — augment Y by B Z with fresh random B, Z so the
  square pipeline applies, then strip the rows of X' that match Z.
* `recover_verysparse` — group columns of Y by collinearity and read the
  dictionary off the representatives of groups with at least 3 members.

Recovery is only ever asserted modulo column permutation and nonzero
column scaling.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .l1min import L1Problem, solve_l1, IterationLimitError, STATUS_OPTIMAL
from .models import Seed, SparseModel, gen_sparse, gen_dense_gaussian, gen_dense_rademacher

DEFAULT_ZERO_TOL = 1e-8
DEFAULT_COLLINEAR_TOL = 1e-8

STATUS_SUCCESS = "success"
STATUS_TOO_FEW = "too_few_columns"
STATUS_TOO_MANY = "too_many_columns"


class RecoveryFailedError(RuntimeError):
    """Greedy could not reach full rank from the candidate set."""

    def __init__(self, achieved_rank: int, needed: int):
        self.achieved_rank = achieved_rank
        self.needed = needed
        super().__init__(f"greedy reached rank {achieved_rank} of {needed}")


class AugmentationMatchError(RuntimeError):
    """Fewer recovered rows matched the known augmentation Z than required."""

    def __init__(self, matched: int, needed: int):
        self.matched = matched
        self.needed = needed
        super().__init__(f"only {matched} of {needed} augmentation rows identified")


@dataclass
class Diagnostics:
    solves: int = 0
    lp_failures: int = 0
    candidates: int = 0
    discarded: int = 0
    rank_progression: list[int] = field(default_factory=list)
    notes: dict = field(default_factory=dict)


@dataclass
class RecoveryResult:
    A_hat: np.ndarray | None
    X_hat: np.ndarray | None
    row_sources: list[int]
    diagnostics: Diagnostics
    status: str = STATUS_SUCCESS


@dataclass
class CandidateSet:
    """Rows produced by the pairing stage, with per-row pair provenance."""

    rows: np.ndarray            # (T, p)
    pair_index: list[int]       # which pair produced each row
    pair_cols: list[tuple[int, int]]
    diagnostics: Diagnostics


@dataclass
class GroupPartition:
    """Column indices of Y grouped by collinearity; zero columns kept apart."""

    groups: list[list[int]]
    representatives: list[int]
    zero_columns: list[int]


def erspud(Y, seed: Seed) -> CandidateSet:
    """Pair the columns of Y at random and solve one l1 program per pair.

    For pair (j1, j2) the constraint vector is r = Y e_j1 + Y e_j2 and the
    candidate row is w^T Y for the minimizer w.  A failed solve skips that
    pair (recorded in diagnostics) rather than aborting.
    """
    Y = linalg.as_matrix(Y, "Y")
    n, p = Y.shape
    if p < 2:
        raise ValueError("need at least two columns to pair")
    rng = seed.generator()
    perm = rng.permutation(p)
    diag = Diagnostics()
    rows = []
    pidx = []
    pcols = []
    for i in range(p // 2):
        a, b = int(perm[2 * i]), int(perm[2 * i + 1])
        r = Y[:, a] + Y[:, b]
        diag.solves += 1
        try:
            sol = solve_l1(L1Problem(Y, r))
        except IterationLimitError:
            diag.lp_failures += 1
            continue
        if sol.status != STATUS_OPTIMAL:
            diag.lp_failures += 1
            continue
        rows.append(sol.w @ Y)
        pidx.append(i)
        pcols.append((a, b))
    diag.candidates = len(rows)
    S = np.array(rows) if rows else np.zeros((0, p))
    return CandidateSet(rows=S, pair_index=pidx, pair_cols=pcols, diagnostics=diag)


def numeric_l0(row: np.ndarray, zero_tol: float = DEFAULT_ZERO_TOL) -> int:
    """Count entries above zero_tol * max|row| (all-zero rows count 0)."""
    mx = float(np.abs(row).max()) if row.size else 0.0
    if mx == 0.0:
        return 0
    return int((np.abs(row) > zero_tol * mx).sum())


def greedy(S, n: int, Y, zero_tol: float = DEFAULT_ZERO_TOL,
           sources: list[int] | None = None,
           diagnostics: Diagnostics | None = None) -> RecoveryResult:
    """Select rows of S by ascending numeric l0 until they span rank n.

    Ties in l0 break toward the lower candidate index.  A row is admitted
    only if it increases the running rank.  The dictionary estimate is
    A = Y Y^T (X Y^T)^{-1}.
    """
    S = np.atleast_2d(np.asarray(S, dtype=float))
    Y = linalg.as_matrix(Y, "Y")
    nc, p = S.shape
    if p != Y.shape[1]:
        raise ValueError("candidate length must match Y's column count")
    diag = diagnostics if diagnostics is not None else Diagnostics()
    if sources is None:
        sources = list(range(nc))

    l0 = np.array([numeric_l0(S[i], zero_tol) for i in range(nc)])
    order = np.argsort(l0, kind="stable")

    picked: list[int] = []
    X_rows: list[np.ndarray] = []
    Q = np.zeros((0, p))   # orthonormal basis of the picked row space
    for idx in order:
        s = S[idx]
        resid = s - Q.T @ (Q @ s) if Q.shape[0] else s.copy()
        nrm = float(np.linalg.norm(resid))
        if nrm > 1e-10 * max(1.0, float(np.linalg.norm(s))):
            picked.append(int(idx))
            X_rows.append(s)
            Q = np.vstack([Q, resid / nrm])
            diag.rank_progression.append(len(X_rows))
            if len(X_rows) == n:
                break
        else:
            diag.discarded += 1
    if len(X_rows) < n:
        raise RecoveryFailedError(len(X_rows), n)

    X_hat = np.array(X_rows)
    G = linalg.matmul(Y, Y.T)
    H = linalg.matmul(X_hat, Y.T)
    A_hat = linalg.solve(H.T, G.T).T
    return RecoveryResult(
        A_hat=A_hat,
        X_hat=X_hat,
        row_sources=[sources[i] for i in picked],
        diagnostics=diag,
        status=STATUS_SUCCESS,
    )


def recover_square(Y, seed: Seed, zero_tol: float = DEFAULT_ZERO_TOL) -> RecoveryResult:
    """Full square pipeline: erspud candidates, then greedy selection."""
    Y = linalg.as_matrix(Y, "Y")
    n = Y.shape[0]
    cands = erspud(Y, seed)
    return greedy(cands.rows, n, Y, zero_tol=zero_tol,
                  sources=cands.pair_index, diagnostics=cands.diagnostics)


def recover_rectangular(Y, m: int, model: SparseModel, seed: Seed,
                        zero_tol: float = DEFAULT_ZERO_TOL,
                        b_law: str = "rademacher",
                        match_cos: float = 0.99) -> RecoveryResult:
    """Recover a rank-m dictionary from Y = A X with A of shape n x m, m < n.

    Augments Y with B Z (Z drawn from the X model's law and theta, B
    Rademacher by default or Gaussian), runs the square pipeline on
    Y' = Y + B Z, identifies the recovered rows of X' that are collinear
    with the known rows of Z (greedily by |cos| quality, each match must
    reach `match_cos`), and strips them.
    """
    Y = linalg.as_matrix(Y, "Y")
    n, p = Y.shape
    if m > n:
        raise ValueError("m must not exceed n")
    if m == n:
        return recover_square(Y, seed, zero_tol=zero_tol)

    zmodel = SparseModel(m=n - m, p=p, theta=model.theta, law=model.law,
                         exact_k=model.exact_k, seed=seed.derive(101))
    Z = gen_sparse(zmodel)
    if b_law == "rademacher":
        B = gen_dense_rademacher(n, n - m, seed.derive(102))
    elif b_law == "gaussian":
        B = gen_dense_gaussian(n, n - m, seed.derive(102))
    else:
        raise ValueError("b_law must be 'rademacher' or 'gaussian'")

    Yp = Y + linalg.matmul(B, Z)
    res = recover_square(Yp, seed.derive(103), zero_tol=zero_tol)

    Zn = Z / np.maximum(np.linalg.norm(Z, axis=1, keepdims=True), 1e-300)
    Xn = res.X_hat / np.maximum(np.linalg.norm(res.X_hat, axis=1, keepdims=True), 1e-300)
    C = np.abs(Zn @ Xn.T)    # (n-m) x n match quality
    order = np.argsort(C, axis=None, kind="stable")[::-1]
    used_z: set[int] = set()
    used_x: set[int] = set()
    for flat in order:
        i, j = divmod(int(flat), n)
        if i in used_z or j in used_x:
            continue
        if C[i, j] < match_cos:
            break
        used_z.add(i)
        used_x.add(j)
        if len(used_z) == n - m:
            break
    if len(used_z) < n - m:
        raise AugmentationMatchError(len(used_z), n - m)

    keep = [j for j in range(n) if j not in used_x]
    res.diagnostics.notes["augmentation_rows"] = sorted(used_x)
    return RecoveryResult(
        A_hat=res.A_hat[:, keep],
        X_hat=res.X_hat[keep, :],
        row_sources=[res.row_sources[j] for j in keep],
        diagnostics=res.diagnostics,
        status=STATUS_SUCCESS,
    )


def group_collinear_columns(Y, collinear_tol: float = DEFAULT_COLLINEAR_TOL) -> GroupPartition:
    """Partition columns of Y into collinearity groups.

    A column joins the existing group whose unit representative has the
    highest |cos| with it, provided |cos| >= 1 - collinear_tol; otherwise it
    starts a new group.  Exactly-zero columns form their own group and never
    count toward dictionary columns.
    """
    Y = linalg.as_matrix(Y, "Y")
    n, p = Y.shape
    norms = np.linalg.norm(Y, axis=0)
    groups: list[list[int]] = []
    reps: list[int] = []
    rep_units: list[np.ndarray] = []
    zero_cols = [j for j in range(p) if norms[j] == 0.0]
    thresh = 1.0 - collinear_tol
    U = np.zeros((n, 0))
    for j in range(p):
        if norms[j] == 0.0:
            continue
        u = Y[:, j] / norms[j]
        if U.shape[1]:
            cos = np.abs(u @ U)
            i = int(np.argmax(cos))
            if cos[i] >= thresh:
                groups[i].append(j)
                if norms[j] > norms[reps[i]]:
                    reps[i] = j
                    U[:, i] = u
                continue
        groups.append([j])
        reps.append(j)
        U = np.column_stack([U, u])
    return GroupPartition(groups=groups, representatives=reps, zero_columns=zero_cols)


def recover_verysparse(Y, collinear_tol: float = DEFAULT_COLLINEAR_TOL) -> RecoveryResult:
    """Recover the dictionary in the very sparse regime (theta ~ c/n).

    Groups with at least 3 members ("well represented") contribute their
    representative column.  When exactly n such groups appear, A_hat stacks
    the representatives and X_hat solves A_hat X = Y; otherwise the result
    carries a too-few/too-many status with A_hat holding the partial columns
    and X_hat = None.
    """
    Y = linalg.as_matrix(Y, "Y")
    n, p = Y.shape
    part = group_collinear_columns(Y, collinear_tol)
    diag = Diagnostics()
    diag.notes["num_groups"] = len(part.groups)
    diag.notes["num_zero_columns"] = len(part.zero_columns)
    diag.notes["x_hat_by_solve"] = True

    wr = [(g, rep) for g, rep in zip(part.groups, part.representatives) if len(g) >= 3]
    diag.notes["well_represented"] = len(wr)
    sources = [rep for _, rep in wr]
    A_cols = [Y[:, rep] for _, rep in wr]
    A_hat = np.column_stack(A_cols) if A_cols else None

    if len(wr) != n:
        status = STATUS_TOO_FEW if len(wr) < n else STATUS_TOO_MANY
        return RecoveryResult(A_hat=A_hat, X_hat=None, row_sources=sources,
                              diagnostics=diag, status=status)
    X_hat = linalg.solve(A_hat, Y)
    return RecoveryResult(A_hat=A_hat, X_hat=X_hat, row_sources=sources,
                          diagnostics=diag, status=STATUS_SUCCESS)
