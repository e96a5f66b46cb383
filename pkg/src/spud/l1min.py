"""Constrained l1 minimization:  min ||Y^T w||_1  subject to  r^T w = 1.

The solver is a dense primal simplex specialized to the l1 structure.  The
single equality constraint is eliminated by substituting the coordinate of
the largest |r| entry, which leaves the classic l1-fitting linear program
min 1^T(t+ + t-) s.t. t+ - t- = residuals(u).  That program starts from a
feasible all-t basis (no phase-1 needed), and the tableau stores only one
column of each +-pair since mirrors are exact negations.  The ratio test
passes through breakpoints while the directional derivative stays negative
(the classic multi-breakpoint step for l1 problems), and falls back to
Bland's rule if the objective stalls, which guarantees termination.  The
returned w is always a vertex of the feasible polyhedron.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import as_matrix

STATUS_OPTIMAL = "optimal"
STATUS_INFEASIBLE = "infeasible"
STATUS_UNBOUNDED = "unbounded"


class IterationLimitError(RuntimeError):
    """Simplex exceeded its iteration cap; with Bland's rule this indicates a defect."""


@dataclass(frozen=True)
class L1Problem:
    """Data (Y, r) for  min ||Y^T w||_1  s.t.  r^T w = 1."""

    Y: np.ndarray
    r: np.ndarray

    def __post_init__(self):
        Y = as_matrix(self.Y, "Y")
        r = np.ascontiguousarray(self.r, dtype=float)
        if r.ndim != 1 or r.shape[0] != Y.shape[0]:
            raise ValueError(f"r must be a vector of length {Y.shape[0]}")
        if not np.isfinite(r).all():
            raise ValueError("r contains non-finite entries")
        object.__setattr__(self, "Y", Y)
        object.__setattr__(self, "r", r)


@dataclass(frozen=True)
class L1Solution:
    w: np.ndarray
    objective: float
    status: str
    iterations: int


@dataclass(frozen=True)
class LinearProgram:
    """Standard-form view of the l1 program in the (w, t) variables.

    minimize    c . x          over x = (w, t)
    subject to  A_ub x <= b_ub   (2p rows:  Y^T w - t <= 0,  -Y^T w - t <= 0)
                A_eq x == b_eq   (1 row:    r^T w == 1)
    """

    c: np.ndarray
    A_ub: np.ndarray
    b_ub: np.ndarray
    A_eq: np.ndarray
    b_eq: np.ndarray

    @property
    def num_variables(self) -> int:
        return self.c.shape[0]


def to_lp(prob: L1Problem) -> LinearProgram:
    """Build the (w, t) linear program equivalent to the l1 problem."""
    Y = prob.Y
    n, p = Y.shape
    c = np.concatenate([np.zeros(n), np.ones(p)])
    A_ub = np.zeros((2 * p, n + p))
    A_ub[:p, :n] = Y.T
    A_ub[p:, :n] = -Y.T
    A_ub[:p, n:] = -np.eye(p)
    A_ub[p:, n:] = -np.eye(p)
    b_ub = np.zeros(2 * p)
    A_eq = np.concatenate([prob.r, np.zeros(p)])[None, :]
    b_eq = np.ones(1)
    return LinearProgram(c=c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq)


def solve_l1(prob: L1Problem, tol: float = 1e-9, max_iters: int | None = None) -> L1Solution:
    """Solve the l1 program exactly; the result is a vertex optimizer."""
    Y, r = prob.Y, prob.r
    n, p = Y.shape
    if not np.any(r != 0.0):
        return L1Solution(w=np.zeros(n), objective=0.0, status=STATUS_INFEASIBLE, iterations=0)

    q = int(np.argmax(np.abs(r)))
    rq = r[q]
    keep = np.concatenate([np.arange(q), np.arange(q + 1, n)]).astype(int)
    d = n - 1
    c0 = Y[q, :] / rq
    if d:
        M = Y[keep, :].T - np.outer(Y[q, :], r[keep]) / rq
    else:
        M = np.zeros((p, 0))

    # rows scaled so rhs >= 0; stored columns [u | t]; mirrored columns are negations
    sig = np.where(c0 < 0.0, -1.0, 1.0)
    T = np.empty((p, d + p + 1))
    if d:
        T[:, :d] = -M * sig[:, None]
    T[:, d:d + p] = np.eye(p)
    T[:, -1] = c0 * sig
    cost = np.concatenate([np.zeros(d), np.ones(p)])

    basis_col = (d + np.arange(p)).astype(int)
    basis_sig = np.ones(p)
    is_t_basic = np.ones(p, dtype=bool)

    scale = max(1.0, float(np.abs(c0).max()))
    if max_iters is None:
        max_iters = 200 * (p + d) + 1000

    iters = 0
    bland = False
    stall = 0
    prev_obj = np.inf

    while True:
        cb = is_t_basic.astype(float)
        y = cb @ T[:, :d + p]
        if bland:
            zplus = cost - y
            zminus = cost + y
            zv = np.empty(2 * (d + p))
            zv[0::2] = zplus
            zv[1::2] = zminus
            negs = np.flatnonzero(zv < -tol * scale)
            if negs.size == 0:
                break
            v = int(negs[0])
            j, use_mirror = v // 2, bool(v % 2)
        else:
            zbest = cost - np.abs(y)
            j = int(np.argmin(zbest))
            if zbest[j] >= -tol * scale:
                break
            use_mirror = y[j] < 0.0
        sgn = -1.0 if use_mirror else 1.0
        a = sgn * T[:, j]
        rd = cost[j] - sgn * y[j]

        pos = a > 1e-11
        if not np.any(pos):
            # objective is bounded below by 0, so this cannot occur on valid data
            return L1Solution(w=np.zeros(n), objective=0.0,
                              status=STATUS_UNBOUNDED, iterations=iters)
        rows = np.flatnonzero(pos)
        lam = T[rows, -1] / a[rows]
        order = np.argsort(lam, kind="stable")
        rows = rows[order]

        if bland:
            lam_sorted = lam[order]
            ties = rows[lam_sorted <= lam_sorted[0] + 1e-12]
            bvi = 2 * basis_col[ties] + (basis_sig[ties] < 0)
            i_piv = int(ties[np.argmin(bvi)])
            flips = None
        else:
            D = rd
            i_piv = -1
            flip_list = []
            for i in rows:
                if is_t_basic[i]:
                    Dn = D + 2.0 * a[i]
                    if Dn >= -tol * scale:
                        i_piv = int(i)
                        break
                    D = Dn
                flip_list.append(int(i))
            if i_piv < 0:
                return L1Solution(w=np.zeros(n), objective=0.0,
                                  status=STATUS_UNBOUNDED, iterations=iters)
            flips = np.array(flip_list, dtype=int)
            if flips.size:
                T[flips, :] *= -1.0
                basis_sig[flips] *= -1.0

        av = sgn * T[:, j]
        piv = av[i_piv]
        T[i_piv, :] /= piv
        colv = av.copy()
        colv[i_piv] = 0.0
        T -= np.outer(colv, T[i_piv, :])
        basis_col[i_piv] = j
        basis_sig[i_piv] = sgn
        is_t_basic[i_piv] = j >= d

        obj = float(T[is_t_basic, -1].sum())
        if obj > prev_obj - 1e-12 * scale:
            stall += 1
            if stall > 2 * d + 100 and not bland:
                bland = True
        else:
            stall = 0
        prev_obj = obj
        iters += 1
        if iters > max_iters:
            raise IterationLimitError(f"simplex exceeded {max_iters} iterations")

    u = np.zeros(d)
    for i in range(p):
        jc = basis_col[i]
        if jc < d:
            u[jc] = basis_sig[i] * T[i, -1]
    w = np.zeros(n)
    if d:
        w[keep] = u
        w[q] = (1.0 - r[keep] @ u) / rq
    else:
        w[q] = 1.0 / rq
    w += 0.0  # normalize -0.0
    objective = float(np.abs(Y.T @ w).sum())
    return L1Solution(w=w, objective=objective, status=STATUS_OPTIMAL, iterations=iters)
