"""Empirical companion to the l1 concentration phenomenon.

Tools to measure how tightly ||X^T v||_1 hugs its mean mu_v across
directions v on the l1 sphere: exact/Monte-Carlo evaluation of mu_v,
a sampled sup of the relative deviation, the l_infinity alpha-net over the
l1 ball, and the Bernstein tail bound used in reports.

The sampled sup is a lower bound on the true sup over all of R^n; reports
label it accordingly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .models import Seed, SparseModel, gen_sparse, LAWS

MAX_EXACT_PATTERNS = 2_000_000


class UnsupportedSizeError(ValueError):
    """Exact enumeration would exceed the work/memory guard."""


@dataclass(frozen=True)
class ConcentrationConfig:
    n: int
    p: int
    theta: float
    law: str = "rademacher"
    c: float = 0.1
    directions: int = 16
    seed: Seed = field(default_factory=lambda: Seed(0))

    def __post_init__(self):
        if self.n < 1 or self.p < 1:
            raise ValueError("n and p must be positive")
        if not (1.0 / self.n <= self.theta <= 1.0):
            raise ValueError("theta must lie in [1/n, 1]")
        if self.law not in LAWS:
            raise ValueError(f"law must be one of {LAWS}")
        if self.directions < 1:
            raise ValueError("directions must be >= 1")


@dataclass(frozen=True)
class NetSpec:
    n: int
    alpha: float

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be >= 2")
        if not (2.0 / self.n <= self.alpha <= 1.0):
            raise ValueError("alpha must lie in [2/n, 1]")


@dataclass(frozen=True)
class DeviationRecord:
    kind: str
    v: np.ndarray
    mu: float
    mu_method: str
    observed: float
    rel_dev: float


def mu_bounds(theta: float, n: int, p: int) -> tuple[float, float]:
    """(mu_min, mu_max) = (p sqrt(theta/n), p theta) for unit-l1 directions."""
    return p * math.sqrt(theta / n), p * theta


def _exact_abs_moment_rademacher(v_nz: np.ndarray, theta: float) -> float:
    """E|sum_j chi_j xi_j v_j| by enumerating (chi, xi) patterns per coordinate.

    Equal partial sums are merged, so structured directions stay small; the
    worst case is 3^k patterns for k nonzero coordinates.
    """
    k = v_nz.size
    if 3 ** k > MAX_EXACT_PATTERNS:
        raise UnsupportedSizeError(
            f"3^{k} Rademacher patterns exceed the enumeration guard; use mu_estimate")
    vals = np.zeros(1)
    probs = np.ones(1)
    for vj in v_nz:
        vals = np.concatenate([vals, vals + vj, vals - vj])
        probs = np.concatenate([probs * (1 - theta), probs * (theta / 2),
                                probs * (theta / 2)])
        uniq, inv = np.unique(vals, return_inverse=True)
        merged = np.zeros(uniq.size)
        np.add.at(merged, inv, probs)
        vals, probs = uniq, merged
    return float(np.abs(vals) @ probs)


def _exact_abs_moment_gaussian(v_nz: np.ndarray, theta: float) -> float:
    """E|sum chi_j xi_j v_j| for Gaussian xi.

    Conditioned on the support T, the sum is N(0, sum_T v_j^2), whose
    absolute moment is sqrt(2/pi) * sigma, so supports are enumerated and
    signs integrate in closed form (2^k supports for k nonzeros).
    """
    k = v_nz.size
    if 2 ** k > MAX_EXACT_PATTERNS:
        raise UnsupportedSizeError(
            f"2^{k} Gaussian supports exceed the enumeration guard; use mu_estimate")
    sumsq = np.zeros(1)
    probs = np.ones(1)
    for vj in v_nz:
        sumsq = np.concatenate([sumsq, sumsq + vj * vj])
        probs = np.concatenate([probs * (1 - theta), probs * theta])
        uniq, inv = np.unique(sumsq, return_inverse=True)
        merged = np.zeros(uniq.size)
        np.add.at(merged, inv, probs)
        sumsq, probs = uniq, merged
    return float(math.sqrt(2.0 / math.pi) * (np.sqrt(sumsq) @ probs))


def mu_exact(v, theta: float, law: str, p: int) -> float:
    """mu_v = E||X^T v||_1 = p * E|X_1 . v|, computed exactly."""
    v = np.asarray(v, dtype=float)
    if not 0.0 <= theta <= 1.0:
        raise ValueError("theta must lie in [0, 1]")
    v_nz = v[v != 0.0]
    if v_nz.size == 0:
        return 0.0
    if law == "rademacher":
        return p * _exact_abs_moment_rademacher(v_nz, theta)
    if law == "gaussian":
        return p * _exact_abs_moment_gaussian(v_nz, theta)
    raise ValueError(f"law must be one of {LAWS}")


def mu_estimate(v, theta: float, law: str, p: int, samples: int,
                seed: Seed) -> tuple[float, float]:
    """Monte-Carlo (mean, stderr) for mu_v."""
    if samples < 100:
        raise ValueError("samples must be >= 100")
    v = np.asarray(v, dtype=float)
    v_nz = v[v != 0.0]
    if v_nz.size == 0:
        return 0.0, 0.0
    rng = seed.generator()
    mask = rng.random((samples, v_nz.size)) < theta
    if law == "rademacher":
        vals = rng.integers(0, 2, size=(samples, v_nz.size)).astype(float) * 2.0 - 1.0
    elif law == "gaussian":
        vals = rng.standard_normal((samples, v_nz.size))
    else:
        raise ValueError(f"law must be one of {LAWS}")
    z = np.abs((mask * vals) @ v_nz)
    mean = float(z.mean())
    stderr = float(z.std(ddof=1) / math.sqrt(samples))
    return p * mean, p * stderr


def _mu_for(v, cfg: ConcentrationConfig, estimate_samples: int,
            est_seed: Seed) -> tuple[float, str]:
    try:
        return mu_exact(v, cfg.theta, cfg.law, cfg.p), "exact"
    except UnsupportedSizeError:
        mean, _ = mu_estimate(v, cfg.theta, cfg.law, cfg.p, estimate_samples, est_seed)
        return mean, "estimate"


def sample_directions(cfg: ConcentrationConfig, X: np.ndarray) -> list[tuple[str, np.ndarray]]:
    """Deterministic mixture of unit-l1 directions.

    Always contains the two extremal directions e_1 and all-ones/n; when
    p < n a null-space direction of X^T witnesses total deviation; the rest
    alternates random signed-sparse vectors and dense Dirichlet draws.
    """
    n = cfg.n
    rng = cfg.seed.derive(7).generator()
    out: list[tuple[str, np.ndarray]] = [("coordinate", np.eye(n)[0]),
                                         ("ones", np.full(n, 1.0 / n))]
    if cfg.p < n:
        null = _null_direction(X)
        if null is not None:
            out.append(("nullspace", null))
    i = 0
    while len(out) < cfg.directions:
        if i % 2 == 0:
            k = int(rng.integers(2, min(4, n + 1)))
            support = rng.choice(n, size=k, replace=False)
            signs = rng.integers(0, 2, size=k) * 2.0 - 1.0
            v = np.zeros(n)
            v[support] = signs / k
            out.append(("signed-sparse", v))
        else:
            v = rng.dirichlet(np.ones(n)) * (rng.integers(0, 2, size=n) * 2.0 - 1.0)
            out.append(("dirichlet", v))
        i += 1
    return out


def _null_direction(X: np.ndarray) -> np.ndarray | None:
    """Unit-l1 v with X^T v = 0, or None when X^T has full column rank."""
    n = X.shape[0]
    _, s, vt = np.linalg.svd(X.T, full_matrices=True)
    if s.size >= n and s[-1] > 1e-10 * max(float(s[0]), 1.0):
        return None
    v = vt[-1]
    nrm = np.abs(v).sum()
    return v / nrm if nrm > 0 else None


def deviation_sup(cfg: ConcentrationConfig,
                  estimate_samples: int = 100_000) -> tuple[float, list[DeviationRecord]]:
    """Sampled sup over directions of |  ||X^T v||_1 - mu_v | / mu_v.

    Draws one X from the Bernoulli-theta model, then evaluates every
    direction in the mixture; mu_v comes from exact enumeration whenever the
    guard allows, Monte-Carlo otherwise.
    """
    X = gen_sparse(SparseModel(m=cfg.n, p=cfg.p, theta=cfg.theta, law=cfg.law,
                               seed=cfg.seed.derive(1)))
    records = []
    worst = 0.0
    for idx, (kind, v) in enumerate(sample_directions(cfg, X)):
        mu, method = _mu_for(v, cfg, estimate_samples, cfg.seed.derive(50, idx))
        observed = float(np.abs(X.T @ v).sum())
        rel = abs(observed - mu) / mu if mu > 0 else 0.0
        records.append(DeviationRecord(kind=kind, v=v, mu=mu, mu_method=method,
                                       observed=observed, rel_dev=rel))
        worst = max(worst, rel)
    return worst, records


def predicted_net_size(n: int, k: int) -> int:
    """Number of integer vectors g in Z^n with sum |g_i| <= k."""
    total = 1
    for s in range(1, k + 1):
        for j in range(1, min(s, n) + 1):
            total += math.comb(n, j) * math.comb(s - 1, j - 1) * (2 ** j)
    return total


def build_linf_net(spec: NetSpec, guard: int = 10_000_000) -> np.ndarray:
    """All vectors with coordinates in alpha*Z and ||v||_1 <= 1.

    Every x in the closed l1 ball lies within alpha of some net point in
    l_infinity distance (round each coordinate toward zero).
    """
    k = int(math.floor(1.0 / spec.alpha + 1e-12))
    count = predicted_net_size(spec.n, k)
    if count > guard:
        raise UnsupportedSizeError(f"predicted net size {count} exceeds guard {guard}")
    pts: list[list[int]] = []
    cur = [0] * spec.n

    def rec(i: int, budget: int):
        if i == spec.n:
            pts.append(cur.copy())
            return
        for g in range(-budget, budget + 1):
            cur[i] = g
            rec(i + 1, budget - abs(g))
        cur[i] = 0

    rec(0, k)
    return np.array(pts, dtype=float) * spec.alpha


def bernstein_bound(var_s: float, tau: float, t: float) -> float:
    """exp(-min(T^2 / (4 Var S), T / (4 tau))) for a bounded iid sum."""
    if var_s <= 0 or tau <= 0 or t <= 0:
        raise ValueError("var_s, tau and t must be positive")
    return math.exp(-min(t * t / (4.0 * var_s), t / (4.0 * tau)))
