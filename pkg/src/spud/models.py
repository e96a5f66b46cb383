"""Seeded generation of every random object in the pipeline.

Streams come from a counter-based PRNG (Philox) keyed by a root seed plus a
derivation path, so any grid cell or trial can regenerate its data
independently of execution order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

LAWS = ("rademacher", "gaussian")


@dataclass(frozen=True)
class Seed:
    """Reproducible stream address: a root key plus a derivation path."""

    root: int
    path: tuple[int, ...] = ()

    def __post_init__(self):
        if not 0 <= int(self.root) < 2 ** 64:
            raise ValueError("root must be a 64-bit unsigned integer")

    def derive(self, *steps: int) -> "Seed":
        return Seed(self.root, self.path + tuple(int(s) for s in steps))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.root, spawn_key=self.path)
        return np.random.Generator(np.random.Philox(ss))

    def __str__(self) -> str:
        return ":".join(str(x) for x in (self.root,) + self.path)


@dataclass(frozen=True)
class SparseModel:
    """Sparse random matrix model: entries chi_ij * xi_ij.

    chi is Bernoulli(theta) (or an exactly-k-per-column support draw) and xi
    follows `law`: 'rademacher' (+-1) or 'gaussian' (standard normal).  Both
    laws have mean 0, variance <= 1 and E|xi| in [1/10, 1].
    """

    m: int
    p: int
    theta: float = 0.1
    law: str = "gaussian"
    exact_k: int | None = None
    seed: Seed = field(default_factory=lambda: Seed(0))

    def __post_init__(self):
        if self.m < 1 or self.p < 1:
            raise ValueError("m and p must be positive")
        if self.law not in LAWS:
            raise ValueError(f"law must be one of {LAWS}")
        if self.exact_k is None:
            if not 0.0 <= self.theta <= 1.0:
                raise ValueError("theta must lie in [0, 1]")
        else:
            if not 1 <= self.exact_k <= self.m:
                raise ValueError("exact_k must lie in [1, m]")

    @property
    def sparsity(self) -> float:
        """Effective fill fraction (k/m in exact-k mode)."""
        return self.theta if self.exact_k is None else self.exact_k / self.m


def _draw_values(rng: np.random.Generator, law: str, shape) -> np.ndarray:
    if law == "rademacher":
        return rng.integers(0, 2, size=shape).astype(float) * 2.0 - 1.0
    return rng.standard_normal(shape)


def gen_sparse(model: SparseModel) -> np.ndarray:
    """Draw an m x p sparse matrix from the model."""
    rng = model.seed.generator()
    m, p = model.m, model.p
    if model.exact_k is not None:
        k = model.exact_k
        # k distinct support rows per column via per-column random argsort
        order = rng.random((m, p)).argsort(axis=0)
        mask = order < k
    else:
        mask = rng.random((m, p)) < model.theta
    vals = _draw_values(rng, model.law, (m, p))
    return np.where(mask, vals, 0.0)


def gen_dense_gaussian(rows: int, cols: int, seed: Seed) -> np.ndarray:
    """Dense iid standard normal matrix."""
    if rows < 1 or cols < 1:
        raise ValueError("rows and cols must be positive")
    return seed.generator().standard_normal((rows, cols))


def gen_dense_rademacher(rows: int, cols: int, seed: Seed) -> np.ndarray:
    """Dense iid +-1 matrix."""
    if rows < 1 or cols < 1:
        raise ValueError("rows and cols must be positive")
    rng = seed.generator()
    return rng.integers(0, 2, size=(rows, cols)).astype(float) * 2.0 - 1.0


def truncate(m, tau: float) -> np.ndarray:
    """Zero out entries with magnitude above tau, keep the rest."""
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    m = np.asarray(m, dtype=float)
    return np.where(np.abs(m) <= tau, m, 0.0)


def abs_moment(law: str) -> float:
    """E|xi| for a value law (1 for Rademacher, sqrt(2/pi) for Gaussian)."""
    if law == "rademacher":
        return 1.0
    if law == "gaussian":
        return math.sqrt(2.0 / math.pi)
    raise ValueError(f"law must be one of {LAWS}")


def synth_instance(n: int, m: int, p: int, model: SparseModel, seed: Seed):
    """Ground-truth triple (A, X, Y): A is n x m Gaussian, X from the model.

    The model's own m/p/seed fields are overridden by (m, p, seed-derived)
    so one call site controls all dimensions.
    """
    if m > n:
        raise ValueError("m must not exceed n")
    A = gen_dense_gaussian(n, m, seed.derive(0))
    X = gen_sparse(
        SparseModel(m=m, p=p, theta=model.theta, law=model.law,
                    exact_k=model.exact_k, seed=seed.derive(1))
    )
    return A, X, A @ X
