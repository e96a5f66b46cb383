"""Experiment sweeps over (n, sparsity) grids, written as CSV.

Every (cell, trial) owns the derived seed (root, cell_index, trial), so any
row can be regenerated in isolation and reruns are byte-identical.  Trials
that fail to recover are recorded with rel_error = 1.0 (the error of the
null estimate, and the plot layer's "total failure" level) and a status
naming the failure; a sweep never aborts on a per-trial failure.

Rows are flushed as they are written, so an interrupted sweep loses at most
the in-flight row.  runtime_ms is 0 unless wall timing is requested, since
measured time would break byte-identical reruns.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import linalg
from .evaluation import relative_error
from .models import Seed, SparseModel, synth_instance
from .recovery import (
    AugmentationMatchError,
    RecoveryFailedError,
    STATUS_SUCCESS,
    recover_rectangular,
    recover_square,
    recover_verysparse,
)

CSV_HEADER = "n,p,sparsity,trial,seed,algorithm,rel_error,success,runtime_ms,status"

ALGORITHMS = ("erspud", "verysparse", "rectangular")


@dataclass(frozen=True)
class PRule:
    """Sample-count rule: fixed(p), nlogn(c) -> ceil(c n ln n), or n2log2n(c)."""

    kind: str
    value: float

    def __post_init__(self):
        if self.kind not in ("fixed", "nlogn", "n2log2n"):
            raise ValueError("kind must be fixed, nlogn or n2log2n")
        if self.value <= 0:
            raise ValueError("rule value must be positive")

    def p_for(self, n: int) -> int:
        if self.kind == "fixed":
            return int(self.value)
        if self.kind == "nlogn":
            return math.ceil(self.value * n * math.log(n))
        return math.ceil(self.value * n * n * math.log(n) ** 2)


@dataclass(frozen=True)
class MRule:
    """Dictionary width for rectangular sweeps: fixed(m) or ratio(f) -> round(f n)."""

    kind: str
    value: float

    def __post_init__(self):
        if self.kind not in ("fixed", "ratio"):
            raise ValueError("kind must be fixed or ratio")

    def m_for(self, n: int) -> int:
        m = int(self.value) if self.kind == "fixed" else int(round(self.value * n))
        if not 1 <= m <= n:
            raise ValueError(f"m={m} out of range for n={n}")
        return m


@dataclass(frozen=True)
class SweepConfig:
    n_range: tuple[int, ...]
    p_rule: PRule
    sparsity_kind: str               # "theta" or "k"
    sparsity_values: tuple[float, ...]
    law: str
    trials: int
    algorithm: str
    root_seed: int
    out_path: str
    m_rule: MRule | None = None
    success_threshold: float = 1e-3
    zero_tol: float = 1e-8
    collinear_tol: float = 1e-8
    jobs: int = 1
    timing: str = "none"             # "none" keeps reruns byte-identical

    def __post_init__(self):
        if not self.n_range or not self.sparsity_values:
            raise ValueError("n_range and sparsity_values must be non-empty")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.sparsity_kind not in ("theta", "k"):
            raise ValueError("sparsity_kind must be 'theta' or 'k'")
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"algorithm must be one of {ALGORITHMS}")
        if self.algorithm == "rectangular" and self.m_rule is None:
            raise ValueError("rectangular sweeps need an m_rule")
        if self.timing not in ("none", "wall"):
            raise ValueError("timing must be 'none' or 'wall'")

    def cells(self) -> list[tuple[int, int, float]]:
        """(cell_index, n, sparsity_value) in deterministic order."""
        out = []
        idx = 0
        for n in self.n_range:
            for s in self.sparsity_values:
                out.append((idx, n, s))
                idx += 1
        return out


@dataclass(frozen=True)
class CellRecord:
    n: int
    p: int
    sparsity: float
    trial: int
    seed: str
    algorithm: str
    rel_error: float
    success: bool
    runtime_ms: int
    status: str

    def csv_row(self) -> str:
        spars = _fmt_number(self.sparsity)
        rel = _fmt_number(self.rel_error)
        return (f"{self.n},{self.p},{spars},{self.trial},{self.seed},"
                f"{self.algorithm},{rel},{int(self.success)},{self.runtime_ms},{self.status}")


def _fmt_number(x: float) -> str:
    if float(x) == int(x):
        return str(int(x))
    return f"{x:.17g}"


def run_trial(cfg: SweepConfig, cell_index: int, n: int, sparsity: float,
              trial: int) -> CellRecord:
    """Generate ground truth, run the configured algorithm, evaluate."""
    p = cfg.p_rule.p_for(n)
    seed = Seed(cfg.root_seed, (cell_index, trial))
    if cfg.sparsity_kind == "k":
        model = SparseModel(m=n, p=p, law=cfg.law, exact_k=int(sparsity))
    else:
        model = SparseModel(m=n, p=p, theta=float(sparsity), law=cfg.law)

    m = cfg.m_rule.m_for(n) if cfg.algorithm == "rectangular" else n
    t0 = time.perf_counter()
    status = STATUS_SUCCESS
    rel = 1.0
    try:
        A, X, Y = synth_instance(n, m, p, model, seed)
        if cfg.algorithm == "erspud":
            res = recover_square(Y, seed.derive(2), zero_tol=cfg.zero_tol)
        elif cfg.algorithm == "verysparse":
            res = recover_verysparse(Y, collinear_tol=cfg.collinear_tol)
        else:
            res = recover_rectangular(Y, m, model, seed.derive(2), zero_tol=cfg.zero_tol)
        if res.status == STATUS_SUCCESS:
            rel = relative_error(res.A_hat, A).rel_error
        else:
            status = res.status
    except RecoveryFailedError:
        status = "recovery_failed"
    except AugmentationMatchError:
        status = "augmentation_mismatch"
    except linalg.SingularMatrixError:
        status = "singular"
    ms = int(round((time.perf_counter() - t0) * 1000)) if cfg.timing == "wall" else 0
    return CellRecord(n=n, p=p, sparsity=sparsity, trial=trial, seed=str(seed),
                      algorithm=cfg.algorithm, rel_error=rel,
                      success=rel < cfg.success_threshold, runtime_ms=ms, status=status)


def _trial_task(args):
    cfg, cell_index, n, sparsity, trial = args
    return run_trial(cfg, cell_index, n, sparsity, trial)


def run_sweep(cfg: SweepConfig) -> list[CellRecord]:
    """Execute all cells x trials, streaming rows to cfg.out_path."""
    tasks = [(cfg, idx, n, s, t)
             for (idx, n, s) in cfg.cells()
             for t in range(cfg.trials)]
    records: list[CellRecord] = []
    with open(cfg.out_path, "w") as fh:
        fh.write(CSV_HEADER + "\n")
        fh.flush()
        if cfg.jobs > 1:
            with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
                for rec in pool.map(_trial_task, tasks):
                    records.append(rec)
                    fh.write(rec.csv_row() + "\n")
                    fh.flush()
        else:
            for task in tasks:
                rec = _trial_task(task)
                records.append(rec)
                fh.write(rec.csv_row() + "\n")
                fh.flush()
    return records


DEVIATION_HEADER = "n,p,theta,law,trial,seed,directions,max_rel_dev"


def run_deviation_sweep(n: int, theta: float, law: str, p_values: tuple[int, ...],
                        trials: int, directions: int, root_seed: int,
                        out_path: str) -> list[float]:
    """Concentration harness: max relative deviation per (p, trial) as CSV."""
    from .concentration import ConcentrationConfig, deviation_sup

    out = []
    with open(out_path, "w") as fh:
        fh.write(DEVIATION_HEADER + "\n")
        fh.flush()
        for ip, p in enumerate(p_values):
            for t in range(trials):
                seed = Seed(root_seed, (ip, t))
                cfg = ConcentrationConfig(n=n, p=p, theta=theta, law=law,
                                          directions=directions, seed=seed)
                worst, _ = deviation_sup(cfg)
                out.append(worst)
                fh.write(f"{n},{p},{_fmt_number(theta)},{law},{t},{seed},"
                         f"{directions},{_fmt_number(worst)}\n")
                fh.flush()
    return out
