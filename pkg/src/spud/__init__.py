"""Sparse dictionary recovery lab.

Recovers a dictionary A and sparse coefficients X from observations
Y = A X via constrained l1 minimization (pair columns, solve
min ||w^T Y||_1 s.t. r^T w = 1, keep the sparsest independent rows), plus a
rectangular variant, a collinearity-grouping algorithm for the very sparse
regime, permutation/scaling-invariant evaluation, and an empirical lab for
l1 concentration of Bernoulli-subgaussian matrices.
"""

from .concentration import (
    ConcentrationConfig,
    DeviationRecord,
    NetSpec,
    UnsupportedSizeError,
    bernstein_bound,
    build_linf_net,
    deviation_sup,
    mu_bounds,
    mu_estimate,
    mu_exact,
    predicted_net_size,
)
from .evaluation import MatchReport, apply_match, relative_error, support_match
from .l1min import (
    IterationLimitError,
    L1Problem,
    L1Solution,
    LinearProgram,
    solve_l1,
    to_lp,
)
from .linalg import SingularMatrixError, frobenius, inverse, matmul, rank, solve
from .matrixio import MatrixParseError, read_matrix, write_matrix
from .models import (
    Seed,
    SparseModel,
    abs_moment,
    gen_dense_gaussian,
    gen_dense_rademacher,
    gen_sparse,
    synth_instance,
    truncate,
)
from .recovery import (
    AugmentationMatchError,
    CandidateSet,
    Diagnostics,
    GroupPartition,
    RecoveryFailedError,
    RecoveryResult,
    erspud,
    greedy,
    group_collinear_columns,
    numeric_l0,
    recover_rectangular,
    recover_square,
    recover_verysparse,
)
from .sweep import CSV_HEADER, CellRecord, MRule, PRule, SweepConfig, run_sweep

__version__ = "0.1.0"
