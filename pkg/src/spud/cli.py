"""Command line surface: generate / recover / concentration / sweep / eval.

Exit codes: 0 success, 1 recovery failure, 2 usage or parse errors.  The
root seed comes from --seed, falling back to the SPUD_SEED environment
variable, then 0.  Identical invocations with the same root seed produce
byte-identical outputs.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import linalg
from .concentration import (
    ConcentrationConfig,
    NetSpec,
    UnsupportedSizeError,
    build_linf_net,
    mu_estimate,
    mu_exact,
)
from .evaluation import relative_error
from .matrixio import MatrixParseError, read_matrix, write_matrix
from .models import Seed, SparseModel, synth_instance
from .recovery import (
    AugmentationMatchError,
    RecoveryFailedError,
    STATUS_SUCCESS,
    recover_rectangular,
    recover_square,
    recover_verysparse,
)
from .sweep import MRule, PRule, SweepConfig, run_deviation_sweep, run_sweep

EXIT_OK = 0
EXIT_RECOVERY_FAILURE = 1
EXIT_USAGE = 2


def _default_seed() -> int:
    return int(os.environ.get("SPUD_SEED", "0"))


def _parse_int_list(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(",") if x)


def _parse_float_list(text: str) -> tuple[float, ...]:
    """Comma list ('0.02,0.04') or inclusive range ('0.02:0.18:0.02')."""
    if ":" in text:
        start, stop, step = (float(x) for x in text.split(":"))
        if step <= 0:
            raise ValueError("range step must be positive")
        vals = []
        k = 0
        while True:
            v = start + k * step
            if v > stop + 1e-12:
                break
            vals.append(round(v, 12))
            k += 1
        return tuple(vals)
    return tuple(float(x) for x in text.split(",") if x)


def _parse_p_rule(text: str) -> PRule:
    if ":" in text:
        kind, val = text.split(":", 1)
        return PRule(kind, float(val))
    return PRule("fixed", int(text))


def _parse_m_rule(text: str) -> MRule:
    if ":" in text:
        kind, val = text.split(":", 1)
        return MRule(kind, float(val))
    return MRule("fixed", int(text))


def _model_args(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--theta", type=float, help="Bernoulli fill probability")
    sub.add_argument("--k", type=int, help="exact nonzeros per column (overrides --theta)")
    sub.add_argument("--law", choices=("rademacher", "gaussian"), default="gaussian")


def _build_model(args, m: int, p: int) -> SparseModel:
    if args.k is not None:
        return SparseModel(m=m, p=p, law=args.law, exact_k=args.k)
    theta = args.theta if args.theta is not None else 0.1
    return SparseModel(m=m, p=p, theta=theta, law=args.law)


def cmd_generate(args) -> int:
    n = args.n
    m = args.m if args.m is not None else n
    p = args.p
    seed = Seed(args.seed)
    model = _build_model(args, m, p)
    A, X, Y = synth_instance(n, m, p, model, seed)
    write_matrix(f"{args.out}.A.txt", A)
    write_matrix(f"{args.out}.X.txt", X)
    write_matrix(f"{args.out}.Y.txt", Y)
    print(f"wrote {args.out}.A.txt {args.out}.X.txt {args.out}.Y.txt")
    return EXIT_OK


def cmd_recover(args) -> int:
    Y = read_matrix(args.infile)
    seed = Seed(args.seed)
    try:
        if args.algorithm == "erspud":
            res = recover_square(Y, seed, zero_tol=args.zero_tol)
        elif args.algorithm == "verysparse":
            res = recover_verysparse(Y, collinear_tol=args.collinear_tol)
        else:
            if args.m is None:
                print("recover: --m is required for the rectangular algorithm",
                      file=sys.stderr)
                return EXIT_USAGE
            model = _build_model(args, args.m, Y.shape[1])
            res = recover_rectangular(Y, args.m, model, seed, zero_tol=args.zero_tol)
    except (RecoveryFailedError, AugmentationMatchError, linalg.SingularMatrixError) as e:
        print(f"recovery failed: {e}", file=sys.stderr)
        return EXIT_RECOVERY_FAILURE
    if res.status != STATUS_SUCCESS:
        print(f"recovery failed: status={res.status} "
              f"(found {0 if res.A_hat is None else res.A_hat.shape[1]} columns)",
              file=sys.stderr)
        return EXIT_RECOVERY_FAILURE

    write_matrix(f"{args.out}.A_hat.txt", res.A_hat)
    write_matrix(f"{args.out}.X_hat.txt", res.X_hat)
    if args.truth:
        A = read_matrix(args.truth)
        report = relative_error(res.A_hat, A)
        print(json.dumps({
            "rel_error": report.rel_error,
            "permutation": report.permutation.tolist(),
            "scales": [float(s) for s in report.scales],
        }))
    else:
        print(f"wrote {args.out}.A_hat.txt {args.out}.X_hat.txt")
    return EXIT_OK


def cmd_eval(args) -> int:
    A_hat = read_matrix(args.a_hat)
    A = read_matrix(args.a)
    report = relative_error(A_hat, A)
    print(f"{report.rel_error:.17g}")
    return EXIT_OK


def _direction_vector(args, n: int) -> np.ndarray:
    if args.v_file:
        v = read_matrix(args.v_file)
        return v.reshape(-1)
    if args.direction == "e1":
        v = np.zeros(n)
        v[0] = 1.0
        return v
    return np.full(n, 1.0 / n)


def cmd_concentration(args) -> int:
    if args.report == "net":
        net = build_linf_net(NetSpec(n=args.n, alpha=args.alpha))
        if args.out:
            write_matrix(args.out, net)
        print(f"{net.shape[0]} net points (n={args.n}, alpha={args.alpha:g})")
        return EXIT_OK
    theta = args.theta if args.theta is not None else 0.5
    if args.report == "mu":
        v = _direction_vector(args, args.n)
        p = args.p_list[0]
        try:
            mu = mu_exact(v, theta, args.law, p)
            print(f"mu={mu:.17g} method=exact")
        except UnsupportedSizeError:
            mu, err = mu_estimate(v, theta, args.law, p, args.samples, Seed(args.seed))
            print(f"mu={mu:.17g} stderr={err:.17g} method=estimate")
        return EXIT_OK
    # deviation report
    run_deviation_sweep(args.n, theta, args.law, args.p_list, args.trials,
                        args.directions, args.seed, args.out)
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.k is not None:
        kind, values = "k", tuple(float(k) for k in _parse_int_list(args.k))
    elif args.theta is not None:
        kind, values = "theta", _parse_float_list(args.theta)
    else:
        print("sweep: one of --theta or --k is required", file=sys.stderr)
        return EXIT_USAGE
    cfg = SweepConfig(
        n_range=_parse_int_list(args.n),
        p_rule=_parse_p_rule(args.p),
        sparsity_kind=kind,
        sparsity_values=values,
        law=args.law,
        trials=args.trials,
        algorithm=args.algorithm,
        root_seed=args.seed,
        out_path=args.out,
        m_rule=_parse_m_rule(args.m) if args.m else None,
        success_threshold=args.success_threshold,
        zero_tol=args.zero_tol,
        collinear_tol=args.collinear_tol,
        jobs=args.jobs,
        timing=args.timing,
    )
    records = run_sweep(cfg)
    failures = sum(1 for r in records if r.status != STATUS_SUCCESS)
    print(f"wrote {cfg.out_path}: {len(records)} rows, {failures} failed trials")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="spud",
        description="Sparse dictionary recovery lab: generation, recovery, "
                    "concentration experiments and sweeps.")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="emit a ground-truth (A, X, Y) triple")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int, help="dictionary columns (default n)")
    g.add_argument("--p", type=int, required=True)
    _model_args(g)
    g.add_argument("--seed", type=int, default=_default_seed())
    g.add_argument("--out", required=True, help="output path prefix")
    g.set_defaults(func=cmd_generate)

    r = sub.add_parser("recover", help="run a recovery algorithm on a Y file")
    r.add_argument("--in", dest="infile", required=True)
    r.add_argument("--algorithm", choices=("erspud", "verysparse", "rectangular"),
                   default="erspud")
    r.add_argument("--m", type=int, help="dictionary columns for rectangular")
    _model_args(r)
    r.add_argument("--seed", type=int, default=_default_seed())
    r.add_argument("--zero-tol", type=float, default=1e-8)
    r.add_argument("--collinear-tol", type=float, default=1e-8)
    r.add_argument("--truth", help="ground-truth A file; prints a match report")
    r.add_argument("--out", required=True, help="output path prefix")
    r.set_defaults(func=cmd_recover)

    e = sub.add_parser("eval", help="relative error between two dictionaries")
    e.add_argument("--a-hat", required=True)
    e.add_argument("--a", required=True)
    e.set_defaults(func=cmd_eval)

    c = sub.add_parser("concentration", help="deviation / net / mu reports")
    c.add_argument("--report", choices=("deviation", "net", "mu"), default="deviation")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--alpha", type=float, default=0.5, help="net spacing")
    c.add_argument("--theta", type=float)
    c.add_argument("--law", choices=("rademacher", "gaussian"), default="rademacher")
    c.add_argument("--p", dest="p_list", type=_parse_int_list, default=(1000,),
                   help="comma-separated sample counts")
    c.add_argument("--directions", type=int, default=16)
    c.add_argument("--trials", type=int, default=1)
    c.add_argument("--samples", type=int, default=100_000, help="Monte-Carlo samples")
    c.add_argument("--direction", choices=("e1", "ones"), default="ones")
    c.add_argument("--v-file", help="matrix file holding the direction for --report mu")
    c.add_argument("--seed", type=int, default=_default_seed())
    c.add_argument("--out", help="output CSV (deviation) or matrix file (net)")
    c.set_defaults(func=cmd_concentration)

    s = sub.add_parser("sweep", help="grid experiment to CSV")
    s.add_argument("--algorithm", choices=("erspud", "verysparse", "rectangular"),
                   required=True)
    s.add_argument("--n", required=True, help="comma-separated n values")
    s.add_argument("--p", required=True,
                   help="fixed int, 'nlogn:C' or 'n2log2n:C'")
    s.add_argument("--theta", help="comma list or start:stop:step range")
    s.add_argument("--k", help="comma-separated exact-k values")
    s.add_argument("--law", choices=("rademacher", "gaussian"), default="gaussian")
    s.add_argument("--m", help="fixed int or 'ratio:F' (rectangular only)")
    s.add_argument("--trials", type=int, default=10)
    s.add_argument("--seed", type=int, default=_default_seed())
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--success-threshold", type=float, default=1e-3)
    s.add_argument("--zero-tol", type=float, default=1e-8)
    s.add_argument("--collinear-tol", type=float, default=1e-8)
    s.add_argument("--timing", choices=("none", "wall"), default="none",
                   help="'wall' records runtime_ms but breaks byte-identical reruns")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except MatrixParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
