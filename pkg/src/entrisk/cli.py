"""Command-line front end.

Subcommands
-----------
``sweep --config PATH``
    Run the configured sweep, write the CSV report and a JSON summary.
``solve --config PATH --lambda V --type {1,2}``
    Solve one direction at one factor and print atoms and weights as JSON.
``verify --config PATH``
    Run the invariant suite on the configured instance; exit 0 iff all pass.

Exit codes: 0 success, 1 validation error, 2 solver failure, 3 I/O error.
Diagnostics go to standard error; results go to standard output.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Sequence

import numpy as np

from .errors import (
    BracketFailure,
    ConfigError,
    DimensionMismatch,
    EntriskError,
    InstanceGenerationFailure,
    InvariantViolation,
    MalformedHeader,
    NonFiniteCell,
    NonPositiveArgument,
    NonPositiveLambda,
    RowArity,
    ToleranceNotReached,
)
from .experiment import (
    ExperimentConfig,
    emit_csv,
    generate_instance,
    grid_argmin_outside_support,
    lambda_grid,
    run_sweep,
    sweep_summary,
)
from .measures import kl_divergence, make_measure, total_variation
from .risk import expected_risk
from .type1 import solve_type1, type1_objective
from .type2 import expected_risk_identity, risk_bound_check, solve_type2, type2_objective
from .logrisk import verify_theorem2

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_SOLVER = 2
EXIT_IO = 3

_VALIDATION_ERRORS = (
    ConfigError,
    NonPositiveLambda,
    DimensionMismatch,
    MalformedHeader,
    RowArity,
    NonFiniteCell,
)
_SOLVER_ERRORS = (
    BracketFailure,
    ToleranceNotReached,
    InvariantViolation,
    NonPositiveArgument,
    InstanceGenerationFailure,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entrisk",
        description="Entropy-regularized ERM solvers and experiment sweeps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser("sweep", help="run the configured sweep and write reports")
    p_sweep.add_argument("--config", required=True, help="path to the JSON config")

    p_solve = sub.add_parser("solve", help="solve one direction at one factor")
    p_solve.add_argument("--config", required=True, help="path to the JSON config")
    p_solve.add_argument("--lambda", dest="lam", required=True, type=float,
                         help="regularization factor (> 0)")
    p_solve.add_argument("--type", dest="direction", required=True, choices=("1", "2"),
                         help="1: divergence of solution from reference; 2: reversed")

    p_verify = sub.add_parser("verify", help="run the invariant suite on the instance")
    p_verify.add_argument("--config", required=True, help="path to the JSON config")
    return parser


def _cmd_sweep(cfg: ExperimentConfig) -> int:
    if not cfg.output_csv:
        raise ConfigError("field 'output_csv': required by the sweep command")
    records = run_sweep(cfg)
    q, data, _ = generate_instance(cfg)
    emit_csv(records, cfg.base_dir / cfg.output_csv if not _is_abs(cfg.output_csv) else cfg.output_csv)
    summary = sweep_summary(cfg, records, q, data)
    if cfg.output_json:
        path = cfg.base_dir / cfg.output_json if not _is_abs(cfg.output_json) else cfg.output_json
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(summary, fh, sort_keys=True, indent=2)
            fh.write("\n")
    print(json.dumps(summary, sort_keys=True))
    return EXIT_OK if summary["invariants"]["all_rows_ok"] else EXIT_SOLVER


def _is_abs(p: str) -> bool:
    from pathlib import Path

    return Path(p).is_absolute()


def _cmd_solve(cfg: ExperimentConfig, lam: float, direction: str) -> int:
    if not lam > 0.0:
        raise NonPositiveLambda(f"field '--lambda': must be > 0, got {lam}")
    q, _, profile = generate_instance(cfg)
    out: dict = {
        "lambda": lam,
        "type": int(direction),
        "support": [list(pt.coords) for pt in q.support],
    }
    if direction == "1":
        sol = solve_type1(q, profile, lam)
        out["weights"] = [float(w) for w in sol.measure.weights]
        out["log_partition"] = sol.log_partition_at_minus_inv_lambda
    else:
        sol2 = solve_type2(q, profile, lam)
        out["weights"] = [float(w) for w in sol2.measure.weights]
        out["k_bar"] = sol2.k_bar
        out["residual"] = sol2.residual
        out["iterations"] = sol2.iterations
    print(json.dumps(out, sort_keys=True))
    return EXIT_OK


def _cmd_verify(cfg: ExperimentConfig) -> int:
    q, data, profile = generate_instance(cfg)
    delta_star = float(profile.aligned(q.support).min())
    rng = np.random.default_rng(cfg.seed)
    checks: list[tuple[str, bool, str]] = []

    def add(name: str, ok: bool, detail: str = "") -> None:
        checks.append((name, ok, detail))

    lambdas = [float(v) for v in lambda_grid(cfg)]
    k_bars: list[float] = []
    worst_resid = worst_identity = worst_gap = 0.0
    min_margin = math.inf
    collapse = True
    for lam in lambdas:
        sol2 = solve_type2(q, profile, lam)
        k_bars.append(sol2.k_bar)
        worst_resid = max(worst_resid, sol2.residual)
        lhs, rhs = expected_risk_identity(sol2, profile)
        worst_identity = max(worst_identity, abs(lhs - rhs))
        _, bound, _ = risk_bound_check(sol2, profile)
        min_margin = min(min_margin, bound - lhs)
        _, _, gap = verify_theorem2(q, profile, lam)
        worst_gap = max(worst_gap, gap)
        collapse = collapse and sol2.measure.support_set() == q.support_set()
        if not sol2.k_bar > -delta_star:
            add("k_bar_above_pole", False, f"lam={lam}")

    add("residual_le_1e-12", worst_resid <= 1e-12, f"worst={worst_resid:.3g}")
    add("identity_gap_le_1e-9", worst_identity <= 1e-9, f"worst={worst_identity:.3g}")
    add("bound_margin_positive", min_margin > 0.0, f"min={min_margin:.3g}")
    add("theorem2_gap_le_1e-9", worst_gap <= 1e-9, f"worst={worst_gap:.3g}")
    add("k_bar_strictly_increasing", all(a < b for a, b in zip(k_bars, k_bars[1:])))
    add("support_collapse", collapse)

    # Optimality spot check at the median factor, both directions.
    lam = lambdas[len(lambdas) // 2]
    sol1 = solve_type1(q, profile, lam)
    sol2 = solve_type2(q, profile, lam)
    obj1 = type1_objective(sol1.measure, q, profile, lam)
    obj2 = type2_objective(sol2.measure, q, profile, lam)
    ok1 = ok2 = True
    for _ in range(200):
        rand = make_measure(q.support, rng.dirichlet(np.ones(q.num_atoms)))
        if total_variation(rand, sol1.measure) > 1e-9:
            ok1 = ok1 and type1_objective(rand, q, profile, lam) > obj1
        if total_variation(rand, sol2.measure) > 1e-9:
            ok2 = ok2 and type2_objective(rand, q, profile, lam) > obj2
    add("type1_optimality_fuzz", ok1)
    add("type2_optimality_fuzz", ok2)

    info_flag = grid_argmin_outside_support(cfg, q, data)
    print(f"info grid_argmin_outside_support: {info_flag}")
    all_ok = True
    for name, ok, detail in checks:
        marker = "pass" if ok else "FAIL"
        suffix = f" ({detail})" if detail else ""
        print(f"{marker} {name}{suffix}")
        all_ok = all_ok and ok
    return EXIT_OK if all_ok else EXIT_SOLVER


def cli_main(argv: Sequence[str]) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        # argparse exits on --help (code 0) and on usage errors (code 2).
        return EXIT_OK if exc.code == 0 else EXIT_VALIDATION

    try:
        cfg = ExperimentConfig.from_json_file(args.config)
        if args.command == "sweep":
            return _cmd_sweep(cfg)
        if args.command == "solve":
            return _cmd_solve(cfg, args.lam, args.direction)
        return _cmd_verify(cfg)
    except _VALIDATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except _SOLVER_ERRORS as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except EntriskError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


def main() -> None:
    sys.exit(cli_main(sys.argv[1:]))


if __name__ == "__main__":
    main()
