"""Reproducible experiment harness: instances, sweeps, and report emission.

A single flat JSON document configures an experiment: a lattice model grid, a
reference measure over it (uniform, gaussian-weighted, or restricted to a
sub-box to induce misspecification), a dataset (synthetic or CSV), and a
geometric grid of regularization factors. ``run_sweep`` solves both
regularization directions at every factor and records the identities and
bounds each solution must satisfy; ``emit_csv`` writes the records with
17-significant-digit floats so output files are byte-stable.

Everything is deterministic: randomness is confined to explicitly seeded
generators, sums are exactly accumulated, and rows are ordered by ascending
regularization factor.
"""

from __future__ import annotations

import csv
import hashlib
import itertools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .errors import (
    ConfigError,
    EmptySupport,
    EntriskError,
    InstanceGenerationFailure,
    MalformedHeader,
    NonFiniteCell,
    RowArity,
)
from .measures import DiscreteMeasure, ModelPoint, kl_divergence, make_measure
from .risk import (
    Dataset,
    EmpiricalRiskProfile,
    LossSpec,
    PredictorSpec,
    erm_minimizers,
    expected_risk,
    risk_profile,
)
from .type1 import solve_type1
from .type2 import solve_type2
from .logrisk import verify_theorem2

CSV_HEADER = (
    "lambda,k_type1,k_bar_type2,risk_type1,risk_type2,identity_gap,"
    "bound_margin,kl_p_q_type1,kl_q_p_type2,theorem2_gap,iterations,"
    "residual,status"
)

REFERENCE_KINDS = ("uniform", "gaussian", "restricted")
DATASET_KINDS = ("synthetic", "csv")

_KNOWN_KEYS = {
    "predictor",
    "loss",
    "intercept",
    "grid_min",
    "grid_max",
    "grid_resolution",
    "reference",
    "reference_mean",
    "reference_scale",
    "reference_box_min",
    "reference_box_max",
    "dataset",
    "true_model",
    "noise",
    "n",
    "data_seed",
    "csv_path",
    "lambda_min",
    "lambda_max",
    "lambda_count",
    "output_csv",
    "output_json",
    "seed",
}


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ConfigError(message)


def _float_list(raw: Any, key: str) -> tuple[float, ...]:
    _require(isinstance(raw, (list, tuple)) and len(raw) > 0, f"field {key!r}: nonempty list required")
    try:
        vals = tuple(float(v) for v in raw)
    except (TypeError, ValueError):
        raise ConfigError(f"field {key!r}: entries must be numbers") from None
    _require(all(math.isfinite(v) for v in vals), f"field {key!r}: entries must be finite")
    return vals


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment description; see README for the JSON schema."""

    predictor: str
    loss: str
    intercept: bool
    grid_min: tuple[float, ...]
    grid_max: tuple[float, ...]
    grid_resolution: tuple[int, ...]
    reference: str
    reference_mean: tuple[float, ...] | None
    reference_scale: float | None
    reference_box_min: tuple[float, ...] | None
    reference_box_max: tuple[float, ...] | None
    dataset: str
    true_model: tuple[float, ...] | None
    noise: float | None
    n: int | None
    data_seed: int | None
    csv_path: str | None
    lambda_min: float
    lambda_max: float
    lambda_count: int
    output_csv: str | None
    output_json: str | None
    seed: int
    base_dir: Path = field(default_factory=Path.cwd)
    raw: dict[str, Any] = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return len(self.grid_resolution)

    @classmethod
    def from_dict(cls, raw: dict[str, Any], base_dir: Path | None = None) -> "ExperimentConfig":
        unknown = set(raw) - _KNOWN_KEYS
        _require(not unknown, f"unknown field(s): {', '.join(sorted(unknown))}")
        for key in ("predictor", "loss", "grid_min", "grid_max", "grid_resolution",
                    "reference", "dataset", "lambda_min", "lambda_max",
                    "lambda_count", "seed"):
            _require(key in raw, f"field {key!r}: required")

        predictor = raw["predictor"]
        _require(predictor in ("linear_regression", "linear_threshold_classifier"),
                 f"field 'predictor': unknown kind {predictor!r}")
        loss = raw["loss"]
        _require(loss in ("squared", "absolute", "zero_one"),
                 f"field 'loss': unknown kind {loss!r}")
        intercept = bool(raw.get("intercept", False))

        grid_min = _float_list(raw["grid_min"], "grid_min")
        grid_max = _float_list(raw["grid_max"], "grid_max")
        res_raw = raw["grid_resolution"]
        _require(isinstance(res_raw, (list, tuple)) and len(res_raw) > 0,
                 "field 'grid_resolution': nonempty list required")
        _require(all(isinstance(r, int) and r >= 1 for r in res_raw),
                 "field 'grid_resolution': entries must be integers >= 1")
        resolution = tuple(int(r) for r in res_raw)
        d = len(resolution)
        _require(len(grid_min) == d and len(grid_max) == d,
                 "fields 'grid_min'/'grid_max'/'grid_resolution': lengths must agree")
        _require(all(lo <= hi for lo, hi in zip(grid_min, grid_max)),
                 "field 'grid_min': must not exceed 'grid_max' on any axis")
        _require(not intercept or d >= 2,
                 "field 'intercept': needs model dimension >= 2")

        reference = raw["reference"]
        _require(reference in REFERENCE_KINDS,
                 f"field 'reference': unknown kind {reference!r}")
        reference_mean = reference_scale = None
        reference_box_min = reference_box_max = None
        if reference == "gaussian":
            _require("reference_mean" in raw, "field 'reference_mean': required for gaussian reference")
            _require("reference_scale" in raw, "field 'reference_scale': required for gaussian reference")
            reference_mean = _float_list(raw["reference_mean"], "reference_mean")
            _require(len(reference_mean) == d, "field 'reference_mean': length must equal grid dimension")
            reference_scale = float(raw["reference_scale"])
            _require(reference_scale > 0.0, "field 'reference_scale': must be > 0")
        elif reference == "restricted":
            _require("reference_box_min" in raw, "field 'reference_box_min': required for restricted reference")
            _require("reference_box_max" in raw, "field 'reference_box_max': required for restricted reference")
            reference_box_min = _float_list(raw["reference_box_min"], "reference_box_min")
            reference_box_max = _float_list(raw["reference_box_max"], "reference_box_max")
            _require(len(reference_box_min) == d and len(reference_box_max) == d,
                     "field 'reference_box_min'/'reference_box_max': length must equal grid dimension")

        dataset = raw["dataset"]
        _require(dataset in DATASET_KINDS, f"field 'dataset': unknown kind {dataset!r}")
        true_model = noise = n = data_seed = csv_path = None
        if dataset == "synthetic":
            for key in ("true_model", "noise", "n", "data_seed"):
                _require(key in raw, f"field {key!r}: required for synthetic dataset")
            true_model = _float_list(raw["true_model"], "true_model")
            _require(len(true_model) == d, "field 'true_model': length must equal grid dimension")
            noise = float(raw["noise"])
            _require(noise >= 0.0, "field 'noise': must be >= 0")
            _require(isinstance(raw["n"], int) and raw["n"] >= 1, "field 'n': integer >= 1 required")
            n = int(raw["n"])
            _require(isinstance(raw["data_seed"], int) and raw["data_seed"] >= 0,
                     "field 'data_seed': integer >= 0 required")
            data_seed = int(raw["data_seed"])
        else:
            _require("csv_path" in raw, "field 'csv_path': required for csv dataset")
            _require(isinstance(raw["csv_path"], str), "field 'csv_path': string required")
            csv_path = raw["csv_path"]

        lambda_min = float(raw["lambda_min"])
        lambda_max = float(raw["lambda_max"])
        _require(lambda_min > 0.0, "field 'lambda_min': must be > 0")
        _require(lambda_max >= lambda_min, "field 'lambda_max': must be >= lambda_min")
        _require(isinstance(raw["lambda_count"], int) and raw["lambda_count"] >= 1,
                 "field 'lambda_count': integer >= 1 required")
        _require(isinstance(raw["seed"], int) and raw["seed"] >= 0,
                 "field 'seed': integer >= 0 required")

        output_csv = raw.get("output_csv")
        output_json = raw.get("output_json")
        for key, val in (("output_csv", output_csv), ("output_json", output_json)):
            _require(val is None or isinstance(val, str), f"field {key!r}: string required")

        return cls(
            predictor=predictor,
            loss=loss,
            intercept=intercept,
            grid_min=grid_min,
            grid_max=grid_max,
            grid_resolution=resolution,
            reference=reference,
            reference_mean=reference_mean,
            reference_scale=reference_scale,
            reference_box_min=reference_box_min,
            reference_box_max=reference_box_max,
            dataset=dataset,
            true_model=true_model,
            noise=noise,
            n=n,
            data_seed=data_seed,
            csv_path=csv_path,
            lambda_min=lambda_min,
            lambda_max=lambda_max,
            lambda_count=int(raw["lambda_count"]),
            output_csv=output_csv,
            output_json=output_json,
            seed=int(raw["seed"]),
            base_dir=base_dir or Path.cwd(),
            raw=dict(raw),
        )

    @classmethod
    def from_json_file(cls, path: str | Path) -> "ExperimentConfig":
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError:
            raise
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        _require(isinstance(raw, dict), "config must be a JSON object")
        return cls.from_dict(raw, base_dir=path.parent)


def predictor_spec(cfg: ExperimentConfig) -> PredictorSpec:
    pattern_dim = cfg.dim - (1 if cfg.intercept else 0)
    return PredictorSpec(cfg.predictor, pattern_dim, cfg.intercept)


def loss_spec(cfg: ExperimentConfig) -> LossSpec:
    return LossSpec(cfg.loss)


def grid_points(cfg: ExperimentConfig) -> tuple[ModelPoint, ...]:
    """Lattice of model points: per-axis linspace, last axis fastest."""
    axes = [
        np.linspace(lo, hi, res)
        for lo, hi, res in zip(cfg.grid_min, cfg.grid_max, cfg.grid_resolution)
    ]
    return tuple(
        ModelPoint(tuple(float(c) for c in combo))
        for combo in itertools.product(*axes)
    )


def build_reference(cfg: ExperimentConfig, grid: Sequence[ModelPoint]) -> DiscreteMeasure:
    if cfg.reference == "uniform":
        weights = np.ones(len(grid))
    elif cfg.reference == "gaussian":
        mean = np.asarray(cfg.reference_mean, dtype=float)
        scale = float(cfg.reference_scale)
        sq = np.asarray(
            [float(np.sum((pt.as_array() - mean) ** 2)) for pt in grid]
        )
        logw = -sq / (2.0 * scale * scale)
        weights = np.exp(logw - logw.max())  # shift avoids total underflow
    else:
        lo = np.asarray(cfg.reference_box_min, dtype=float)
        hi = np.asarray(cfg.reference_box_max, dtype=float)
        inside = [
            bool(np.all(pt.as_array() >= lo) and np.all(pt.as_array() <= hi))
            for pt in grid
        ]
        weights = np.asarray(inside, dtype=float)
        if not any(inside):
            raise ConfigError(
                "field 'reference_box_min'/'reference_box_max': sub-box excludes every grid atom"
            )
    return make_measure(grid, weights)


def synthesize_dataset(cfg: ExperimentConfig) -> Dataset:
    """Seeded synthetic data: bounded-noise regression or label-flip classification."""
    pred = predictor_spec(cfg)
    rng = np.random.default_rng(cfg.data_seed)
    patterns = rng.uniform(-1.0, 1.0, size=(cfg.n, pred.pattern_dim))
    theta_star = ModelPoint(cfg.true_model)
    if cfg.predictor == "linear_regression":
        labels = pred.predict_all(theta_star, patterns)
        if cfg.noise > 0.0:
            labels = labels + cfg.noise * rng.uniform(-1.0, 1.0, size=cfg.n)
    else:
        labels = pred.predict_all(theta_star, patterns)
        flips = rng.random(cfg.n) < cfg.noise
        labels = np.where(flips, -labels, labels)
    return Dataset(patterns, labels)


def generate_instance(
    cfg: ExperimentConfig,
) -> tuple[DiscreteMeasure, Dataset, EmpiricalRiskProfile]:
    """Build (reference measure, dataset, risk profile) deterministically."""
    grid = grid_points(cfg)
    q = build_reference(cfg, grid)
    if cfg.dataset == "synthetic":
        data = synthesize_dataset(cfg)
    else:
        data = ingest_csv_dataset(cfg.base_dir / cfg.csv_path)
    pred = predictor_spec(cfg)
    if data.pattern_dim != pred.pattern_dim:
        raise ConfigError(
            f"field 'csv_path': dataset pattern dimension {data.pattern_dim} "
            f"does not match predictor dimension {pred.pattern_dim}"
        )
    profile = risk_profile(q, data, pred, loss_spec(cfg))
    return q, data, profile


def lambda_grid(cfg: ExperimentConfig) -> np.ndarray:
    """Geometric grid with exact endpoints, ascending."""
    if cfg.lambda_count == 1:
        return np.asarray([cfg.lambda_min])
    grid = np.logspace(
        math.log10(cfg.lambda_min), math.log10(cfg.lambda_max), cfg.lambda_count
    )
    grid[0] = cfg.lambda_min
    grid[-1] = cfg.lambda_max
    return grid


@dataclass(frozen=True)
class SweepRecord:
    """One row of a sweep: both solutions' diagnostics at one factor."""

    lam: float
    k_type1: float
    k_bar_type2: float
    risk_type1: float
    risk_type2: float
    identity_gap: float
    bound_margin: float
    kl_p_q_type1: float
    kl_q_p_type2: float
    theorem2_gap: float
    iterations: int
    residual: float
    status: str


def _failed_record(lam: float, status: str) -> SweepRecord:
    nan = float("nan")
    return SweepRecord(lam, nan, nan, nan, nan, nan, nan, nan, nan, nan, 0, nan, status)


def run_sweep(cfg: ExperimentConfig) -> list[SweepRecord]:
    """Solve both directions at every factor; failures mark rows, not aborts."""
    try:
        q, _, profile = generate_instance(cfg)
    except EntriskError:
        raise
    except Exception as exc:  # unexpected failure during generation
        raise InstanceGenerationFailure(str(exc)) from exc

    delta_star = float(profile.aligned(q.support).min())
    records: list[SweepRecord] = []
    for lam in lambda_grid(cfg):
        lam = float(lam)
        try:
            sol1 = solve_type1(q, profile, lam)
            risk1 = expected_risk(sol1.measure, profile)
            sol2 = solve_type2(q, profile, lam)
            risk2 = expected_risk(sol2.measure, profile)
            _, _, gap = verify_theorem2(q, profile, lam)
            records.append(
                SweepRecord(
                    lam=lam,
                    k_type1=sol1.log_partition_at_minus_inv_lambda,
                    k_bar_type2=sol2.k_bar,
                    risk_type1=risk1,
                    risk_type2=risk2,
                    identity_gap=abs(risk2 - (lam - sol2.k_bar)),
                    bound_margin=lam + delta_star - risk2,
                    kl_p_q_type1=kl_divergence(sol1.measure, q),
                    kl_q_p_type2=kl_divergence(q, sol2.measure),
                    theorem2_gap=gap,
                    iterations=sol2.iterations,
                    residual=sol2.residual,
                    status="ok",
                )
            )
        except EntriskError as exc:
            records.append(_failed_record(lam, type(exc).__name__))
    return records


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def emit_csv(records: Sequence[SweepRecord], path: str | Path) -> None:
    """UTF-8, LF-terminated CSV with 17-significant-digit floats."""
    lines = [CSV_HEADER]
    for r in records:
        lines.append(
            ",".join(
                [
                    _fmt(r.lam),
                    _fmt(r.k_type1),
                    _fmt(r.k_bar_type2),
                    _fmt(r.risk_type1),
                    _fmt(r.risk_type2),
                    _fmt(r.identity_gap),
                    _fmt(r.bound_margin),
                    _fmt(r.kl_p_q_type1),
                    _fmt(r.kl_q_p_type2),
                    _fmt(r.theorem2_gap),
                    str(r.iterations),
                    _fmt(r.residual),
                    r.status,
                ]
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def emit_dataset_csv(data: Dataset, path: str | Path) -> None:
    """Write a dataset in the ingestion schema (x1..xd,y; 17-digit floats)."""
    d = data.pattern_dim
    header = ",".join([f"x{i + 1}" for i in range(d)] + ["y"])
    lines = [header]
    for x, y in zip(data.patterns, data.labels):
        lines.append(",".join([_fmt(float(v)) for v in x] + [_fmt(float(y))]))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def ingest_csv_dataset(path: str | Path) -> Dataset:
    """Read a dataset CSV with header ``x1,...,xd,y``; strict and coordinate-exact.

    Errors carry 1-based row and column coordinates. Ingesting a file written
    by :func:`emit_dataset_csv` reproduces the dataset bit for bit.
    """
    path = Path(path)
    with path.open("r", encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise MalformedHeader(f"{path}: empty file, header row required")
    header = rows[0]
    d = len(header) - 1
    expected = [f"x{i + 1}" for i in range(d)] + ["y"]
    if d < 1 or header != expected:
        raise MalformedHeader(
            f"{path}: header must be x1,...,xd,y (got {','.join(header)!r})"
        )
    if len(rows) == 1:
        raise RowArity(f"{path}: no data rows")
    patterns: list[list[float]] = []
    labels: list[float] = []
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != d + 1:
            raise RowArity(f"{path}: row {i} has {len(row)} cells, expected {d + 1}")
        parsed: list[float] = []
        for j, cell in enumerate(row, start=1):
            try:
                value = float(cell)
            except ValueError:
                raise NonFiniteCell(
                    f"{path}: row {i}, column {j}: {cell!r} is not a finite decimal"
                ) from None
            if not math.isfinite(value):
                raise NonFiniteCell(
                    f"{path}: row {i}, column {j}: {cell!r} is not finite"
                )
            parsed.append(value)
        patterns.append(parsed[:-1])
        labels.append(parsed[-1])
    return Dataset(np.asarray(patterns), np.asarray(labels))


def instance_digest(q: DiscreteMeasure, data: Dataset) -> str:
    """SHA-256 over a canonical text rendering of grid, weights, and data."""
    h = hashlib.sha256()
    for pt, w in zip(q.support, q.weights):
        h.update((",".join(_fmt(c) for c in pt.coords) + ";" + _fmt(float(w)) + "\n").encode())
    for x, y in zip(data.patterns, data.labels):
        h.update((",".join(_fmt(float(v)) for v in x) + ";" + _fmt(float(y)) + "\n").encode())
    return h.hexdigest()


def grid_argmin_outside_support(
    cfg: ExperimentConfig, q: DiscreteMeasure, data: Dataset
) -> bool:
    """Whether the full-grid empirical risk minimizers all fall outside supp(Q).

    True on misspecified-reference instances: the solution support still
    collapses onto supp(Q) even though the data points elsewhere.
    """
    grid = grid_points(cfg)
    full = risk_profile(make_measure(grid, np.ones(len(grid))), data,
                        predictor_spec(cfg), loss_spec(cfg))
    argmin_atoms = {full.support[i] for i in erm_minimizers(full)}
    return argmin_atoms.isdisjoint(q.support_set())


def sweep_summary(
    cfg: ExperimentConfig,
    records: Sequence[SweepRecord],
    q: DiscreteMeasure,
    data: Dataset,
) -> dict[str, Any]:
    """Config echo, instance digest, and pass/fail flags per sweep invariant."""
    ok = [r for r in records if r.status == "ok"]
    k_bars = [r.k_bar_type2 for r in ok]
    flags = {
        "all_rows_ok": len(ok) == len(records),
        "identity_gap_le_1e-9": all(r.identity_gap <= 1e-9 for r in ok),
        "bound_margin_positive": all(r.bound_margin > 0.0 for r in ok),
        "theorem2_gap_le_1e-9": all(r.theorem2_gap <= 1e-9 for r in ok),
        "residual_le_1e-12": all(r.residual <= 1e-12 for r in ok),
        "k_bar_strictly_increasing": all(
            a < b for a, b in zip(k_bars, k_bars[1:])
        ),
    }
    return {
        "config": cfg.raw,
        "instance_digest": instance_digest(q, data),
        "rows": len(records),
        "rows_ok": len(ok),
        "grid_argmin_outside_support": grid_argmin_outside_support(cfg, q, data),
        "invariants": flags,
    }
