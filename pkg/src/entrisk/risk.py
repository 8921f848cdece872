"""Datasets, predictors, losses, and empirical risk over a measure's support.

The empirical risk of a model is its average loss over the training set. A
risk profile evaluates that map once per atom of a measure's support and keeps
the minimum level ``delta_star`` (the lowest risk carrying positive mass,
which for a finite support is a plain minimum) together with the set of atoms
attaining it.

Profiles match risks to atoms by exact support-point identity, never by
index, so one profile can be reused by any measure whose support is contained
in the profile's.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatch, NonFiniteValue, SupportMismatch
from .measures import DiscreteMeasure, ModelPoint

PREDICTOR_KINDS = ("linear_regression", "linear_threshold_classifier")
LOSS_KINDS = ("squared", "absolute", "zero_one")


@dataclass(frozen=True, eq=False)
class Dataset:
    """Ordered labeled patterns ``(x_i, y_i)``, i = 1..n."""

    patterns: np.ndarray
    labels: np.ndarray

    def __post_init__(self) -> None:
        patterns = np.atleast_2d(np.asarray(self.patterns, dtype=float))
        labels = np.asarray(self.labels, dtype=float).ravel()
        if patterns.shape[0] != labels.shape[0]:
            raise DimensionMismatch(
                f"{patterns.shape[0]} patterns but {labels.shape[0]} labels"
            )
        if labels.size < 1:
            raise ValueError("a dataset needs at least one point")
        if not (np.all(np.isfinite(patterns)) and np.all(np.isfinite(labels))):
            raise NonFiniteValue("dataset entries must be finite")
        patterns.flags.writeable = False
        labels.flags.writeable = False
        object.__setattr__(self, "patterns", patterns)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_points(
        cls, points: Iterable[tuple[Sequence[float], float]]
    ) -> "Dataset":
        pts = list(points)
        return cls(
            np.asarray([p for p, _ in pts], dtype=float),
            np.asarray([y for _, y in pts], dtype=float),
        )

    @property
    def n(self) -> int:
        return int(self.labels.shape[0])

    @property
    def pattern_dim(self) -> int:
        return int(self.patterns.shape[1])

    def points(self) -> list[tuple[tuple[float, ...], float]]:
        return [
            (tuple(float(v) for v in x), float(y))
            for x, y in zip(self.patterns, self.labels)
        ]


@dataclass(frozen=True)
class PredictorSpec:
    """Prediction rule f(theta, x) mapping a model and a pattern to a label.

    ``linear_regression`` predicts the linear score itself;
    ``linear_threshold_classifier`` predicts the sign of the score, mapped to
    {-1.0, +1.0} with ties (score exactly 0) resolved to +1.0 so that results
    are reproducible. With ``intercept`` the model's last coordinate is an
    additive bias and the model dimension is ``pattern_dim + 1``.
    """

    kind: str
    pattern_dim: int
    intercept: bool = False

    def __post_init__(self) -> None:
        if self.kind not in PREDICTOR_KINDS:
            raise ValueError(f"unknown predictor kind {self.kind!r}")
        if self.pattern_dim < 1:
            raise ValueError("pattern_dim must be >= 1")

    @property
    def model_dim(self) -> int:
        return self.pattern_dim + (1 if self.intercept else 0)

    def scores(self, model: ModelPoint, patterns: np.ndarray) -> np.ndarray:
        theta = model.as_array()
        if theta.shape[0] != self.model_dim:
            raise DimensionMismatch(
                f"model has dimension {theta.shape[0]}, predictor needs {self.model_dim}"
            )
        if patterns.shape[1] != self.pattern_dim:
            raise DimensionMismatch(
                f"patterns have dimension {patterns.shape[1]}, "
                f"predictor needs {self.pattern_dim}"
            )
        if self.intercept:
            return patterns @ theta[:-1] + theta[-1]
        return patterns @ theta

    def predict_all(self, model: ModelPoint, patterns: np.ndarray) -> np.ndarray:
        s = self.scores(model, patterns)
        if self.kind == "linear_regression":
            return s
        return np.where(s >= 0.0, 1.0, -1.0)

    def predict(self, model: ModelPoint, pattern: Sequence[float]) -> float:
        x = np.atleast_2d(np.asarray(pattern, dtype=float))
        return float(self.predict_all(model, x)[0])


@dataclass(frozen=True)
class LossSpec:
    """Pointwise loss l(y_hat, y): nonnegative with l(y, y) = 0 for every y."""

    kind: str

    def __post_init__(self) -> None:
        if self.kind not in LOSS_KINDS:
            raise ValueError(f"unknown loss kind {self.kind!r}")

    def loss_all(self, predicted: np.ndarray, labels: np.ndarray) -> np.ndarray:
        if self.kind == "squared":
            d = predicted - labels
            return d * d
        if self.kind == "absolute":
            return np.abs(predicted - labels)
        return np.where(predicted == labels, 0.0, 1.0)

    def loss(self, predicted: float, label: float) -> float:
        return float(
            self.loss_all(np.asarray([predicted]), np.asarray([label]))[0]
        )


@dataclass(frozen=True, eq=False)
class EmpiricalRiskProfile:
    """Empirical risk per support atom, plus the minimum level and its atoms.

    ``delta_star`` is the exact minimum of the risks over the (finite)
    support; for a discrete measure with all-positive weights this equals the
    smallest risk level whose sublevel set carries positive mass.
    ``argmin_set`` holds the indices attaining it exactly.
    """

    support: tuple[ModelPoint, ...]
    risks: np.ndarray
    delta_star: float
    argmin_set: frozenset[int]

    @classmethod
    def from_risks(
        cls, support: Sequence[ModelPoint], risks: Sequence[float]
    ) -> "EmpiricalRiskProfile":
        support = tuple(support)
        arr = np.asarray(risks, dtype=float)
        if arr.shape != (len(support),):
            raise ValueError("one risk per support atom required")
        if len(set(support)) != len(support):
            raise ValueError("profile support points must be distinct")
        if arr.size == 0:
            raise ValueError("profile needs at least one atom")
        if not np.all(np.isfinite(arr)):
            raise NonFiniteValue("risks must be finite")
        if np.any(arr < 0.0):
            raise ValueError("risks must be nonnegative")
        delta_star = float(arr.min())
        argmin = frozenset(int(i) for i in np.flatnonzero(arr == delta_star))
        arr.flags.writeable = False
        return cls(support, arr, delta_star, argmin)

    @cached_property
    def _risk_by_point(self) -> dict[ModelPoint, float]:
        return {pt: float(r) for pt, r in zip(self.support, self.risks)}

    def risk_of(self, pt: ModelPoint) -> float:
        try:
            return self._risk_by_point[pt]
        except KeyError:
            raise SupportMismatch(
                f"no risk entry for atom {pt.coords}"
            ) from None

    def aligned(self, support: Sequence[ModelPoint]) -> np.ndarray:
        """Risks in the order of the given support; raises SupportMismatch on gaps."""
        return np.asarray([self.risk_of(pt) for pt in support], dtype=float)


def empirical_risk(
    model: ModelPoint, data: Dataset, pred: PredictorSpec, loss: LossSpec
) -> float:
    """Average loss of ``model`` over the dataset: (1/n) * sum of pointwise losses.

    The sum runs over the fixed dataset order with exact accumulation, so the
    result does not depend on evaluation scheduling.
    """
    losses = loss.loss_all(pred.predict_all(model, data.patterns), data.labels)
    return math.fsum(losses) / data.n


def risk_profile(
    q: DiscreteMeasure, data: Dataset, pred: PredictorSpec, loss: LossSpec
) -> EmpiricalRiskProfile:
    """Evaluate the empirical risk on every atom of ``q``'s support."""
    risks = [empirical_risk(pt, data, pred, loss) for pt in q.support]
    return EmpiricalRiskProfile.from_risks(q.support, risks)


def level_set(profile: EmpiricalRiskProfile, delta: float) -> frozenset[int]:
    """Indices of atoms with risk <= delta (closed threshold)."""
    return frozenset(int(i) for i in np.flatnonzero(profile.risks <= delta))


def expected_risk(p: DiscreteMeasure, profile: EmpiricalRiskProfile) -> float:
    """Mean empirical risk under ``p``, matching atoms by identity."""
    return math.fsum(
        float(w) * profile.risk_of(pt) for pt, w in zip(p.support, p.weights)
    )


def erm_minimizers(profile: EmpiricalRiskProfile) -> frozenset[int]:
    """Indices of the grid minimizers of the empirical risk (nonempty by finiteness)."""
    return profile.argmin_set
