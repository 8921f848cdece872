"""Finite discrete probability measures on a d-dimensional model space.

A :class:`DiscreteMeasure` is the package's common currency: it represents the
reference measure, every solution measure, and any candidate measure entering
an objective. Continuous references are expected to arrive here already
reduced to a particle cloud (i.i.d. draws with uniform weights), so every
integral in the package is a finite sum.

All types are immutable after construction and all operations are pure, so
they are safe to share across threads. The sampler takes its seed explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import (
    DuplicateSupportPoint,
    EmptySupport,
    NegativeWeight,
    NonFiniteValue,
    NonFiniteWeight,
)

#: Allowed deviation of a constructed measure's total mass from 1.
WEIGHT_TOL = 1e-12


@dataclass(frozen=True)
class ModelPoint:
    """A candidate model: a point in R^d, compared and hashed exactly.

    Coordinate equality is exact; callers that need tolerance-based
    deduplication must quantize before construction, otherwise distinct
    near-identical atoms are kept apart on purpose.
    """

    coords: tuple[float, ...]

    def __post_init__(self) -> None:
        coords = tuple(float(c) for c in self.coords)
        if len(coords) < 1:
            raise ValueError("a model point needs at least one coordinate")
        if not all(math.isfinite(c) for c in coords):
            raise NonFiniteValue(f"non-finite coordinate in model point {coords}")
        object.__setattr__(self, "coords", coords)

    @property
    def dim(self) -> int:
        return len(self.coords)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float)


def point(*coords: float) -> ModelPoint:
    """Convenience constructor: ``point(0.0, 1.0)`` instead of ``ModelPoint((0.0, 1.0))``."""
    return ModelPoint(tuple(coords))


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """A probability measure on a finite set of model points.

    Invariants (enforced by :func:`make_measure`):

    * weights are strictly positive and sum to 1 within ``WEIGHT_TOL``,
    * support points are pairwise distinct,
    * atoms given zero weight at construction have been dropped, so the
      support is exactly the set of atoms carrying mass.
    """

    support: tuple[ModelPoint, ...]
    weights: np.ndarray

    @cached_property
    def _weight_by_point(self) -> dict[ModelPoint, float]:
        return {pt: float(w) for pt, w in zip(self.support, self.weights)}

    @property
    def num_atoms(self) -> int:
        return len(self.support)

    @property
    def dim(self) -> int:
        return self.support[0].dim

    def weight_of(self, pt: ModelPoint) -> float:
        """Mass of ``pt``; 0.0 for points outside the support."""
        return self._weight_by_point.get(pt, 0.0)

    def support_set(self) -> frozenset[ModelPoint]:
        return frozenset(self.support)


@dataclass(frozen=True)
class AbsoluteContinuityRelation:
    """Support containment in both directions for a pair of discrete measures."""

    p_ll_q: bool
    q_ll_p: bool

    @property
    def mutually(self) -> bool:
        return self.p_ll_q and self.q_ll_p


def make_measure(
    support: Sequence[ModelPoint], weights: Sequence[float]
) -> DiscreteMeasure:
    """Build a probability measure, dropping zero-weight atoms and renormalizing.

    Parameters
    ----------
    support : sequence of ModelPoint
        Candidate atoms, in the order the measure will keep.
    weights : sequence of float
        Nonnegative masses, one per atom; need not sum to 1.

    Raises
    ------
    EmptySupport
        Input lists are empty or every weight is zero.
    NegativeWeight, NonFiniteWeight
        A weight violates its contract.
    DuplicateSupportPoint
        Two retained atoms share coordinates.
    """
    support = tuple(support)
    w = np.asarray(weights, dtype=float)
    if len(support) == 0 or w.size == 0:
        raise EmptySupport("support and weights must be nonempty")
    if w.shape != (len(support),):
        raise ValueError(
            f"support has {len(support)} atoms but {w.size} weights were given"
        )
    if np.any(~np.isfinite(w)):
        raise NonFiniteWeight("weights must be finite")
    if np.any(w < 0.0):
        raise NegativeWeight("weights must be nonnegative")

    keep = w > 0.0
    if not np.any(keep):
        raise EmptySupport("at least one weight must be strictly positive")
    kept_support = tuple(pt for pt, k in zip(support, keep) if k)
    kept = w[keep]

    if len(set(kept_support)) != len(kept_support):
        raise DuplicateSupportPoint("support points with positive mass must be distinct")

    total = math.fsum(kept)
    normalized = kept / total
    normalized.flags.writeable = False
    return DiscreteMeasure(kept_support, normalized)


def check_abs_continuity(
    p: DiscreteMeasure, q: DiscreteMeasure
) -> AbsoluteContinuityRelation:
    """Exact support-containment test: P << Q iff supp(P) is a subset of supp(Q)."""
    sp, sq = p.support_set(), q.support_set()
    return AbsoluteContinuityRelation(p_ll_q=sp <= sq, q_ll_p=sq <= sp)


def kl_divergence(p: DiscreteMeasure, q: DiscreteMeasure) -> float:
    """Relative entropy sum over supp(P) of p(x)*log(p(x)/q(x)), natural log.

    Returns ``+inf`` when P is not absolutely continuous with respect to Q;
    that is an in-band value, not an error, because objective comparisons in
    the infeasible direction need it.
    """
    lookup = q._weight_by_point
    terms: list[float] = []
    for pt, pw in zip(p.support, p.weights):
        qw = lookup.get(pt)
        if qw is None:
            return math.inf
        terms.append(float(pw) * math.log(pw / qw))
    total = math.fsum(terms)
    # Gibbs' inequality guarantees >= 0; roundoff on nearly identical inputs
    # can leave a residual of order 1e-16, which is clamped away.
    return total if total > 0.0 else 0.0


def sample(m: DiscreteMeasure, count: int, seed: int) -> list[ModelPoint]:
    """Draw ``count`` i.i.d. atoms by inverse CDF over the ordered support.

    Deterministic for a fixed ``(m, count, seed)`` triple.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(seed)
    u = rng.random(count)
    cum = np.cumsum(m.weights)
    idx = np.minimum(np.searchsorted(cum, u, side="right"), m.num_atoms - 1)
    return [m.support[i] for i in idx]


def expectation(m: DiscreteMeasure, f: Callable[[ModelPoint], float]) -> float:
    """Mean of ``f`` under ``m``, accumulated with exact (fsum) summation."""
    terms: list[float] = []
    for pt, w in zip(m.support, m.weights):
        v = float(f(pt))
        if not math.isfinite(v):
            raise NonFiniteValue(f"f produced {v!r} at support atom {pt.coords}")
        terms.append(float(w) * v)
    return math.fsum(terms)


def total_variation(p: DiscreteMeasure, q: DiscreteMeasure) -> float:
    """Total variation distance, used by the optimality fuzz harnesses."""
    atoms = p.support_set() | q.support_set()
    return 0.5 * math.fsum(abs(p.weight_of(a) - q.weight_of(a)) for a in atoms)
