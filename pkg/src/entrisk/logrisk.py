"""The log-risk transform linking the two regularization directions.

Replacing the empirical risk L by

    V(theta) = log(k_bar + L(theta)),

where k_bar is the solved normalizer of the reversed problem at factor
``lam``, turns the reversed problem into a plain Gibbs problem: the tilt of Q
by exp(-V) with unit regularization factor reproduces the reversed-direction
solution measure atom by atom. The tilt's partition function is known in
closed form, because the Q-mean of lam * exp(-V) is exactly the normalization
constraint that defined k_bar: it equals 1, so the tilt normalizer is 1/lam.

``verify_theorem2`` runs both code paths, the implicit-normalization root
solve and the Gibbs tilt on the transformed risk, and reports their maximum
atom-wise weight gap. The two paths share no arithmetic beyond the risk
profile, which makes this the strongest internal consistency check in the
package.

Note that V may be negative (unlike raw risks); downstream consumers accept
that, and the tilt used here deliberately does not assume nonnegativity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import InvariantViolation, NonPositiveArgument, SupportMismatch
from .measures import DiscreteMeasure, ModelPoint
from .risk import EmpiricalRiskProfile
from .type1 import _tilt
from .type2 import TypeIISolution, solve_type2

#: Tolerance on |log(lam * sum q * exp(-V))|, the hidden normalization identity.
NORMALIZATION_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class LogRiskProfile:
    """log(k_bar + L) per atom, with the lambda and k_bar that produced it."""

    support: tuple[ModelPoint, ...]
    values: np.ndarray
    source_lam: float
    source_k_bar: float

    @cached_property
    def _value_by_point(self) -> dict[ModelPoint, float]:
        return {pt: float(v) for pt, v in zip(self.support, self.values)}

    def value_of(self, pt: ModelPoint) -> float:
        try:
            return self._value_by_point[pt]
        except KeyError:
            raise SupportMismatch(f"no log-risk entry for atom {pt.coords}") from None


def log_risk_profile(
    profile: EmpiricalRiskProfile, sol: TypeIISolution
) -> LogRiskProfile:
    """Evaluate V = log(k_bar + L) on the solution's support.

    The arguments are positive for every valid solution (k_bar stays strictly
    above -delta_star); a nonpositive argument means the solution object was
    corrupted upstream and is rejected.

    Numerically, k_bar + L is evaluated as pole_gap + (L - delta_star), the
    same rearrangement the solver uses for its weights; the two forms agree
    exactly in real arithmetic, and the rearranged one stays fully accurate
    when the normalizer sits close to the pole.
    """
    risks = profile.aligned(sol.measure.support)
    delta_star = float(risks.min())
    if sol.k_bar + delta_star <= 0.0 or sol.pole_gap <= 0.0:
        raise NonPositiveArgument(
            f"k_bar + L = {sol.k_bar + delta_star} is not positive; "
            "solution is inconsistent"
        )
    args = sol.pole_gap + (risks - delta_star)
    values = np.log(args)
    values.flags.writeable = False
    return LogRiskProfile(
        support=sol.measure.support,
        values=values,
        source_lam=sol.lam,
        source_k_bar=sol.k_bar,
    )


def expected_log_risk(p: DiscreteMeasure, vprofile: LogRiskProfile) -> float:
    """Mean of V under p, matched by atom identity; may be negative."""
    return math.fsum(
        float(w) * vprofile.value_of(pt) for pt, w in zip(p.support, p.weights)
    )


def verify_theorem2(
    q: DiscreteMeasure, profile: EmpiricalRiskProfile, lam: float
) -> tuple[DiscreteMeasure, DiscreteMeasure, float]:
    """Solve both directions and return (reversed, tilt-on-V, max weight gap).

    The reversed-direction problem is solved by the root finder; the
    transformed problem is solved by the Gibbs tilt of Q by exp(-V) with unit
    regularization factor. Before comparing, the hidden normalization
    identity lam * sum q*exp(-V) = 1 (the defining constraint of k_bar,
    restated through the transform) is asserted to NORMALIZATION_TOL.
    """
    sol = solve_type2(q, profile, lam)
    vprofile = log_risk_profile(profile, sol)
    values = np.asarray(
        [vprofile.value_of(pt) for pt in q.support], dtype=float
    )
    total = lam * math.fsum(np.asarray(q.weights, dtype=float) * np.exp(-values))
    if not total > 0.0 or abs(math.log(total)) > NORMALIZATION_TOL:
        raise InvariantViolation(
            f"lam * sum q*exp(-V) = {total} deviates from 1 beyond {NORMALIZATION_TOL}"
        )
    tilted, _ = _tilt(q, values, 1.0)

    by_point = {pt: float(w) for pt, w in zip(tilted.support, tilted.weights)}
    gap = max(
        abs(float(w) - by_point.get(pt, 0.0))
        for pt, w in zip(sol.measure.support, sol.measure.weights)
    )
    return sol.measure, tilted, gap
