"""Minimum-error discrimination of the mirror ensemble, and its comparison
with the fidelity-optimal strategy.

The minimum-error measurement takes one of two forms.  Above the threshold
prior 1 / (2 + cos t (cos t + sin t)) it is the two-element +-pi/2 pair; below
it, a three-element POM whose mirror pair is steered by

    a = p cos t sin t / (1 - p (2 + cos^2 t)),

with the remainder (1 - a^2)|+><+| assigned to the axis state.  At the
threshold a = 1 and the third element vanishes, so the two constructions
coincide.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .fidelity import best_fidelity_for_pom
from .qubit_core import (
    MirrorEnsemble,
    Pom,
    PomElement,
    outcome_probability,
)
from .strategy import (
    RegimeTag,
    abc_coefficients,
    classify_regime,
    left_right_pom,
    max_fidelity,
)

# Elements whose weight falls below this are identically zero and are dropped,
# keeping the rank-1 invariant of stored elements meaningful.
_DROP_TOL = 1e-12


class MinErrorRegime(str, Enum):
    TWO_ELEMENT = "TwoElement"
    THREE_ELEMENT = "ThreeElement"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class MinErrorReport:
    """Minimum-error measurement: regime, steering parameter, POM, error."""

    regime: MinErrorRegime
    a_param: float
    pom: Pom
    p_error: float


def two_element_threshold(theta: float) -> float:
    """Prior above which the two-element strategy is the minimum-error one."""
    c = math.cos(theta)
    return 1.0 / (2.0 + c * (c + math.sin(theta)))


def two_element_pom() -> Pom:
    """Outcome 1 guesses the +pi/2 mirror state, outcome 2 its reflection."""
    return left_right_pom()


def three_element_pom(a: float) -> Pom:
    """Three-element minimum-error POM for steering parameter a in [0, 1].

    Outcomes 1 and 2 are the mirror pair (1/2)(a|+> +- |->)(a<+| +- <-|);
    outcome 3 is (1 - a^2)|+><+|, dropped when its weight vanishes.
    """
    if not -1e-12 <= a <= 1.0 + 1e-12:
        raise ValueError(f"steering parameter must lie in [0, 1], got a={a!r}")
    a = min(1.0, max(0.0, a))
    pair_weight = 0.25 * (1.0 + a * a)
    # (1/2)(a|+> +- |->)(a<+| +- <-|) in weight/angle form: the direction has
    # cos theta_k proportional to a^2 - 1 and sin theta_k proportional to 2a.
    theta_k = math.atan2(2.0 * a, a * a - 1.0)
    elements = [PomElement(pair_weight, theta_k), PomElement(pair_weight, -theta_k)]
    axis_weight = 0.5 * max(0.0, 1.0 - a * a)
    if axis_weight > _DROP_TOL:
        elements.append(PomElement(axis_weight, 0.0))
    return Pom(tuple(elements))


def steering_parameter(e: MirrorEnsemble) -> float:
    """a = p cos t sin t / (1 - p (2 + cos^2 t)), clipped to [0, 1]."""
    c, s = math.cos(e.theta), math.sin(e.theta)
    denom = 1.0 - e.p * (2.0 + c * c)
    if denom <= 0.0:
        return 1.0
    return min(1.0, max(0.0, e.p * c * s / denom))


def error_probability(e: MirrorEnsemble, pom: Pom) -> float:
    """1 - sum_j p_j <psi_j|Pi_j|psi_j> with outcome k guessing state k."""
    correct = 0.0
    for (state, prior), element in zip(e.signals(), pom):
        correct += prior * outcome_probability(state, element)
    return min(1.0, max(0.0, 1.0 - correct))


def best_assignment_error_probability(e: MirrorEnsemble, pom: Pom) -> float:
    """Error probability with the best guess assigned to each outcome.

    Baseline for optimality spot checks against arbitrary POMs, where no
    outcome labeling is given.
    """
    signals = e.signals()
    correct = 0.0
    for element in pom:
        correct += max(
            prior * outcome_probability(state, element) for state, prior in signals
        )
    return min(1.0, max(0.0, 1.0 - correct))


def min_error_strategy(e: MirrorEnsemble) -> MinErrorReport:
    """Minimum-error measurement for the ensemble, with its error probability."""
    if e.p >= two_element_threshold(e.theta):
        pom = two_element_pom()
        regime, a = MinErrorRegime.TWO_ELEMENT, 1.0
    else:
        a = steering_parameter(e)
        pom = three_element_pom(a)
        regime = MinErrorRegime.THREE_ELEMENT
    return MinErrorReport(
        regime=regime, a_param=a, pom=pom, p_error=error_probability(e, pom)
    )


@dataclass(frozen=True)
class RegimeComparison:
    """Does the minimum-error POM also maximize the retransmission fidelity?"""

    fidelity_regime: RegimeTag
    minerror_regime: MinErrorRegime
    minerror_pom_maximizes_fidelity: bool
    max_fidelity: float
    minerror_pom_fidelity: float


def regime_comparison(e: MirrorEnsemble, atol: float = 1e-9) -> RegimeComparison:
    """Evaluate the min-error POM with its best retransmissions against the optimum."""
    report = min_error_strategy(e)
    f_max = max_fidelity(abc_coefficients(e))
    f_me, _ = best_fidelity_for_pom(e, report.pom)
    return RegimeComparison(
        fidelity_regime=classify_regime(e).tag,
        minerror_regime=report.regime,
        minerror_pom_maximizes_fidelity=bool(f_me >= f_max - atol),
        max_fidelity=float(f_max),
        minerror_pom_fidelity=float(f_me),
    )
