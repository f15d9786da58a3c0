"""Closed-form maximum-fidelity strategy for the mirror ensemble.

The whole classification runs on three coefficients of cos(theta_k) in the
planar fidelity:

    A = p cos(2t) + 1/2 - p
    B = p sin^2(2t)            (B >= 0, B + C = 1/2)
    C = p cos^2(2t) + 1/2 - p  (C >= 0)

The optimum is always one of the two mirror-symmetric two-element POMs:
the "LeftRight" pair at theta_k = +-pi/2 with fidelity 1/2 + sqrt(A^2 + B^2),
or the "UpDown" projector pair at theta_k = {0, pi} with fidelity
1/2 + max(|A|, |C|).  The sign of A^2 + B^2 - C^2 decides which; when it
vanishes every planar POM attains the same fidelity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .fidelity import (
    RetransmitMap,
    best_fidelity_for_pom,
    eta,
    retransmission_half_pi,
)
from .qubit_core import (
    CROSS_TOL,
    MINUS,
    PLUS,
    MirrorEnsemble,
    Pom,
    PomElement,
    antiweighted_sum,
)


@dataclass(frozen=True)
class AbcCoefficients:
    """Coefficient reduction on which regime classification runs."""

    a_coef: float
    b_coef: float
    c_coef: float


class RegimeTag(str, Enum):
    UP_DOWN = "UpDown"
    LEFT_RIGHT = "LeftRight"
    DEGENERATE = "Degenerate"

    def __str__(self) -> str:  # CSV/JSON friendly
        return self.value


@dataclass(frozen=True)
class StrategyRegime:
    """Regime tag with the signed margin A^2 + B^2 - C^2 that produced it.

    ``ident_holds`` records whether the antiweighted projector sum equals the
    identity (the nontrivial branch of the degeneracy condition).
    """

    tag: RegimeTag
    margin: float
    ident_holds: bool
    ident_residual: float


@dataclass(frozen=True)
class StrategyReport:
    """Optimal POM, retransmission states, fidelity and regime label."""

    regime: StrategyRegime
    pom: Pom
    retrans: RetransmitMap
    fidelity: float
    eta: float | None


def abc_coefficients(e: MirrorEnsemble) -> AbcCoefficients:
    c2 = math.cos(2.0 * e.theta)
    return AbcCoefficients(
        a_coef=e.p * c2 + 0.5 - e.p,
        b_coef=e.p * math.sin(2.0 * e.theta) ** 2,
        c_coef=e.p * c2 * c2 + 0.5 - e.p,
    )


def coefficient_margin(c: AbcCoefficients) -> float:
    """Signed classifier A^2 + B^2 - C^2; negative means UpDown wins."""
    return c.a_coef**2 + c.b_coef**2 - c.c_coef**2


def regime_tag_from_margin(margin: float, tol: float = CROSS_TOL) -> RegimeTag:
    if margin < -tol:
        return RegimeTag.UP_DOWN
    if margin > tol:
        return RegimeTag.LEFT_RIGHT
    return RegimeTag.DEGENERATE


def fidelity_left_right(c: AbcCoefficients) -> float:
    """Best fidelity of the +-pi/2 two-element POM."""
    return 0.5 + math.hypot(c.a_coef, c.b_coef)


def fidelity_up_down(c: AbcCoefficients) -> float:
    """Best fidelity of the {0, pi} projector POM: 1/2 + max(|A|, |C|)."""
    return 0.5 + 0.5 * abs(c.a_coef + c.c_coef) + 0.5 * abs(c.a_coef - c.c_coef)


def max_fidelity(c: AbcCoefficients) -> float:
    """Maximum fidelity over all planar POMs (larger of the two branches)."""
    return max(fidelity_left_right(c), fidelity_up_down(c))


def classify_regime(e: MirrorEnsemble, tol: float = CROSS_TOL) -> StrategyRegime:
    """Classify by the coefficient margin and check the degeneracy identity."""
    margin = coefficient_margin(abc_coefficients(e))
    residual = float(
        np.abs(antiweighted_sum(e).entries - np.eye(2)).max()
    )
    return StrategyRegime(
        tag=regime_tag_from_margin(margin, tol),
        margin=margin,
        ident_holds=residual <= CROSS_TOL,
        ident_residual=residual,
    )


def up_down_pom() -> Pom:
    """The projector POM {|+><+|, |-><-|}."""
    return Pom((PomElement(0.5, 0.0), PomElement(0.5, math.pi)))


def left_right_pom() -> Pom:
    """The +-pi/2 POM, each element half the projector onto |+> +- |->."""
    return Pom((PomElement(0.5, 0.5 * math.pi), PomElement(0.5, -0.5 * math.pi)))


def _eta_or_none(e: MirrorEnsemble) -> float | None:
    # the product, not the factors: subnormal p can underflow the denominator
    if 2.0 * e.p * math.sin(2.0 * e.theta) ** 2 == 0.0:
        return None
    return eta(e)


def build_optimal_strategy(e: MirrorEnsemble) -> StrategyReport:
    """Complete maximum-fidelity solution for the ensemble.

    UpDown: measure {|+><+|, |-><-|} and retransmit the projector directions.
    LeftRight: measure the +-pi/2 pair and retransmit the eta-shifted states.
    Degenerate: any planar POM is optimal; the +-pi/2 construction is
    returned as the canonical representative, with eigenvector
    retransmissions (which remain well defined at p = 0 and theta = 0).
    """
    coeffs = abc_coefficients(e)
    regime = classify_regime(e)
    eta_val = _eta_or_none(e)

    if regime.tag is RegimeTag.UP_DOWN:
        pom = up_down_pom()
        retrans = RetransmitMap((PLUS, MINUS))
        fid = fidelity_up_down(coeffs)
    elif regime.tag is RegimeTag.LEFT_RIGHT and eta_val is not None:
        pom = left_right_pom()
        retrans = RetransmitMap(
            (retransmission_half_pi(e, 1), retransmission_half_pi(e, -1))
        )
        fid = fidelity_left_right(coeffs)
    else:
        # Degenerate, or a LeftRight call with eta undefined (only possible
        # within tolerance of the boundary): eigenvector route.
        pom = left_right_pom()
        _, retrans = best_fidelity_for_pom(e, pom)
        fid = max_fidelity(coeffs)

    return StrategyReport(
        regime=regime, pom=pom, retrans=retrans, fidelity=fid, eta=eta_val
    )


def boundary_p_closed_form(theta: float) -> float:
    """Regime-boundary prior -cos(2t)/(1 - cos(2t)) for theta in [pi/4, pi/2]."""
    c2 = math.cos(2.0 * theta)
    if c2 >= 1.0:
        raise ValueError("boundary prior is undefined at theta = 0")
    return -c2 / (1.0 - c2)


def _branch_gap(p: float, theta: float) -> float:
    c = abc_coefficients(MirrorEnsemble(p, theta))
    return fidelity_left_right(c) - fidelity_up_down(c)


def fidelity_boundary_p(theta: float, tol: float = 1e-10) -> float:
    """Prior at which the two two-element strategies tie, by bisection in p.

    Defined for theta in [pi/4, pi/2]; the gap is negative below the boundary
    (UpDown regime) and positive above it.
    """
    if not math.pi / 4 - 1e-12 <= theta <= math.pi / 2 + 1e-12:
        raise ValueError("the fidelity boundary exists only for theta in [pi/4, pi/2]")
    lo, hi = 1e-15, 0.5
    glo, ghi = _branch_gap(lo, theta), _branch_gap(hi, theta)
    if glo >= 0.0:
        return 0.0  # theta at (or within roundoff of) pi/4
    if ghi <= 0.0:
        return 0.5  # theta at (or within roundoff of) pi/2
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _branch_gap(mid, theta) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def fidelity_boundary_theta(p: float, tol: float = 1e-10) -> float:
    """Angle at which the two two-element strategies tie, by bisection in theta."""
    if not 0.0 <= p <= 0.5:
        raise ValueError(f"p must lie in [0, 1/2], got p={p!r}")
    if p == 0.0:
        return math.pi / 4
    lo, hi = math.pi / 4, math.pi / 2
    glo, ghi = _branch_gap(p, lo), _branch_gap(p, hi)
    if ghi >= 0.0:
        return math.pi / 2  # p at (or within roundoff of) 1/2
    if glo <= 0.0:
        return math.pi / 4
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _branch_gap(p, mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
