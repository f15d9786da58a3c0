"""Measure-and-retransmit fidelity machinery.

For each measurement outcome k there is a positive operator

    O_k = sum_j p_j <psi_j|Pi_k|psi_j> |psi_j><psi_j|

whose largest eigenvalue is the best fidelity contribution of that outcome,
attained by retransmitting the corresponding eigenvector.  The generic sum
above is the authoritative implementation; the planar closed forms for the
mirror ensemble act as validators and fast paths.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence, Union

import numpy as np

from .qubit_core import (
    CROSS_TOL,
    REPR_TOL,
    HermitianOp2,
    MirrorEnsemble,
    MINUS,
    PLUS,
    Pom,
    PomElement,
    QubitState,
    outcome_probability,
    require_valid_pom,
)

# Either a mirror ensemble or an explicit list of (pure state, prior) pairs;
# the generic path accepts any finite planar or non-planar signal set.
Signals = Union[MirrorEnsemble, Sequence[tuple[QubitState, float]]]


class NoPreferredStateError(ValueError):
    """The outcome operator is (numerically) zero: no retransmission is preferred."""


class PlanarConstraintError(ValueError):
    """Mirror-pair weights violate the completeness constraints."""

    def __init__(self, message: str, weight_residual: float, balance_residual: float):
        super().__init__(
            f"{message} (sum-of-weights residual {weight_residual:.3e}, "
            f"cosine-balance residual {balance_residual:.3e})"
        )
        self.weight_residual = weight_residual
        self.balance_residual = balance_residual


@dataclass(frozen=True)
class RetransmitMap:
    """One retransmission state per POM element, by index."""

    states: tuple[QubitState, ...]

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self) -> Iterator[QubitState]:
        return iter(self.states)

    def __getitem__(self, index: int) -> QubitState:
        return self.states[index]

    def to_dicts(self) -> list[dict]:
        return [s.to_dict() for s in self.states]

    @classmethod
    def from_dicts(cls, data) -> "RetransmitMap":
        return cls(tuple(QubitState.from_dict(d) for d in data))


@dataclass(frozen=True)
class EigenPair2:
    """Eigendecomposition of a 2x2 Hermitian matrix, nu_plus >= nu_minus.

    A spectrum with gap below 1e-12 * |trace| is flagged degenerate and
    returns the computational basis pair (any orthonormal pair attains the
    same fidelity; a fixed choice keeps results deterministic).
    """

    nu_plus: float
    nu_minus: float
    vec_plus: QubitState
    vec_minus: QubitState
    degenerate: bool = False


def _signal_list(signals: Signals) -> list[tuple[QubitState, float]]:
    if isinstance(signals, MirrorEnsemble):
        return list(signals.signals())
    pairs = [(state, float(prior)) for state, prior in signals]
    total = math.fsum(prior for _, prior in pairs)
    if abs(total - 1.0) > CROSS_TOL:
        raise ValueError(f"signal priors must sum to 1, got {total!r}")
    return pairs


def _kahan_sum(values: Sequence[float]) -> float:
    """Compensated sum in descending magnitude order."""
    total = 0.0
    comp = 0.0
    for v in sorted(values, key=abs, reverse=True):
        y = v - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total


def o_operator(signals: Signals, element: PomElement) -> HermitianOp2:
    """Outcome operator sum_j p_j <psi_j|Pi_k|psi_j> |psi_j><psi_j| (PSD).

    Uses the raw quadratic form (not the clipped outcome probability) so the
    sum stays linear in the element even for standalone over-weighted
    elements that could not belong to a complete POM.
    """
    acc = np.zeros((2, 2), dtype=complex)
    for state, prior in _signal_list(signals):
        acc = acc + prior * element.matrix.expectation(state) * state.projector().entries
    return HermitianOp2(acc)


def o_operator_closed_form(e: MirrorEnsemble, element: PomElement) -> HermitianOp2:
    """Planar closed form of the outcome operator for the mirror ensemble.

    Cross-check for :func:`o_operator`; the two must agree entrywise to 1e-12.
    """
    p, theta = e.p, e.theta
    w, tk, fk = element.w, element.theta_k, element.phi_k
    c2, ck = math.cos(2 * theta), math.cos(tk)
    common = 1.0 + c2 * ck
    upper = w * (2 * p * math.cos(theta) ** 2 * common + (1 - 2 * p) * (1 + ck))
    lower = w * (2 * p * math.sin(theta) ** 2 * common)
    off = w * (p * math.sin(2 * theta) ** 2 * math.sin(tk) * math.cos(fk))
    return HermitianOp2(np.array([[upper, off], [off, lower]], dtype=complex))


def eigen_decompose(m: HermitianOp2) -> EigenPair2:
    """Closed-form 2x2 eigendecomposition with normalized eigenvectors.

    The off-diagonal case uses the eigenvector ratio closed form, arranged as
    (b, nu - a) / (nu - d, conj(b)) to avoid cancellation; for a real matrix
    this is the normalized (1, (nu - R)/S) ratio.  A diagonal matrix is
    handled before the ratio form (which would divide by the off-diagonal).
    """
    a = m.entries[0, 0].real
    d = m.entries[1, 1].real
    b = complex(m.entries[0, 1])
    nu_plus, nu_minus = m.eigenvalues()

    gap = nu_plus - nu_minus
    if gap <= REPR_TOL * abs(a + d):
        return EigenPair2(nu_plus, nu_minus, PLUS, MINUS, degenerate=True)

    scale = max(abs(a), abs(d), abs(b))
    if abs(b) <= REPR_TOL * scale:
        # Diagonal case (handled before the ratio form, which divides by b):
        # the diagonal entries are the exact eigenvalues.
        if a >= d:
            return EigenPair2(a, d, PLUS, MINUS)
        return EigenPair2(d, a, MINUS, PLUS)

    # Pick whichever eigenvector expression has the larger first/second gap.
    if nu_plus - a >= nu_plus - d:
        vec_plus = QubitState.from_amplitudes(b, nu_plus - a)
    else:
        vec_plus = QubitState.from_amplitudes(nu_plus - d, np.conjugate(b))
    vec_minus = QubitState.from_amplitudes(
        -np.conjugate(vec_plus.amp_minus), np.conjugate(vec_plus.amp_plus)
    )
    return EigenPair2(nu_plus, nu_minus, vec_plus, vec_minus)


def nu_plus_closed_form(e: MirrorEnsemble, element: PomElement) -> float:
    """Largest outcome-operator eigenvalue from the planar closed form.

    Must match eigen_decompose(o_operator(e, element)).nu_plus within 1e-10.
    """
    p, theta = e.p, e.theta
    w, tk, fk = element.w, element.theta_k, element.phi_k
    c2, ck, sk = math.cos(2 * theta), math.cos(tk), math.sin(tk)
    common = 1.0 + c2 * ck
    mean = p * common + (0.5 - p) * (1.0 + ck)
    bracket = p * c2 * common + (0.5 - p) * (1.0 + ck)
    cross = (p * math.sin(2 * theta) ** 2 * sk * math.cos(fk)) ** 2
    return w * (mean + math.sqrt(bracket * bracket + cross))


def eta(e: MirrorEnsemble) -> float:
    """Shift parameter for the +-pi/2 retransmission states.

    Positive when the average signal state leans toward |+>, negative toward
    |->.  Undefined when p = 0 or sin(2 theta) = 0 (the outcome operator is
    then diagonal and the ensemble degenerate).
    """
    denom = 2.0 * e.p * math.sin(2 * e.theta) ** 2
    if denom == 0.0:
        raise ValueError("eta is undefined for p = 0 or sin(2*theta) = 0")
    return (2.0 * e.p * math.cos(2 * e.theta) + 1.0 - 2.0 * e.p) / denom


def y_half_pi(e: MirrorEnsemble, sign: int = 1) -> float:
    """Amplitude ratio Y of the +-pi/2 retransmission state: +-(sqrt(eta^2+1) - eta).

    |Y| < 1 when eta > 0 and |Y| > 1 when eta < 0: the retransmission is
    shifted from |+> +- |-> toward the average state.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    h = eta(e)
    return sign * (math.sqrt(h * h + 1.0) - h)


def retransmission_half_pi(e: MirrorEnsemble, sign: int = 1) -> QubitState:
    """Closed-form optimal retransmission state for the +-pi/2 elements."""
    y = y_half_pi(e, sign)
    return QubitState.from_amplitudes(1.0, y)


def optimal_retransmission(signals: Signals, element: PomElement) -> QubitState:
    """Top eigenvector of the outcome operator for this element."""
    op = o_operator(signals, element)
    if float(np.abs(op.entries).max()) <= REPR_TOL:
        raise NoPreferredStateError(
            "outcome operator is zero (w = 0 or no overlapping signals); "
            "no retransmission state is preferred"
        )
    return eigen_decompose(op).vec_plus


def strategy_fidelity(signals: Signals, pom: Pom, retrans: RetransmitMap) -> float:
    """Fidelity of an explicit measure-and-retransmit strategy.

    F = sum_{j,k} p_j |<psi_j|phi_k>|^2 <psi_j|Pi_k|psi_j>, in [0, 1].
    """
    require_valid_pom(pom)
    if len(retrans) != len(pom):
        raise ValueError(
            f"retransmission map has {len(retrans)} states for {len(pom)} POM elements"
        )
    pairs = _signal_list(signals)
    terms = []
    for element, phi in zip(pom, retrans):
        for state, prior in pairs:
            terms.append(
                prior
                * state.overlap_probability(phi)
                * outcome_probability(state, element)
            )
    return min(1.0, max(0.0, _kahan_sum(terms)))


def best_fidelity_for_pom(signals: Signals, pom: Pom) -> tuple[float, RetransmitMap]:
    """Maximum fidelity of a POM over retransmission choices: sum of nu_plus.

    Returns the fidelity together with the eigenvector retransmission map
    that attains it.
    """
    require_valid_pom(pom)
    pairs = _signal_list(signals)
    nus = []
    states = []
    for element in pom:
        decomp = eigen_decompose(o_operator(pairs, element))
        nus.append(decomp.nu_plus)
        states.append(decomp.vec_plus)
    return min(1.0, max(0.0, _kahan_sum(nus))), RetransmitMap(tuple(states))


def q_factor(e: MirrorEnsemble, theta_k):
    """Per-unit-weight squared fidelity contribution of a planar mirror pair.

    Q(theta_k) = [p cos2t (1 + cos2t cos theta_k) + (1/2 - p)(1 + cos theta_k)]^2
                 + p^2 sin^4(2t) sin^2(theta_k)

    Accepts a scalar or an ndarray of angles.
    """
    c2 = math.cos(2 * e.theta)
    s2sq = math.sin(2 * e.theta) ** 2
    ck = np.cos(theta_k)
    sk = np.sin(theta_k)
    bracket = e.p * c2 * (1.0 + c2 * ck) + (0.5 - e.p) * (1.0 + ck)
    return bracket * bracket + (e.p * s2sq) ** 2 * sk * sk


def mirror_pair_pom(pairs: Sequence[tuple[float, float]]) -> Pom:
    """Expand combined-weight mirror pairs (w, theta_k) into a planar POM.

    Each pair becomes the two elements (w/2, +theta_k) and (w/2, -theta_k)
    with phi_k = 0; pairs with negligible weight are dropped.
    """
    elements = []
    for w, tk in pairs:
        if w <= REPR_TOL:
            continue
        elements.append(PomElement(0.5 * w, tk))
        elements.append(PomElement(0.5 * w, -tk))
    return Pom(tuple(elements))


def planar_fidelity(
    e: MirrorEnsemble,
    pairs: Sequence[tuple[float, float]],
    atol: float = CROSS_TOL,
) -> float:
    """Best fidelity of a planar mirror-paired POM: 1/2 + sum_k w_k sqrt(Q_k).

    ``pairs`` lists (combined pair weight, theta_k); the weights must satisfy
    sum(w) = 1 and sum(w cos theta_k) = 0 within ``atol``.  Equals
    best_fidelity_for_pom on the expanded element list to 1e-10.
    """
    weights = [float(w) for w, _ in pairs]
    angles = [float(tk) for _, tk in pairs]
    if any(w < -REPR_TOL for w in weights):
        raise PlanarConstraintError("negative pair weight", 0.0, 0.0)
    weight_residual = abs(math.fsum(weights) - 1.0)
    balance_residual = abs(
        math.fsum(w * math.cos(tk) for w, tk in zip(weights, angles))
    )
    if weight_residual > atol or balance_residual > atol:
        raise PlanarConstraintError(
            "mirror-pair weights violate completeness", weight_residual, balance_residual
        )
    terms = [
        w * math.sqrt(float(q_factor(e, tk))) for w, tk in zip(weights, angles)
    ]
    return 0.5 + _kahan_sum(terms)
