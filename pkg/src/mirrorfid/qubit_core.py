"""Qubit primitives: states, 2x2 Hermitian operators, mirror ensembles and POMs.

All types are immutable values; all operations are pure functions, so
everything here can be shared freely across threads.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

# Tolerance tiers. Representation-level residuals (constructors, matrix
# identities) sit at 1e-12, agreement between independent computation routes
# at 1e-10, and search/optimization agreement at 1e-6.
REPR_TOL = 1e-12
CROSS_TOL = 1e-10
SEARCH_TOL = 1e-6


class PomValidationError(ValueError):
    """An operation required a complete, positive POM and did not get one."""

    def __init__(self, message: str, report: "PomValidation | None" = None):
        super().__init__(message)
        self.report = report


def _as_2x2(entries) -> np.ndarray:
    m = np.array(entries, dtype=complex)
    if m.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
    return m


@dataclass(frozen=True, eq=False)
class HermitianOp2:
    """A 2x2 Hermitian operator on the qubit space.

    The stored matrix is symmetrized on construction, so the diagonal is
    exactly real.  Eigenvalues come from the closed 2x2 form (no iterative
    decomposition), which is exact at this dimension.
    """

    entries: np.ndarray

    def __post_init__(self):
        m = _as_2x2(self.entries)
        scale = max(1.0, float(np.abs(m).max()))
        if float(np.abs(m - m.conj().T).max()) > REPR_TOL * scale:
            raise ValueError("matrix is not Hermitian within tolerance")
        m = (m + m.conj().T) / 2.0
        m.flags.writeable = False
        object.__setattr__(self, "entries", m)

    @staticmethod
    def identity() -> "HermitianOp2":
        return HermitianOp2(np.eye(2))

    @staticmethod
    def zero() -> "HermitianOp2":
        return HermitianOp2(np.zeros((2, 2)))

    def trace(self) -> float:
        return float(self.entries[0, 0].real + self.entries[1, 1].real)

    def determinant(self) -> float:
        a = self.entries[0, 0].real
        d = self.entries[1, 1].real
        return float(a * d - abs(self.entries[0, 1]) ** 2)

    def eigenvalues(self) -> tuple[float, float]:
        """(lambda_plus, lambda_minus) with lambda_plus >= lambda_minus."""
        a = float(self.entries[0, 0].real)
        d = float(self.entries[1, 1].real)
        mean = 0.5 * (a + d)
        radius = math.hypot(0.5 * (a - d), abs(self.entries[0, 1]))
        return mean + radius, mean - radius

    def is_psd(self, tol: float = REPR_TOL) -> bool:
        return self.eigenvalues()[1] >= -tol

    def expectation(self, state: "QubitState") -> float:
        v = state.vector
        return float(np.real(np.conjugate(v) @ (self.entries @ v)).item())

    def __add__(self, other: "HermitianOp2") -> "HermitianOp2":
        return HermitianOp2(self.entries + other.entries)

    def __sub__(self, other: "HermitianOp2") -> "HermitianOp2":
        return HermitianOp2(self.entries - other.entries)

    def __mul__(self, scalar: float) -> "HermitianOp2":
        return HermitianOp2(self.entries * float(scalar))

    __rmul__ = __mul__

    def allclose(self, other: "HermitianOp2", atol: float = REPR_TOL) -> bool:
        return float(np.abs(self.entries - other.entries).max()) <= atol


@dataclass(frozen=True)
class QubitState:
    """A pure qubit state with components in the {|+>, |->} basis.

    Amplitudes must be normalized within 1e-12.  Physical comparisons go
    through projectors (see :func:`states_equivalent`), never amplitudes,
    so global phase is unobservable.
    """

    amp_plus: complex
    amp_minus: complex

    def __post_init__(self):
        object.__setattr__(self, "amp_plus", complex(self.amp_plus))
        object.__setattr__(self, "amp_minus", complex(self.amp_minus))
        norm_sq = abs(self.amp_plus) ** 2 + abs(self.amp_minus) ** 2
        if abs(norm_sq - 1.0) > REPR_TOL:
            raise ValueError(f"state is not normalized: |psi|^2 = {norm_sq!r}")

    @classmethod
    def from_amplitudes(cls, amp_plus: complex, amp_minus: complex) -> "QubitState":
        """Build a state from unnormalized amplitudes."""
        # hypot keeps the norm accurate for subnormal/huge amplitudes
        norm = math.hypot(abs(amp_plus), abs(amp_minus))
        if norm == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return cls(complex(amp_plus) / norm, complex(amp_minus) / norm)

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.amp_plus, self.amp_minus], dtype=complex)

    def projector(self) -> HermitianOp2:
        v = self.vector
        return HermitianOp2(np.outer(v, np.conjugate(v)))

    def overlap(self, other: "QubitState") -> complex:
        """Inner product <self|other>."""
        return complex(
            np.conjugate(self.amp_plus) * other.amp_plus
            + np.conjugate(self.amp_minus) * other.amp_minus
        )

    def overlap_probability(self, other: "QubitState") -> float:
        """|<self|other>|^2 clipped to [0, 1]."""
        return min(1.0, max(0.0, abs(self.overlap(other)) ** 2))

    def to_dict(self) -> dict:
        return {
            "amp_plus": [self.amp_plus.real, self.amp_plus.imag],
            "amp_minus": [self.amp_minus.real, self.amp_minus.imag],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "QubitState":
        ap = complex(data["amp_plus"][0], data["amp_plus"][1])
        am = complex(data["amp_minus"][0], data["amp_minus"][1])
        return cls(ap, am)


PLUS = QubitState(1.0, 0.0)
MINUS = QubitState(0.0, 1.0)


def states_equivalent(a: QubitState, b: QubitState, atol: float = CROSS_TOL) -> bool:
    """Physical equality: projectors agree entrywise (global phase ignored)."""
    return a.projector().allclose(b.projector(), atol=atol)


def mirror_reflect(s: QubitState) -> QubitState:
    """Negate the |-> amplitude.  Applying twice is the identity on projectors."""
    return QubitState(s.amp_plus, -s.amp_minus)


@dataclass(frozen=True)
class MirrorEnsemble:
    """Three mirror-symmetric signal states parameterized by (p, theta).

    psi1 = cos(theta)|+> + sin(theta)|->   with prior p
    psi2 = cos(theta)|+> - sin(theta)|->   with prior p
    psi3 = |+>                             with prior 1 - 2p
    """

    p: float
    theta: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 0.5:
            raise ValueError(f"p must lie in [0, 1/2], got p={self.p!r}")
        if not 0.0 <= self.theta <= math.pi / 2:
            raise ValueError(f"theta must lie in [0, pi/2], got theta={self.theta!r}")

    @property
    def states(self) -> tuple[QubitState, QubitState, QubitState]:
        c, s = math.cos(self.theta), math.sin(self.theta)
        psi1 = QubitState.from_amplitudes(c, s)
        return psi1, mirror_reflect(psi1), PLUS

    @property
    def priors(self) -> tuple[float, float, float]:
        return self.p, self.p, 1.0 - (self.p + self.p)

    def signals(self) -> tuple[tuple[QubitState, float], ...]:
        return tuple(zip(self.states, self.priors))


def make_mirror_ensemble(p: float, theta: float) -> MirrorEnsemble:
    """Construct the three-state mirror ensemble; rejects out-of-range (p, theta)."""
    return MirrorEnsemble(float(p), float(theta))


@dataclass(frozen=True)
class PomElement:
    """Rank-1 measurement element with weight w and direction (theta_k, phi_k).

    The derived matrix
        w * [[1 + cos(theta_k),            sin(theta_k) e^{i phi_k}],
             [sin(theta_k) e^{-i phi_k},   1 - cos(theta_k)        ]]
    is canonical for all arithmetic; the (w, theta_k, phi_k) parameters serve
    the planar theory.  Conventional ranges are theta_k in (-pi, pi] and
    phi_k in (-pi/2, pi/2]; any sign outside that range is absorbed by the
    other parameters and is not rejected here.
    """

    w: float
    theta_k: float
    phi_k: float = 0.0
    matrix: HermitianOp2 = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        w = float(self.w)
        if not -REPR_TOL <= w <= 1.0 + REPR_TOL:
            raise ValueError(f"element weight must lie in [0, 1], got w={w!r}")
        w = min(1.0, max(0.0, w))
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "theta_k", float(self.theta_k))
        object.__setattr__(self, "phi_k", float(self.phi_k))
        ck, sk = math.cos(self.theta_k), math.sin(self.theta_k)
        phase = complex(math.cos(self.phi_k), math.sin(self.phi_k))
        m = np.array(
            [
                [w * (1.0 + ck), w * sk * phase],
                [w * sk * np.conjugate(phase), w * (1.0 - ck)],
            ],
            dtype=complex,
        )
        object.__setattr__(self, "matrix", HermitianOp2(m))

    def to_dict(self) -> dict:
        return {"w": self.w, "theta_k": self.theta_k, "phi_k": self.phi_k}

    @classmethod
    def from_dict(cls, data: dict) -> "PomElement":
        return cls(data["w"], data["theta_k"], data.get("phi_k", 0.0))


@dataclass(frozen=True)
class Pom:
    """An ordered collection of POM elements.

    Construction does not enforce completeness; use :func:`validate_pom` to
    check that the elements form a genuine measurement.
    """

    elements: tuple[PomElement, ...]

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[PomElement]:
        return iter(self.elements)

    def __getitem__(self, index: int) -> PomElement:
        return self.elements[index]

    def total(self) -> HermitianOp2:
        acc = np.zeros((2, 2), dtype=complex)
        for el in self.elements:
            acc = acc + el.matrix.entries
        return HermitianOp2(acc)

    def to_dicts(self) -> list[dict]:
        return [el.to_dict() for el in self.elements]

    @classmethod
    def from_dicts(cls, data: Iterable[dict]) -> "Pom":
        return cls(tuple(PomElement.from_dict(d) for d in data))


@dataclass(frozen=True)
class PomValidation:
    """Outcome of a POM check: positivity, completeness, scalar constraints."""

    psd_ok: bool
    completeness_ok: bool
    constraints_ok: bool
    min_eigenvalue: float
    completeness_residual: float
    constraint_residuals: tuple[float, float, float]

    @property
    def ok(self) -> bool:
        return self.psd_ok and self.completeness_ok and self.constraints_ok

    @property
    def max_residual(self) -> float:
        return max(
            self.completeness_residual,
            *self.constraint_residuals,
            max(0.0, -self.min_eigenvalue),
        )


def validate_pom(pom: Pom, atol: float = CROSS_TOL, psd_tol: float = REPR_TOL) -> PomValidation:
    """Check a POM two ways: matrix completeness and the scalar weight constraints.

    The scalar route checks sum(w) = 1, sum(w cos theta_k) = 0 and
    sum(w sin theta_k e^{i phi_k}) = 0, which is equivalent to the matrix sum
    equalling the identity; both are reported so the routes can be compared.
    """
    min_eig = math.inf if pom.elements else 0.0
    for el in pom.elements:
        min_eig = min(min_eig, el.matrix.eigenvalues()[1])
    psd_ok = min_eig >= -psd_tol

    diff = pom.total().entries - np.eye(2)
    completeness_residual = float(np.abs(diff).max())
    completeness_ok = completeness_residual <= atol

    weight_sum = 0.0
    cos_sum = 0.0
    sin_sum = 0.0 + 0.0j
    for el in pom.elements:
        weight_sum += el.w
        cos_sum += el.w * math.cos(el.theta_k)
        sin_sum += el.w * math.sin(el.theta_k) * complex(
            math.cos(el.phi_k), math.sin(el.phi_k)
        )
    residuals = (abs(weight_sum - 1.0), abs(cos_sum), abs(sin_sum))
    constraints_ok = max(residuals) <= atol

    return PomValidation(
        psd_ok=psd_ok,
        completeness_ok=completeness_ok,
        constraints_ok=constraints_ok,
        min_eigenvalue=0.0 if math.isinf(min_eig) else float(min_eig),
        completeness_residual=completeness_residual,
        constraint_residuals=residuals,
    )


def require_valid_pom(pom: Pom, atol: float = CROSS_TOL) -> None:
    report = validate_pom(pom, atol=atol)
    if not report.ok:
        raise PomValidationError(
            "POM is not a valid measurement "
            f"(max residual {report.max_residual:.3e}, min eigenvalue {report.min_eigenvalue:.3e})",
            report=report,
        )


def outcome_probability(state: QubitState, element: PomElement) -> float:
    """Probability of this outcome on the given state, clipped to [0, 1]."""
    value = element.matrix.expectation(state)
    return min(1.0, max(0.0, value))


def average_state(e: MirrorEnsemble) -> HermitianOp2:
    """Prior-weighted mixture of the signal states (unit trace, PSD)."""
    acc = np.zeros((2, 2), dtype=complex)
    for state, prior in e.signals():
        acc = acc + prior * state.projector().entries
    return HermitianOp2(acc)


def antiweighted_sum(e: MirrorEnsemble) -> HermitianOp2:
    """Sum of signal projectors, each weighted by the prior of NOT sending it."""
    acc = np.zeros((2, 2), dtype=complex)
    for state, prior in e.signals():
        acc = acc + (1.0 - prior) * state.projector().entries
    return HermitianOp2(acc)
