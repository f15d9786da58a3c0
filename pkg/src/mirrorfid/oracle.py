"""Independent verification of the closed-form optimum.

Two searches and one simulation, none of which trusts the analytic solution:

* ``family_scan`` sweeps the two three-element families that exhaust the
  candidate optima (a mirror pair at +-Omega completed by a {0} or {pi}
  axis element, with both weights pinned by completeness), then refines by
  golden section.
* ``random_planar_search`` runs seeded coordinate ascent over two-pair
  planar POMs, a belt-and-braces check that no searched POM beats the scan.
* ``monte_carlo_fidelity`` simulates the measure-and-retransmit channel
  trial by trial with a counter-based, splittable RNG, so results are
  reproducible for a fixed seed regardless of worker count.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .fidelity import (
    RetransmitMap,
    Signals,
    _signal_list,
    mirror_pair_pom,
    planar_fidelity,
    q_factor,
)
from .qubit_core import (
    MirrorEnsemble,
    Pom,
    PomElement,
    outcome_probability,
    require_valid_pom,
)

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
_GOLDEN_MAX_ITER = 200
_ASCENT_MAX_SWEEPS = 5000  # two coordinate steps per sweep
_MC_CHUNK = 1 << 16


class FamilyCase(str, Enum):
    WITH_PI = "WithPi"
    WITH_ZERO = "WithZero"

    def __str__(self) -> str:
        return self.value


class SearchMethod(str, Enum):
    FAMILY_SCAN = "FamilyScan"
    RANDOM_SEARCH = "RandomSearch"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class ThreeElementFamily:
    """Three-element mirror-symmetric POM with weights forced by completeness.

    WithPi:   elements at +-Omega and pi, cos(Omega) in [0, 1],
              w_Omega = 1/(1 + cos Omega), w_pi = cos Omega/(1 + cos Omega).
    WithZero: elements at +-Omega and 0, cos(Omega) in [-1, 0],
              w_Omega = 1/(1 - cos Omega), w_0 = -cos Omega/(1 - cos Omega).

    The endpoints cos(Omega) in {0, +-1} recover the two two-element POMs.
    """

    case_tag: FamilyCase
    cos_omega: float

    def __post_init__(self):
        c = float(self.cos_omega)
        if self.case_tag is FamilyCase.WITH_PI and not -1e-12 <= c <= 1.0 + 1e-12:
            raise ValueError(f"WithPi requires cos_omega in [0, 1], got {c!r}")
        if self.case_tag is FamilyCase.WITH_ZERO and not -1.0 - 1e-12 <= c <= 1e-12:
            raise ValueError(f"WithZero requires cos_omega in [-1, 0], got {c!r}")
        object.__setattr__(self, "cos_omega", c)

    def pairs(self) -> tuple[tuple[float, float], tuple[float, float]]:
        """((pair weight, Omega), (axis weight, 0 or pi)) combined-weight pairs."""
        c = min(1.0, max(-1.0, self.cos_omega))
        omega = math.acos(c)
        if self.case_tag is FamilyCase.WITH_PI:
            return (1.0 / (1.0 + c), omega), (c / (1.0 + c), math.pi)
        return (1.0 / (1.0 - c), omega), (-c / (1.0 - c), 0.0)

    def pom(self) -> Pom:
        (w_om, omega), (w_ax, axis) = self.pairs()
        elements: list[PomElement] = []
        if w_om > 1e-12:
            if abs(math.sin(omega)) < 1e-15:
                elements.append(PomElement(w_om, omega))
            else:
                elements.append(PomElement(0.5 * w_om, omega))
                elements.append(PomElement(0.5 * w_om, -omega))
        if w_ax > 1e-12:
            elements.append(PomElement(w_ax, axis))
        return Pom(tuple(elements))


@dataclass(frozen=True)
class OracleResult:
    best_fidelity: float
    best_pom: Pom
    method: SearchMethod
    evaluations: int
    converged: bool = True


def _family_fidelity(e: MirrorEnsemble, case: FamilyCase, cos_omega):
    """Planar fidelity of a family member; accepts a scalar or array of cos(Omega)."""
    c = np.asarray(cos_omega, dtype=float)
    omega = np.arccos(np.clip(c, -1.0, 1.0))
    if case is FamilyCase.WITH_PI:
        w_om = 1.0 / (1.0 + c)
        w_ax = c / (1.0 + c)
        q_ax = float(q_factor(e, math.pi))
    else:
        w_om = 1.0 / (1.0 - c)
        w_ax = -c / (1.0 - c)
        q_ax = float(q_factor(e, 0.0))
    return 0.5 + w_om * np.sqrt(q_factor(e, omega)) + w_ax * math.sqrt(q_ax)


def _golden_max(
    f: Callable[[float], float], lo: float, hi: float, tol: float, max_iter: int
) -> tuple[float, float, int]:
    """Golden-section maximization; returns (x, f(x), evaluations)."""
    evals = 0
    c = hi - _INVPHI * (hi - lo)
    d = lo + _INVPHI * (hi - lo)
    fc, fd = f(c), f(d)
    evals += 2
    iterations = 0
    while hi - lo > tol and iterations < max_iter:
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - _INVPHI * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _INVPHI * (hi - lo)
            fd = f(d)
        evals += 1
        iterations += 1
    x = 0.5 * (lo + hi)
    return x, f(x), evals + 1


def family_scan(e: MirrorEnsemble, resolution: int = 513) -> OracleResult:
    """Best planar fidelity over both forced-weight families.

    Each family is evaluated on a uniform cos(Omega) grid (endpoints
    included, so the two two-element POMs are always scanned), then refined
    by golden section around the best grid point to 1e-10 in cos(Omega).
    Ties resolve deterministically: smallest cos(Omega), then WithPi before
    WithZero, so the result is identical for any execution order.
    """
    if resolution < 2:
        raise ValueError(f"resolution must be at least 2, got {resolution!r}")
    evaluations = 0
    candidates: list[tuple[float, float, FamilyCase]] = []
    for case, (lo, hi) in (
        (FamilyCase.WITH_PI, (0.0, 1.0)),
        (FamilyCase.WITH_ZERO, (-1.0, 0.0)),
    ):
        grid = np.linspace(lo, hi, resolution)
        values = _family_fidelity(e, case, grid)
        evaluations += resolution
        i = int(np.argmax(values))
        candidates.append((float(values[i]), float(grid[i]), case))
        bracket_lo = float(grid[max(i - 1, 0)])
        bracket_hi = float(grid[min(i + 1, resolution - 1)])
        x, fx, used = _golden_max(
            lambda c: float(_family_fidelity(e, case, c)),
            bracket_lo,
            bracket_hi,
            tol=1e-10,
            max_iter=_GOLDEN_MAX_ITER,
        )
        evaluations += used
        candidates.append((fx, x, case))

    candidates.sort(
        key=lambda t: (-t[0], t[1], 0 if t[2] is FamilyCase.WITH_PI else 1)
    )
    _, best_c, best_case = candidates[0]
    family = ThreeElementFamily(best_case, best_c)
    best_fidelity = planar_fidelity(e, family.pairs())
    return OracleResult(
        best_fidelity=best_fidelity,
        best_pom=family.pom(),
        method=SearchMethod.FAMILY_SCAN,
        evaluations=evaluations,
    )


def _two_pair_objective(e: MirrorEnsemble, th_low, th_high):
    """Planar fidelity of two mirror pairs with weights pinned by completeness.

    th_low lies in [0, pi/2] (cosine >= 0) and th_high in [pi/2, pi]
    (cosine <= 0); the completeness constraints then force both weights.
    Broadcasts over arrays.
    """
    c1 = np.cos(th_low)
    c2 = np.cos(th_high)
    denom = c1 - c2
    safe = np.where(denom > 1e-15, denom, 1.0)
    w1 = np.where(denom > 1e-15, -c2 / safe, 1.0)
    w2 = np.where(denom > 1e-15, c1 / safe, 0.0)
    return 0.5 + w1 * np.sqrt(q_factor(e, th_low)) + w2 * np.sqrt(q_factor(e, th_high))


def random_planar_search(
    e: MirrorEnsemble, restarts: int = 50, seed: int = 0
) -> OracleResult:
    """Projected coordinate ascent over two-pair planar POMs, seeded restarts.

    With at most two mirror pairs the completeness constraints pin both
    weights for any pair of angles, so the ascent runs on the angles and the
    "constraint repair" is the exact weight solve.  All restarts advance in
    lockstep (vectorized), which keeps the search deterministic for a fixed
    seed.  Stops when no restart improves by 1e-12, or at the step cap, in
    which case the best-so-far is returned flagged as unconverged.
    """
    if restarts < 1:
        raise ValueError(f"restarts must be at least 1, got {restarts!r}")
    rng = np.random.default_rng(seed)
    half_pi = 0.5 * math.pi
    th_low = rng.uniform(0.0, half_pi, restarts)
    th_high = rng.uniform(half_pi, math.pi, restarts)
    evaluations = 0

    def coordinate_max(update_low: bool):
        nonlocal th_low, th_high, evaluations
        lo, hi = (0.0, half_pi) if update_low else (half_pi, math.pi)
        grid = np.linspace(lo, hi, 33)

        def f_axis(x):
            return (
                _two_pair_objective(e, x, th_high)
                if update_low
                else _two_pair_objective(e, th_low, x)
            )

        values = f_axis(grid[:, None])
        evaluations += values.size
        i = np.argmax(values, axis=0)
        b_lo = grid[np.maximum(i - 1, 0)]
        b_hi = grid[np.minimum(i + 1, len(grid) - 1)]
        for _ in range(45):
            m1 = b_hi - _INVPHI * (b_hi - b_lo)
            m2 = b_lo + _INVPHI * (b_hi - b_lo)
            f1, f2 = f_axis(m1), f_axis(m2)
            evaluations += f1.size + f2.size
            keep_left = f1 >= f2
            b_hi = np.where(keep_left, m2, b_hi)
            b_lo = np.where(keep_left, b_lo, m1)
        candidate = 0.5 * (b_lo + b_hi)
        current = th_low if update_low else th_high
        f_new, f_cur = f_axis(candidate), f_axis(current)
        evaluations += f_new.size + f_cur.size
        chosen = np.where(f_new >= f_cur, candidate, current)
        if update_low:
            th_low = chosen
        else:
            th_high = chosen

    best = _two_pair_objective(e, th_low, th_high)
    evaluations += best.size
    converged = False
    for _ in range(_ASCENT_MAX_SWEEPS):
        coordinate_max(update_low=True)
        coordinate_max(update_low=False)
        now = _two_pair_objective(e, th_low, th_high)
        evaluations += now.size
        improvement = float(np.max(now - best))
        best = np.maximum(best, now)
        if improvement < 1e-12:
            converged = True
            break

    idx = int(np.argmax(best))
    t1, t2 = float(th_low[idx]), float(th_high[idx])
    c1, c2 = math.cos(t1), math.cos(t2)
    denom = c1 - c2
    if denom > 1e-15:
        weights = (-c2 / denom, c1 / denom)
    else:
        weights = (1.0, 0.0)
    pairs = [
        (w, t) for w, t in zip(weights, (t1, t2)) if w > 1e-14
    ]
    return OracleResult(
        best_fidelity=planar_fidelity(e, pairs),
        best_pom=mirror_pair_pom(pairs),
        method=SearchMethod.RANDOM_SEARCH,
        evaluations=evaluations,
        converged=converged,
    )


def random_planar_pom(n_pairs: int, seed: int) -> Pom:
    """Random valid planar mirror-symmetric POM with ``n_pairs`` mirror pairs.

    Angles are drawn uniformly; raw weights are drawn and then projected onto
    the completeness constraints, retrying (up to 100 draws) whenever the
    projection leaves the feasible region.  A single pair admits only the
    +-pi/2 solution, which is returned directly.
    """
    if n_pairs < 1:
        raise ValueError(f"n_pairs must be at least 1, got {n_pairs!r}")
    if n_pairs == 1:
        return mirror_pair_pom([(1.0, 0.5 * math.pi)])
    rng = np.random.default_rng(seed)
    ones = np.ones(n_pairs)
    for _ in range(100):
        angles = rng.uniform(0.0, math.pi, n_pairs)
        cosines = np.cos(angles)
        if cosines.min() > -1e-9 or cosines.max() < 1e-9:
            continue  # weights cannot balance without both cosine signs
        raw = rng.dirichlet(ones)
        constraint = np.vstack([ones, cosines])
        gram = constraint @ constraint.T
        if abs(np.linalg.det(gram)) < 1e-12:
            continue
        shift = constraint.T @ np.linalg.solve(
            gram, constraint @ raw - np.array([1.0, 0.0])
        )
        weights = raw - shift
        if weights.min() < 1e-6:
            continue
        return mirror_pair_pom(list(zip(weights.tolist(), angles.tolist())))
    raise ValueError("could not draw a feasible planar POM in 100 attempts")


@dataclass(frozen=True)
class MonteCarloResult:
    estimate: float
    std_error: float
    trials: int
    passes: int


def monte_carlo_fidelity(
    signals: Signals,
    pom: Pom,
    retrans: RetransmitMap,
    trials: int,
    seed: int,
    workers: int = 1,
) -> MonteCarloResult:
    """Simulate the intercept-resend channel and estimate its fidelity.

    Each trial draws a signal state from the priors, an outcome from the
    outcome probabilities, and a pass/fail test of the retransmitted state
    against the signal.  Trials are partitioned into fixed-size chunks, each
    driven by its own counter-based (Philox) stream spawned from ``seed``,
    so the estimate is bit-identical for any ``workers`` count.

    Returns the pass fraction and the binomial standard error
    sqrt(F(1-F)/trials).
    """
    if trials < 1:
        raise ValueError(f"trials must be at least 1, got {trials!r}")
    require_valid_pom(pom)
    if len(retrans) != len(pom):
        raise ValueError(
            f"retransmission map has {len(retrans)} states for {len(pom)} POM elements"
        )
    pairs = _signal_list(signals)
    priors_cdf = np.cumsum([prior for _, prior in pairs])
    priors_cdf[-1] = 1.0
    outcome = np.array(
        [[outcome_probability(state, el) for el in pom] for state, _ in pairs]
    )
    outcome_cdf = np.cumsum(outcome, axis=1)
    row_total = outcome_cdf[:, -1].copy()
    pass_prob = np.array(
        [[state.overlap_probability(phi) for phi in retrans] for state, _ in pairs]
    )

    n_chunks = -(-trials // _MC_CHUNK)
    children = np.random.SeedSequence(seed).spawn(n_chunks)

    def run_chunk(index: int) -> int:
        size = min(_MC_CHUNK, trials - index * _MC_CHUNK)
        rng = np.random.Generator(np.random.Philox(children[index]))
        u_state = rng.random(size)
        u_outcome = rng.random(size)
        u_pass = rng.random(size)
        j = np.searchsorted(priors_cdf, u_state, side="right")
        j = np.minimum(j, len(pairs) - 1)
        scaled = u_outcome * row_total[j]
        k = (scaled[:, None] >= outcome_cdf[j, :]).sum(axis=1)
        k = np.minimum(k, len(pom) - 1)
        return int(np.count_nonzero(u_pass < pass_prob[j, k]))

    if workers <= 1:
        counts = [run_chunk(i) for i in range(n_chunks)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(run_chunk, range(n_chunks)))
    passes = int(sum(counts))  # reduced in chunk-index order
    estimate = passes / trials
    std_error = math.sqrt(max(estimate * (1.0 - estimate), 0.0) / trials)
    return MonteCarloResult(
        estimate=estimate, std_error=std_error, trials=trials, passes=passes
    )
