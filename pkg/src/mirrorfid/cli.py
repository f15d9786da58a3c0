"""Command-line front end: solve single ensembles, map the regimes over
(p, theta), run the verification suite, and run channel simulations.

Angles are degrees on the command line and radians internally.  Exit codes:
0 success, 1 verification failure, 2 usage error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .fidelity import best_fidelity_for_pom
from .minerror import (
    min_error_strategy,
    regime_comparison,
    two_element_threshold,
)
from .oracle import family_scan, monte_carlo_fidelity, random_planar_pom
from .qubit_core import (
    MirrorEnsemble,
    Pom,
    antiweighted_sum,
    make_mirror_ensemble,
    validate_pom,
)
from .strategy import (
    abc_coefficients,
    build_optimal_strategy,
    boundary_p_closed_form,
    classify_regime,
    fidelity_boundary_theta,
    fidelity_left_right,
    fidelity_up_down,
    left_right_pom,
    max_fidelity,
    up_down_pom,
)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3

_STRATEGY_CHOICES = ("optimal", "minerror", "upd", "lr")


def _fmt(value: float) -> str:
    """Locale-independent decimal text, 12 significant digits."""
    return format(float(value), ".12g")


@dataclass(frozen=True)
class MapRow:
    """One (p, theta) cell of the regime map report."""

    p: float
    theta_deg: float
    f_lr: float
    f_ud: float
    f_max: float
    fidelity_regime: str
    minerror_regime: str
    p_error: float
    agree: bool

    def as_csv(self) -> list[str]:
        return [
            _fmt(self.p),
            _fmt(self.theta_deg),
            _fmt(self.f_lr),
            _fmt(self.f_ud),
            _fmt(self.f_max),
            self.fidelity_regime,
            self.minerror_regime,
            _fmt(self.p_error),
            "true" if self.agree else "false",
        ]


MAP_HEADER = (
    "p",
    "theta_deg",
    "f_lr",
    "f_ud",
    "f_max",
    "fidelity_regime",
    "minerror_regime",
    "p_error",
    "agree",
)


def build_map_rows(p_steps: int, theta_steps: int) -> list[MapRow]:
    """Regime map rows ordered by p ascending, then theta ascending."""
    rows = []
    for p in np.linspace(0.0, 0.5, p_steps):
        for theta_deg in np.linspace(0.0, 90.0, theta_steps):
            e = MirrorEnsemble(float(p), math.radians(float(theta_deg)))
            coeffs = abc_coefficients(e)
            comp = regime_comparison(e)
            report = min_error_strategy(e)
            f_lr = fidelity_left_right(coeffs)
            f_ud = fidelity_up_down(coeffs)
            rows.append(
                MapRow(
                    p=float(p),
                    theta_deg=float(theta_deg),
                    f_lr=f_lr,
                    f_ud=f_ud,
                    f_max=max(f_lr, f_ud),
                    fidelity_regime=str(comp.fidelity_regime),
                    minerror_regime=str(comp.minerror_regime),
                    p_error=report.p_error,
                    agree=comp.minerror_pom_maximizes_fidelity,
                )
            )
    return rows


def fidelity_boundary_polyline(p_steps: int) -> list[tuple[float, float]]:
    """(theta_deg, p) points where the two two-element strategies tie."""
    return [
        (math.degrees(fidelity_boundary_theta(float(p))), float(p))
        for p in np.linspace(0.0, 0.5, p_steps)
    ]


def minerror_boundary_polyline(theta_steps: int) -> list[tuple[float, float]]:
    """(theta_deg, p) points of the min-error two/three-element boundary."""
    return [
        (float(t), two_element_threshold(math.radians(float(t))))
        for t in np.linspace(0.0, 90.0, theta_steps)
    ]


def _write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence[str]]) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(row) for row in rows)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


@dataclass(frozen=True)
class VerificationCheck:
    name: str
    passed: bool
    detail: str


def run_verification(grid_size: int = 25, seed: int = 1234) -> list[VerificationCheck]:
    """Cross-checks of the closed forms against the independent oracles."""
    if grid_size < 2:
        raise ValueError(f"grid size must be at least 2, got {grid_size!r}")
    checks: list[VerificationCheck] = []
    p_grid = np.linspace(0.0, 0.5, grid_size)
    t_grid = np.linspace(0.0, 0.5 * math.pi, grid_size)

    # Brute-force family scan against the analytic maximum.
    worst = 0.0
    for p in p_grid:
        for t in t_grid:
            e = MirrorEnsemble(float(p), float(t))
            gap = abs(
                family_scan(e, resolution=201).best_fidelity
                - max_fidelity(abc_coefficients(e))
            )
            worst = max(worst, gap)
    checks.append(
        VerificationCheck(
            "oracle-vs-analytic",
            worst < 1e-8,
            f"worst |scan - closed form| = {worst:.3e} (tol 1e-08)",
        )
    )

    # Degeneracy identity along the nontrivial boundary branch.
    worst_ident = 0.0
    worst_tie = 0.0
    for t in np.linspace(0.25 * math.pi, 0.5 * math.pi, 21)[1:]:
        e = MirrorEnsemble(boundary_p_closed_form(float(t)), float(t))
        worst_ident = max(
            worst_ident,
            float(np.abs(antiweighted_sum(e).entries - np.eye(2)).max()),
        )
        coeffs = abc_coefficients(e)
        worst_tie = max(
            worst_tie, abs(fidelity_left_right(coeffs) - fidelity_up_down(coeffs))
        )
    checks.append(
        VerificationCheck(
            "degeneracy-identity",
            worst_ident < 1e-10 and worst_tie < 1e-12,
            f"worst |antiweighted - identity| = {worst_ident:.3e} (tol 1e-10), "
            f"worst |F_lr - F_ud| = {worst_tie:.3e} (tol 1e-12)",
        )
    )

    # Min-error POM validity and regime agreement counts across the grid.
    invalid = 0
    agree_count = 0
    disagree_count = 0
    for p in p_grid:
        for t in t_grid:
            e = MirrorEnsemble(float(p), float(t))
            report = min_error_strategy(e)
            if not validate_pom(report.pom).ok or not 0.0 <= report.a_param <= 1.0:
                invalid += 1
            if regime_comparison(e).minerror_pom_maximizes_fidelity:
                agree_count += 1
            else:
                disagree_count += 1
    checks.append(
        VerificationCheck(
            "minerror-pom-validity",
            invalid == 0,
            f"{invalid} invalid POMs over {grid_size * grid_size} grid points",
        )
    )
    checks.append(
        VerificationCheck(
            "comparison-counts",
            agree_count > 0 and disagree_count > 0,
            f"min-error POM maximizes fidelity at {agree_count} points, "
            f"fails at {disagree_count}",
        )
    )

    # At p = 1/2 the min-error and fidelity-optimal measurements coincide.
    worst_pom_gap = 0.0
    worst_fid_gap = 0.0
    for t in t_grid:
        e = MirrorEnsemble(0.5, float(t))
        me_pom = min_error_strategy(e).pom
        lr = left_right_pom()
        gap = max(
            float(np.abs(a.matrix.entries - b.matrix.entries).max())
            for a, b in zip(me_pom, lr)
        )
        worst_pom_gap = max(worst_pom_gap, gap if len(me_pom) == len(lr) else math.inf)
        f_me, _ = best_fidelity_for_pom(e, me_pom)
        worst_fid_gap = max(
            worst_fid_gap, abs(f_me - max_fidelity(abc_coefficients(e)))
        )
    checks.append(
        VerificationCheck(
            "equiprobable-coincidence",
            worst_pom_gap < 1e-10 and worst_fid_gap < 1e-12,
            f"worst POM gap {worst_pom_gap:.3e} (tol 1e-10), "
            f"worst fidelity gap {worst_fid_gap:.3e} (tol 1e-12)",
        )
    )

    # Random planar POMs never beat the analytic optimum (seeded spot check).
    rng = np.random.default_rng(seed)
    worst_excess = -math.inf
    for _ in range(3):
        e = MirrorEnsemble(
            float(rng.uniform(0.0, 0.5)), float(rng.uniform(0.0, 0.5 * math.pi))
        )
        f_star = max_fidelity(abc_coefficients(e))
        for _ in range(200):
            pom = random_planar_pom(int(rng.integers(2, 4)), int(rng.integers(2**31)))
            f_pom, _ = best_fidelity_for_pom(e, pom)
            worst_excess = max(worst_excess, f_pom - f_star)
    checks.append(
        VerificationCheck(
            "no-superoptimal-pom",
            worst_excess <= 1e-9,
            f"max excess over closed form = {worst_excess:.3e} (tol 1e-09)",
        )
    )
    return checks


def _ensemble_from_args(args) -> MirrorEnsemble:
    return make_mirror_ensemble(args.p, math.radians(args.theta_deg))


def _strategy_pom(e: MirrorEnsemble, choice: str) -> Pom:
    if choice == "optimal":
        return build_optimal_strategy(e).pom
    if choice == "minerror":
        return min_error_strategy(e).pom
    if choice == "upd":
        return up_down_pom()
    if choice == "lr":
        return left_right_pom()
    raise ValueError(f"unknown strategy choice {choice!r}")


def cmd_solve(args) -> int:
    try:
        e = _ensemble_from_args(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    coeffs = abc_coefficients(e)
    regime = classify_regime(e)
    report = build_optimal_strategy(e)
    me = min_error_strategy(e)
    comp = regime_comparison(e)
    payload = {
        "input": {
            "p": e.p,
            "theta_deg": math.degrees(e.theta),
            "theta_rad": e.theta,
        },
        "coefficients": {
            "a_coef": coeffs.a_coef,
            "b_coef": coeffs.b_coef,
            "c_coef": coeffs.c_coef,
        },
        "margin": regime.margin,
        "eta": report.eta,
        "fidelity": {
            "regime": str(regime.tag),
            "max": report.fidelity,
            "left_right": fidelity_left_right(coeffs),
            "up_down": fidelity_up_down(coeffs),
            "degeneracy_identity_holds": regime.ident_holds,
            "pom": report.pom.to_dicts(),
            "retransmissions": report.retrans.to_dicts(),
        },
        "min_error": {
            "regime": str(me.regime),
            "a_param": me.a_param,
            "p_error": me.p_error,
            "pom": me.pom.to_dicts(),
        },
        "comparison": {
            "minerror_pom_maximizes_fidelity": comp.minerror_pom_maximizes_fidelity,
            "minerror_pom_fidelity": comp.minerror_pom_fidelity,
        },
    }
    print(json.dumps(payload, indent=2))
    return EXIT_OK


def cmd_map(args) -> int:
    try:
        p_steps, theta_steps = args.grid
    except (TypeError, ValueError):
        print("error: --grid must be N or NxM with N, M >= 2", file=sys.stderr)
        return EXIT_USAGE
    if p_steps < 2 or theta_steps < 2:
        print("error: map grid steps must be at least 2", file=sys.stderr)
        return EXIT_USAGE

    rows = build_map_rows(p_steps, theta_steps)
    fid_boundary = fidelity_boundary_polyline(p_steps)
    me_boundary = minerror_boundary_polyline(theta_steps)

    out = Path(args.out)
    stem = out.with_suffix("")
    try:
        _write_csv(out, MAP_HEADER, [row.as_csv() for row in rows])
        _write_csv(
            Path(f"{stem}_fidelity_boundary.csv"),
            ("theta_deg", "p"),
            [(_fmt(t), _fmt(p)) for t, p in fid_boundary],
        )
        _write_csv(
            Path(f"{stem}_minerror_boundary.csv"),
            ("theta_deg", "p"),
            [(_fmt(t), _fmt(p)) for t, p in me_boundary],
        )
        if not args.no_plot:
            from .plots import REGIME_ORDER, render_map_figure

            p_values = sorted({row.p for row in rows})
            t_values = sorted({row.theta_deg for row in rows})
            codes = np.zeros((len(p_values), len(t_values)))
            disagree = np.zeros_like(codes, dtype=bool)
            index = {
                (row.p, row.theta_deg): row for row in rows
            }
            for i, p in enumerate(p_values):
                for j, t in enumerate(t_values):
                    row = index[(p, t)]
                    codes[i, j] = REGIME_ORDER.index(row.fidelity_regime)
                    disagree[i, j] = not row.agree
            render_map_figure(
                p_values,
                t_values,
                codes,
                disagree,
                fid_boundary,
                me_boundary,
                str(stem) + ".png",
            )
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        checks = run_verification(grid_size=args.grid_size, seed=args.seed)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    failures = [c for c in checks if not c.passed]
    for check in checks:
        status = "PASS" if check.passed else "FAIL"
        print(f"{status} {check.name}: {check.detail}")
    if failures:
        print(
            f"{len(failures)} of {len(checks)} checks failed: "
            + ", ".join(c.name for c in failures)
        )
        return EXIT_VERIFY_FAILED
    print(f"all {len(checks)} checks passed")
    return EXIT_OK


def cmd_simulate(args) -> int:
    try:
        e = _ensemble_from_args(args)
        pom = _strategy_pom(e, args.strategy)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    analytic, retrans = best_fidelity_for_pom(e, pom)
    result = monte_carlo_fidelity(
        e, pom, retrans, trials=args.trials, seed=args.seed, workers=args.workers
    )
    if result.std_error > 0.0:
        z = (result.estimate - analytic) / result.std_error
    else:
        z = 0.0 if result.estimate == analytic else math.inf
    payload = {
        "strategy": args.strategy,
        "p": e.p,
        "theta_deg": math.degrees(e.theta),
        "trials": result.trials,
        "seed": args.seed,
        "estimate": result.estimate,
        "std_error": result.std_error,
        "analytic": analytic,
        "z": z,
    }
    print(json.dumps(payload, indent=2))
    return EXIT_OK


def _grid_pair(text: str) -> tuple[int, int]:
    parts = text.lower().split("x")
    try:
        if len(parts) == 1:
            n = int(parts[0])
            return n, n
        if len(parts) == 2:
            return int(parts[0]), int(parts[1])
    except ValueError:
        pass
    raise argparse.ArgumentTypeError("grid must be N or NxM")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mirrorfid",
        description=(
            "Maximum-fidelity retransmission and minimum-error discrimination "
            "strategies for mirror-symmetric qubit ensembles."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="solve a single ensemble, emit JSON")
    solve.add_argument("--p", type=float, required=True, help="mirror-pair prior in [0, 1/2]")
    solve.add_argument("--theta-deg", type=float, required=True, help="half angle in degrees")
    solve.add_argument("--format", choices=("json",), default="json")
    solve.set_defaults(func=cmd_solve)

    map_cmd = sub.add_parser("map", help="regime map CSVs and figure over (p, theta)")
    map_cmd.add_argument("--grid", type=_grid_pair, default=(50, 50), help="N or NxM grid steps")
    map_cmd.add_argument("--out", required=True, help="path of the main CSV report")
    map_cmd.add_argument(
        "--no-plot", action="store_true", help="skip rendering the PNG figure"
    )
    map_cmd.set_defaults(func=cmd_map)

    verify = sub.add_parser("verify", help="run the oracle cross-check suite")
    verify.add_argument("--grid", dest="grid_size", type=int, default=25)
    verify.add_argument("--seed", type=int, default=1234)
    verify.set_defaults(func=cmd_verify)

    sim = sub.add_parser("simulate", help="Monte Carlo channel simulation")
    sim.add_argument("--p", type=float, required=True)
    sim.add_argument("--theta-deg", type=float, required=True)
    sim.add_argument("--trials", type=int, default=100_000)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--workers", type=int, default=1)
    sim.add_argument("--strategy", choices=_STRATEGY_CHOICES, default="optimal")
    sim.set_defaults(func=cmd_simulate)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return int(code) if code is not None else EXIT_OK
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
