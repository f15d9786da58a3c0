import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mirrorfid import (
    MinErrorRegime,
    MirrorEnsemble,
    RegimeTag,
    best_assignment_error_probability,
    best_fidelity_for_pom,
    error_probability,
    make_mirror_ensemble,
    min_error_strategy,
    random_planar_pom,
    regime_comparison,
    steering_parameter,
    three_element_pom,
    two_element_pom,
    two_element_threshold,
    validate_pom,
)

HALF_PI = 0.5 * math.pi


def test_threshold_reference_values():
    assert two_element_threshold(0.0) == pytest.approx(1 / 3)
    assert two_element_threshold(math.pi / 4) == pytest.approx(1 / 3)
    assert two_element_threshold(HALF_PI) == pytest.approx(0.5)


def test_equiprobable_orthogonal_pair_has_zero_error():
    report = min_error_strategy(make_mirror_ensemble(0.5, math.pi / 4))
    assert report.regime is MinErrorRegime.TWO_ELEMENT
    assert report.a_param == 1.0
    assert len(report.pom) == 2
    assert report.p_error == pytest.approx(0.0, abs=1e-12)


def test_three_element_frozen_example():
    # a = 0.1/0.5 and the hand-evaluated correctness sum give p_error = 0.28.
    report = min_error_strategy(make_mirror_ensemble(0.2, math.pi / 4))
    assert report.regime is MinErrorRegime.THREE_ELEMENT
    assert report.a_param == pytest.approx(0.2, abs=1e-14)
    assert len(report.pom) == 3
    axis = report.pom[2]
    np.testing.assert_allclose(
        axis.matrix.entries,
        np.array([[0.96, 0.0], [0.0, 0.0]]),
        atol=1e-12,
        rtol=0.0,
    )
    assert report.p_error == pytest.approx(0.28, abs=1e-12)


def test_three_element_collapses_at_boundary():
    theta = math.pi / 4
    e = MirrorEnsemble(two_element_threshold(theta), theta)
    assert steering_parameter(e) == pytest.approx(1.0, abs=1e-12)
    three = three_element_pom(steering_parameter(e))
    two = two_element_pom()
    assert len(three) == len(two) == 2
    for a, b in zip(three, two):
        np.testing.assert_allclose(
            a.matrix.entries, b.matrix.entries, atol=1e-10, rtol=0.0
        )


def test_boundary_guard_at_degenerate_corners():
    # cos(t) sin(t) -> 0 makes the steering quotient 0/0 at the boundary;
    # the guard returns the two-element limit a = 1 there.
    for theta in (0.0, HALF_PI):
        e = MirrorEnsemble(two_element_threshold(theta), theta)
        assert steering_parameter(e) == 1.0
        assert min_error_strategy(e).regime is MinErrorRegime.TWO_ELEMENT


@given(st.floats(0.01, HALF_PI - 0.01))
@settings(max_examples=100, deadline=None)
def test_boundary_continuity_elementwise(theta):
    p_star = two_element_threshold(theta)
    e = MirrorEnsemble(p_star, theta)
    report = min_error_strategy(e)
    assert report.regime is MinErrorRegime.TWO_ELEMENT
    three = three_element_pom(steering_parameter(e))
    assert len(three) == 2
    for a, b in zip(three, report.pom):
        assert float(np.abs(a.matrix.entries - b.matrix.entries).max()) <= 1e-10


@given(st.floats(0.0, 0.5), st.floats(0.0, HALF_PI))
@settings(max_examples=300, deadline=None)
def test_min_error_pom_is_valid_everywhere(p, theta):
    report = min_error_strategy(MirrorEnsemble(p, theta))
    assert validate_pom(report.pom).ok
    assert 0.0 <= report.a_param <= 1.0
    assert 0.0 <= report.p_error <= 1.0
    if report.regime is MinErrorRegime.THREE_ELEMENT and p > 1e-12 and 1e-6 < theta < HALF_PI - 1e-6:
        assert report.a_param > 0.0


def test_min_error_beats_random_pom_baselines():
    rng = np.random.default_rng(99)
    poms = [
        random_planar_pom(int(rng.integers(2, 4)), int(s))
        for s in rng.integers(0, 2**31, 1000)
    ]
    for p, theta in ((0.2, 0.6), (0.35, 1.2), (0.45, 0.4), (0.1, 1.5)):
        e = MirrorEnsemble(p, theta)
        star = min_error_strategy(e).p_error
        for pom in poms:
            assert star <= best_assignment_error_probability(e, pom) + 1e-12


def test_error_probability_uses_index_correspondence():
    e = make_mirror_ensemble(0.5, math.pi / 4)
    pom = two_element_pom()
    # swapping the two elements misidentifies both pair states
    swapped = type(pom)((pom[1], pom[0]))
    assert error_probability(e, pom) == pytest.approx(0.0, abs=1e-12)
    assert error_probability(e, swapped) == pytest.approx(1.0, abs=1e-12)


# ------------------------------------------------------------- comparison


def test_comparison_equiprobable_pair_agrees():
    comp = regime_comparison(make_mirror_ensemble(0.5, math.pi / 4))
    assert comp.minerror_pom_maximizes_fidelity
    assert comp.fidelity_regime is RegimeTag.LEFT_RIGHT
    assert comp.minerror_regime is MinErrorRegime.TWO_ELEMENT


def test_comparison_updown_point_disagrees():
    # Frozen via the fidelity engine: the three-element min-error POM reaches
    # only ~0.8544 while the optimum is 0.9.
    comp = regime_comparison(make_mirror_ensemble(0.4, 5 * math.pi / 12))
    assert not comp.minerror_pom_maximizes_fidelity
    assert comp.fidelity_regime is RegimeTag.UP_DOWN
    assert comp.max_fidelity == pytest.approx(0.9, abs=1e-12)
    assert comp.minerror_pom_fidelity == pytest.approx(0.8543518955930225, abs=1e-9)
    assert comp.max_fidelity - comp.minerror_pom_fidelity >= 1e-3


def test_comparison_minerror_boundary_point_agrees():
    # theta = pi/4 has min-error threshold exactly 1/3; the fidelity regime
    # there is LeftRight, so the two optimal measurements are the same POM.
    e = make_mirror_ensemble(1 / 3, math.pi / 4)
    report = min_error_strategy(e)
    assert report.regime is MinErrorRegime.TWO_ELEMENT
    comp = regime_comparison(e)
    assert comp.fidelity_regime is RegimeTag.LEFT_RIGHT
    assert comp.minerror_pom_maximizes_fidelity
    f_me, _ = best_fidelity_for_pom(e, report.pom)
    assert f_me == pytest.approx(comp.max_fidelity, abs=1e-12)


def test_comparison_sets_both_nonempty_on_grid():
    agree = disagree = 0
    for p in np.linspace(0.0, 0.5, 12):
        for theta in np.linspace(0.0, HALF_PI, 12):
            if regime_comparison(MirrorEnsemble(float(p), float(theta))).minerror_pom_maximizes_fidelity:
                agree += 1
            else:
                disagree += 1
    assert agree > 0
    assert disagree > 0
