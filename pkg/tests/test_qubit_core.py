import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mirrorfid import (
    MINUS,
    PLUS,
    HermitianOp2,
    Pom,
    PomElement,
    QubitState,
    antiweighted_sum,
    average_state,
    make_mirror_ensemble,
    mirror_reflect,
    outcome_probability,
    random_planar_pom,
    states_equivalent,
    validate_pom,
)

HALF_PI = 0.5 * math.pi


def _mat(op):
    return np.asarray(op.entries)


# ---------------------------------------------------------------- ensembles


def test_equiprobable_orthogonal_pair():
    e = make_mirror_ensemble(0.5, math.pi / 4)
    psi1, psi2, psi3 = e.states
    root_half = math.sqrt(0.5)
    assert psi1.amp_plus == pytest.approx(root_half)
    assert psi1.amp_minus == pytest.approx(root_half)
    assert psi2.amp_minus == pytest.approx(-root_half)
    assert states_equivalent(psi3, PLUS)
    assert e.priors == (0.5, 0.5, 0.0)


def test_single_state_ensemble():
    e = make_mirror_ensemble(0.0, 0.3)
    assert e.priors == (0.0, 0.0, 1.0)
    assert states_equivalent(e.states[2], PLUS)


def test_trine_configuration_has_equal_priors():
    e = make_mirror_ensemble(1 / 3, math.pi / 3)
    assert all(pr == pytest.approx(1 / 3) for pr in e.priors)
    # 120 degrees apart on the Bloch circle: pairwise overlap 1/4
    for i in range(3):
        for j in range(i + 1, 3):
            assert e.states[i].overlap_probability(e.states[j]) == pytest.approx(0.25)


@pytest.mark.parametrize(
    "p, theta, parameter",
    [(-0.1, 0.3, "p"), (0.6, 0.3, "p"), (0.2, -0.1, "theta"), (0.2, 2.0, "theta")],
)
def test_out_of_range_parameters_name_the_offender(p, theta, parameter):
    with pytest.raises(ValueError, match=parameter):
        make_mirror_ensemble(p, theta)


@given(st.floats(0.0, 0.5), st.floats(0.0, HALF_PI))
@settings(max_examples=200, deadline=None)
def test_priors_sum_to_one_exactly(p, theta):
    assert sum(make_mirror_ensemble(p, theta).priors) == 1.0


# ------------------------------------------------------------- mirror map


def test_mirror_reflect_fixes_plus():
    assert mirror_reflect(PLUS) == PLUS


def test_mirror_reflect_swaps_pair_states():
    e = make_mirror_ensemble(0.2, 0.7)
    psi1, psi2, _ = e.states
    assert states_equivalent(mirror_reflect(psi1), psi2)
    assert states_equivalent(mirror_reflect(psi2), psi1)


def test_mirror_reflect_negates_minus_amplitude():
    reflected = mirror_reflect(MINUS)
    assert reflected.amp_minus == -1.0
    assert states_equivalent(reflected, MINUS)


@given(st.floats(0.0, math.pi), st.floats(-math.pi, math.pi))
@settings(max_examples=100, deadline=None)
def test_mirror_reflect_is_an_involution(polar, phase):
    s = QubitState.from_amplitudes(
        math.cos(polar / 2), math.sin(polar / 2) * complex(math.cos(phase), math.sin(phase))
    )
    assert states_equivalent(mirror_reflect(mirror_reflect(s)), s, atol=1e-14)


# ------------------------------------------------------- outcome probability


def test_outcome_probability_half_weight_orthogonal():
    assert outcome_probability(PLUS, PomElement(0.5, HALF_PI)) == pytest.approx(0.5)


def test_outcome_probability_projector_on_plus():
    assert outcome_probability(PLUS, PomElement(1.0, 0.0)) == pytest.approx(1.0)


def test_outcome_probability_pair_state_down_elements():
    # Frozen from the generic matrix-product oracle: <psi|Pi|psi> with
    # psi = (|+> + |->)/sqrt(2) and Pi = w(1 - cos pi)|-><-| gives 2w sin^2.
    psi1 = make_mirror_ensemble(0.5, math.pi / 4).states[0]
    assert outcome_probability(psi1, PomElement(1.0, math.pi)) == pytest.approx(1.0)
    assert outcome_probability(psi1, PomElement(0.5, math.pi)) == pytest.approx(0.5)


@given(
    st.floats(0.0, math.pi),
    st.floats(0.0, 1.0),
    st.floats(-math.pi, math.pi),
    st.floats(-HALF_PI, HALF_PI),
)
@settings(max_examples=200, deadline=None)
def test_outcome_probability_lies_in_unit_interval(polar, w, theta_k, phi_k):
    s = QubitState.from_amplitudes(math.cos(polar / 2), math.sin(polar / 2))
    value = outcome_probability(s, PomElement(w, theta_k, phi_k))
    assert 0.0 <= value <= 1.0


@given(st.integers(2, 4), st.integers(0, 10_000), st.floats(0.0, math.pi))
@settings(max_examples=100, deadline=None)
def test_outcome_probabilities_sum_to_one_over_any_pom(n_pairs, seed, polar):
    pom = random_planar_pom(n_pairs, seed)
    s = QubitState.from_amplitudes(math.cos(polar / 2), math.sin(polar / 2))
    total = sum(outcome_probability(s, el) for el in pom)
    assert total == pytest.approx(1.0, abs=1e-10)


# ----------------------------------------------------------------- elements


@given(st.floats(0.0, 1.0), st.floats(-math.pi, math.pi), st.floats(-HALF_PI, HALF_PI))
@settings(max_examples=200, deadline=None)
def test_pom_element_is_psd_and_rank_one(w, theta_k, phi_k):
    el = PomElement(w, theta_k, phi_k)
    assert el.matrix.eigenvalues()[1] >= -1e-12
    assert abs(el.matrix.determinant()) <= 1e-12


def test_pom_element_rejects_bad_weight():
    with pytest.raises(ValueError, match="weight"):
        PomElement(1.5, 0.0)
    with pytest.raises(ValueError, match="weight"):
        PomElement(-0.2, 0.0)


def test_hermitian_op_rejects_non_hermitian():
    with pytest.raises(ValueError, match="Hermitian"):
        HermitianOp2(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_eigenvalues_are_ordered():
    hi, lo = HermitianOp2(np.array([[0.2, 0.0], [0.0, 0.9]])).eigenvalues()
    assert hi == pytest.approx(0.9, abs=1e-15)
    assert lo == pytest.approx(0.2, abs=1e-15)
    assert hi >= lo


# --------------------------------------------------------------- validation


def test_projector_pom_is_valid():
    pom = Pom((PomElement(0.5, 0.0), PomElement(0.5, math.pi)))
    report = validate_pom(pom)
    assert report.ok
    assert report.max_residual <= 1e-12


def test_half_pi_pair_pom_is_valid():
    pom = Pom((PomElement(0.5, HALF_PI), PomElement(0.5, -HALF_PI)))
    assert validate_pom(pom).ok


def test_single_element_fails_completeness_with_residual():
    report = validate_pom(Pom((PomElement(0.5, HALF_PI),)))
    assert not report.ok
    assert not report.completeness_ok
    assert not report.constraints_ok
    assert report.completeness_residual == pytest.approx(0.5, abs=1e-12)


@given(st.integers(2, 4), st.integers(0, 10_000))
@settings(max_examples=100, deadline=None)
def test_matrix_and_scalar_validation_routes_agree(n_pairs, seed):
    pom = random_planar_pom(n_pairs, seed)
    report = validate_pom(pom)
    assert report.completeness_ok and report.constraints_ok

    # Break the first weight: both routes must now fail together.
    broken = Pom(
        (PomElement(pom[0].w * 0.8, pom[0].theta_k, pom[0].phi_k),) + pom.elements[1:]
    )
    broken_report = validate_pom(broken)
    assert not broken_report.completeness_ok
    assert not broken_report.constraints_ok


# ----------------------------------------------------------- derived states


def test_average_state_equiprobable_pair_is_maximally_mixed():
    np.testing.assert_allclose(
        _mat(average_state(make_mirror_ensemble(0.5, math.pi / 4))),
        0.5 * np.eye(2),
        atol=1e-12,
        rtol=0.0,
    )


def test_average_state_single_signal_is_plus_projector():
    np.testing.assert_allclose(
        _mat(average_state(make_mirror_ensemble(0.0, 1.1))),
        np.array([[1.0, 0.0], [0.0, 0.0]]),
        atol=1e-12,
        rtol=0.0,
    )


def test_average_state_trine_is_maximally_mixed():
    # Frozen by summing the three projectors directly.
    np.testing.assert_allclose(
        _mat(average_state(make_mirror_ensemble(1 / 3, math.pi / 3))),
        0.5 * np.eye(2),
        atol=1e-12,
        rtol=0.0,
    )


@given(st.floats(0.0, 0.5), st.floats(0.0, HALF_PI))
@settings(max_examples=100, deadline=None)
def test_average_state_unit_trace_and_psd(p, theta):
    rho = average_state(make_mirror_ensemble(p, theta))
    assert rho.trace() == pytest.approx(1.0, abs=1e-12)
    assert rho.eigenvalues()[1] >= -1e-12


def test_antiweighted_sum_trine_is_identity():
    np.testing.assert_allclose(
        _mat(antiweighted_sum(make_mirror_ensemble(1 / 3, math.pi / 3))),
        np.eye(2),
        atol=1e-12,
        rtol=0.0,
    )


def test_antiweighted_sum_equiprobable_pair_is_not_identity():
    # Frozen from the hand sum: (1/2)(rho1 + rho2) + rho3 = diag(3/2, 1/2).
    np.testing.assert_allclose(
        _mat(antiweighted_sum(make_mirror_ensemble(0.5, math.pi / 4))),
        np.array([[1.5, 0.0], [0.0, 0.5]]),
        atol=1e-12,
        rtol=0.0,
    )


def test_antiweighted_sum_single_signal_case():
    # Frozen from the direct sum: rho1 + rho2 = diag(2cos^2, 2sin^2) at p=0.
    theta = 0.7
    np.testing.assert_allclose(
        _mat(antiweighted_sum(make_mirror_ensemble(0.0, theta))),
        np.array(
            [[2 * math.cos(theta) ** 2, 0.0], [0.0, 2 * math.sin(theta) ** 2]]
        ),
        atol=1e-12,
        rtol=0.0,
    )


# ------------------------------------------------------------ serialization


def test_state_round_trips_through_json_dict():
    s = QubitState.from_amplitudes(0.6, complex(0.0, 0.8))
    assert QubitState.from_dict(s.to_dict()) == s


def test_pom_round_trips_through_json_dicts():
    pom = Pom((PomElement(0.5, HALF_PI, 0.1), PomElement(0.5, -HALF_PI, -0.1)))
    rebuilt = Pom.from_dicts(pom.to_dicts())
    assert rebuilt == pom
    for a, b in zip(pom, rebuilt):
        np.testing.assert_array_equal(_mat(a.matrix), _mat(b.matrix))
