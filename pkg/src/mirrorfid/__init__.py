"""Maximum-fidelity retransmission and minimum-error discrimination for
mirror-symmetric qubit ensembles, with independent brute-force and Monte
Carlo verification."""

from .qubit_core import (
    CROSS_TOL,
    MINUS,
    PLUS,
    REPR_TOL,
    SEARCH_TOL,
    HermitianOp2,
    MirrorEnsemble,
    Pom,
    PomElement,
    PomValidation,
    PomValidationError,
    QubitState,
    antiweighted_sum,
    average_state,
    make_mirror_ensemble,
    mirror_reflect,
    outcome_probability,
    require_valid_pom,
    states_equivalent,
    validate_pom,
)
from .fidelity import (
    EigenPair2,
    NoPreferredStateError,
    PlanarConstraintError,
    RetransmitMap,
    best_fidelity_for_pom,
    eigen_decompose,
    eta,
    mirror_pair_pom,
    nu_plus_closed_form,
    o_operator,
    o_operator_closed_form,
    optimal_retransmission,
    planar_fidelity,
    q_factor,
    retransmission_half_pi,
    strategy_fidelity,
    y_half_pi,
)
from .strategy import (
    AbcCoefficients,
    RegimeTag,
    StrategyRegime,
    StrategyReport,
    abc_coefficients,
    boundary_p_closed_form,
    build_optimal_strategy,
    classify_regime,
    coefficient_margin,
    fidelity_boundary_p,
    fidelity_boundary_theta,
    fidelity_left_right,
    fidelity_up_down,
    left_right_pom,
    max_fidelity,
    regime_tag_from_margin,
    up_down_pom,
)
from .minerror import (
    MinErrorRegime,
    MinErrorReport,
    RegimeComparison,
    best_assignment_error_probability,
    error_probability,
    min_error_strategy,
    regime_comparison,
    steering_parameter,
    three_element_pom,
    two_element_pom,
    two_element_threshold,
)
from .oracle import (
    FamilyCase,
    MonteCarloResult,
    OracleResult,
    SearchMethod,
    ThreeElementFamily,
    family_scan,
    monte_carlo_fidelity,
    random_planar_pom,
    random_planar_search,
)

__version__ = "0.1.0"

__all__ = [
    "AbcCoefficients",
    "CROSS_TOL",
    "EigenPair2",
    "FamilyCase",
    "HermitianOp2",
    "MINUS",
    "MinErrorRegime",
    "MinErrorReport",
    "MirrorEnsemble",
    "MonteCarloResult",
    "NoPreferredStateError",
    "OracleResult",
    "PLUS",
    "PlanarConstraintError",
    "Pom",
    "PomElement",
    "PomValidation",
    "PomValidationError",
    "QubitState",
    "REPR_TOL",
    "RegimeComparison",
    "RegimeTag",
    "RetransmitMap",
    "SEARCH_TOL",
    "SearchMethod",
    "StrategyRegime",
    "StrategyReport",
    "ThreeElementFamily",
    "abc_coefficients",
    "antiweighted_sum",
    "average_state",
    "best_assignment_error_probability",
    "best_fidelity_for_pom",
    "boundary_p_closed_form",
    "build_optimal_strategy",
    "classify_regime",
    "coefficient_margin",
    "eigen_decompose",
    "error_probability",
    "eta",
    "family_scan",
    "fidelity_boundary_p",
    "fidelity_boundary_theta",
    "fidelity_left_right",
    "fidelity_up_down",
    "left_right_pom",
    "make_mirror_ensemble",
    "max_fidelity",
    "min_error_strategy",
    "mirror_pair_pom",
    "mirror_reflect",
    "monte_carlo_fidelity",
    "nu_plus_closed_form",
    "o_operator",
    "o_operator_closed_form",
    "optimal_retransmission",
    "outcome_probability",
    "planar_fidelity",
    "q_factor",
    "random_planar_pom",
    "random_planar_search",
    "regime_comparison",
    "regime_tag_from_margin",
    "require_valid_pom",
    "retransmission_half_pi",
    "states_equivalent",
    "steering_parameter",
    "strategy_fidelity",
    "three_element_pom",
    "two_element_pom",
    "two_element_threshold",
    "up_down_pom",
    "validate_pom",
    "y_half_pi",
]
