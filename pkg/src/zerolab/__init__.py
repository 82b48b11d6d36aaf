"""zerolab: numerical laboratory for zero distributions of random polynomial ensembles."""

__version__ = "0.1.0"

from .weights import WeightSpec, make_weight, check_admissibility
from .extremal import (
    RegionSpec,
    build_evaluator,
    conjugate_profile,
    extremal_value,
    radial_equilibrium_cdf,
    reference_mass,
)
from .onb import (
    bergman_convergence_report,
    bergman_diag,
    build_onb,
    elliptic_onb,
    monomial_basis,
    multi_index_set,
    radial_moment,
)
from .ensembles import (
    CoefficientLaw,
    RngStream,
    assemble_polynomial,
    concentration_estimate,
    empirical_log_moment,
    log_moment_finite,
    sample_coefficients,
    tail_growth_diagnostic,
)
from .zeros import (
    count_zeros_argument_principle,
    count_zeros_region,
    dominance_certificate,
    find_roots_univariate,
    l1_distance_field,
    log_modulus,
    slice_volume,
)
from .stahltotik import (
    RegularMeasureSpec,
    build_recurrence_onb,
    capacity_check,
    equilibrium_mass,
    green_function,
    onp_root_asymptotic_check,
)
from .experiments import (
    ExperimentConfig,
    config_from_dict,
    load,
    persist,
    run_equidistribution,
    run_necessity,
    run_pointwise_tail,
    run_probability_convergence,
    summarize,
)
