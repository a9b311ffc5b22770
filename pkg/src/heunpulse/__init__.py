"""Two-state pulse models solvable through the general Heun equation.

Enumerates the 35 admissible amplitude/detuning modulation classes, maps
them onto the general Heun equation, evaluates the Heun function
numerically, synthesizes physical field configurations from real or
complex transformations of the independent variable, analyzes pulse
geometry, and verifies every analytic solution against direct integration
of the two-state system.
"""

from .classes import (
    BasicModel,
    ClassId,
    ModelParams,
    SingularPointError,
    basic_model,
    enumerate_classes,
    finite_pulse_area,
    format_ustar,
    phi_exponents_trivial,
    real_amplitude_phase,
)
from .heun import (
    HeunParams,
    HypergeometricExpansion,
    PathError,
    ResonantRecurrenceError,
    SeriesConvergenceError,
    SeriesSolution,
    continue_polyline,
    frobenius_coefficients,
    gauss_2f1,
    heun_series,
    heun_value,
    heun_value_and_derivative,
    hypergeometric_expansion_coeffs,
    hypergeometric_expansion_value,
    hypergeometric_termination_degree,
    polynomial_roots,
    q_termination_candidates,
)
from .mapping import (
    AnalyticSolution,
    ExponentCandidates,
    ExponentChoice,
    HeunMapping,
    analytic_a1,
    analytic_a2,
    coefficient_identity_residual,
    exponent_candidates,
    first_order_identity_residual,
    heun_params,
    phase_real_interval,
)
from .fields import (
    NonMonotoneMapError,
    PulseTrace,
    RealnessError,
    TransformSpec,
    complex_line_limits,
    complex_line_params,
    crossing_classification,
    detuning_extrema,
    sample_complex_line,
    sample_constant_amplitude,
    sample_constant_detuning,
    sample_generic,
    sample_periodic,
    t_of_z,
    z_of_t,
)
from .pulseshape import (
    CrossingPolynomial,
    NarrowPulseRoot,
    PeakMetrics,
    edge_approximation,
    exponential_edge,
    lambert_w,
    matched_pair,
    narrow_pulse_roots,
    peak_metrics,
    pulse_time_origin,
    wall_positions,
)
from .dynamics import (
    Trajectory,
    VerificationReport,
    integrate_second_order,
    integrate_two_state,
    verify_class,
)

__all__ = [
    "AnalyticSolution",
    "BasicModel",
    "ClassId",
    "CrossingPolynomial",
    "ExponentCandidates",
    "ExponentChoice",
    "HeunMapping",
    "HeunParams",
    "HypergeometricExpansion",
    "ModelParams",
    "NarrowPulseRoot",
    "NonMonotoneMapError",
    "PathError",
    "PeakMetrics",
    "PulseTrace",
    "RealnessError",
    "ResonantRecurrenceError",
    "SeriesConvergenceError",
    "SeriesSolution",
    "SingularPointError",
    "Trajectory",
    "TransformSpec",
    "VerificationReport",
    "analytic_a1",
    "analytic_a2",
    "basic_model",
    "coefficient_identity_residual",
    "complex_line_limits",
    "complex_line_params",
    "continue_polyline",
    "crossing_classification",
    "detuning_extrema",
    "edge_approximation",
    "enumerate_classes",
    "exponent_candidates",
    "exponential_edge",
    "finite_pulse_area",
    "first_order_identity_residual",
    "format_ustar",
    "frobenius_coefficients",
    "gauss_2f1",
    "heun_params",
    "heun_series",
    "heun_value",
    "heun_value_and_derivative",
    "hypergeometric_expansion_coeffs",
    "hypergeometric_expansion_value",
    "hypergeometric_termination_degree",
    "integrate_second_order",
    "integrate_two_state",
    "lambert_w",
    "matched_pair",
    "narrow_pulse_roots",
    "peak_metrics",
    "phase_real_interval",
    "phi_exponents_trivial",
    "polynomial_roots",
    "pulse_time_origin",
    "q_termination_candidates",
    "real_amplitude_phase",
    "sample_complex_line",
    "sample_constant_amplitude",
    "sample_constant_detuning",
    "sample_generic",
    "sample_periodic",
    "t_of_z",
    "verify_class",
    "wall_positions",
    "z_of_t",
]

__version__ = "0.1.0"
