"""
Analysis tools: the simplified SW map, empirical diagnostics and CD learning.
"""

from .simplified_sw import (
    PhasePoint,
    ThetaPair,
    Jacobian2,
    ModelScale,
    ConvergenceError,
    solve_theta,
    f_map,
    iterate_f,
    fixed_point,
    fixed_point_residual,
    jacobian_f,
    spectral_radius,
    eigenvalue_bound,
    psi,
    psi_gradient,
    psi_hessian,
    is_map_phase,
    argmax_psi_grid,
    minority_is_subcritical,
    phase_diagram,
)

from .diagnostics import (
    CoalescenceReport,
    ComponentStats,
    CutAuditResult,
    MixingEstimate,
    phase,
    run_coupled,
    coalescence_time,
    coupling_mixing_estimate,
    component_stats,
    giant_component_prediction,
    cut_audit,
    state_histogram,
    tv_distance,
)

from .learning import (
    CDConfig,
    Dataset,
    ParamEstimate,
    inverse_decay,
    empirical_moments,
    generate_dataset,
    cd_learn,
    cd_learn_from_moments,
    field_error,
    coupling_error,
)

__all__ = [
    # Simplified SW map
    "PhasePoint",
    "ThetaPair",
    "Jacobian2",
    "ModelScale",
    "ConvergenceError",
    "solve_theta",
    "f_map",
    "iterate_f",
    "fixed_point",
    "fixed_point_residual",
    "jacobian_f",
    "spectral_radius",
    "eigenvalue_bound",
    "psi",
    "psi_gradient",
    "psi_hessian",
    "is_map_phase",
    "argmax_psi_grid",
    "minority_is_subcritical",
    "phase_diagram",
    # Diagnostics
    "CoalescenceReport",
    "ComponentStats",
    "CutAuditResult",
    "MixingEstimate",
    "phase",
    "run_coupled",
    "coalescence_time",
    "coupling_mixing_estimate",
    "component_stats",
    "giant_component_prediction",
    "cut_audit",
    "state_histogram",
    "tv_distance",
    # Learning
    "CDConfig",
    "Dataset",
    "ParamEstimate",
    "inverse_decay",
    "empirical_moments",
    "generate_dataset",
    "cd_learn",
    "cd_learn_from_moments",
    "field_error",
    "coupling_error",
]
