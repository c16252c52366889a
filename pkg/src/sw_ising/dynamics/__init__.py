"""
Ising model, Markov chains and exact oracles.

This package contains the ferromagnetic Ising model type, the Swendsen-Wang
and Gibbs step functions, and brute-force computations on tiny models that
serve as ground truth for the stochastic code.
"""

from .model import (
    IsingModel,
    SpinConfig,
    validate_spins,
    random_spins,
    constant_spins,
    magnetization,
    log_weight,
    local_fields,
    percolation_prob,
    theorem2_beta,
    draw_values,
    sample_model,
    load_model,
    save_model,
)

from .samplers import (
    ChainKind,
    PercolationResult,
    sw_percolate,
    sw_assign_spins,
    sw_step,
    conditional_prob_up,
    gibbs_site_update,
    gibbs_steps,
    gibbs_sweep,
    step_function,
    step_work,
    run_chain,
)

from .oracle import (
    ExactDistribution,
    brute_force_distribution,
    exact_marginals,
    sample_exact,
    sw_transition_row,
    sw_transition_matrix,
    gibbs_site_kernel,
    gibbs_transition_matrix,
    phase_distribution,
    state_index,
    state_indices,
    config_from_index,
    all_configurations,
)

__all__ = [
    # Model
    "IsingModel",
    "SpinConfig",
    "validate_spins",
    "random_spins",
    "constant_spins",
    "magnetization",
    "log_weight",
    "local_fields",
    "percolation_prob",
    "theorem2_beta",
    "draw_values",
    "sample_model",
    "load_model",
    "save_model",
    # Samplers
    "ChainKind",
    "PercolationResult",
    "sw_percolate",
    "sw_assign_spins",
    "sw_step",
    "conditional_prob_up",
    "gibbs_site_update",
    "gibbs_steps",
    "gibbs_sweep",
    "step_function",
    "step_work",
    "run_chain",
    # Oracle
    "ExactDistribution",
    "brute_force_distribution",
    "exact_marginals",
    "sample_exact",
    "sw_transition_row",
    "sw_transition_matrix",
    "gibbs_site_kernel",
    "gibbs_transition_matrix",
    "phase_distribution",
    "state_index",
    "state_indices",
    "config_from_index",
    "all_configurations",
]
