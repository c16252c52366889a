"""
SW-Ising: Swendsen-Wang and Gibbs dynamics for ferromagnetic Ising models.

This package provides tools for:
- Generating stochastic partitioned graphs and complete bipartite graphs
- Sampling Ising models with the Swendsen-Wang and Gibbs chains
- Checking samplers against exact brute-force distributions on tiny models
- Analyzing the simplified Swendsen-Wang map on complete bipartite graphs
- Measuring empirical mixing through grand-coupling coalescence
- Learning model parameters by contrastive divergence

Key modules:
- graph: Graph types, generators and edge-list I/O
- dynamics: Ising model, Markov chains and exact oracles
- analysis: Simplified SW map, diagnostics and learning
- experiments: Config-driven runners behind the CLI
- config: Configuration management
"""

try:
    from ._version import __version__
except ImportError:
    # Fallback for development installations
    try:
        from setuptools_scm import get_version
        __version__ = get_version(root='../..', relative_to=__file__)
    except ImportError:
        __version__ = "unknown"

__author__ = "SW-Ising Contributors"


from sw_ising.graph import (
    PartitionedGraph,
    GraphSpec,
    gen_partitioned,
    complete_bipartite,
    load_edge_list,
    write_edge_list,
)

from sw_ising.dynamics import (
    IsingModel,
    ChainKind,
    sw_step,
    gibbs_sweep,
    run_chain,
    brute_force_distribution,
)

from sw_ising.analysis import (
    ModelScale,
    fixed_point,
    coalescence_time,
    cd_learn,
    CDConfig,
)

from sw_ising.config.settings import (
    load_config,
    get_config_summary,
)

# Also import modules for advanced users
from sw_ising.dynamics import samplers, oracle
from sw_ising.analysis import simplified_sw, diagnostics, learning

__all__ = [
    # Graphs
    "PartitionedGraph",
    "GraphSpec",
    "gen_partitioned",
    "complete_bipartite",
    "load_edge_list",
    "write_edge_list",
    # Model and chains
    "IsingModel",
    "ChainKind",
    "sw_step",
    "gibbs_sweep",
    "run_chain",
    "brute_force_distribution",
    # Analysis
    "ModelScale",
    "fixed_point",
    "coalescence_time",
    "cd_learn",
    "CDConfig",
    # Configuration
    "load_config",
    "get_config_summary",
    # Modules for advanced users
    "samplers",
    "oracle",
    "simplified_sw",
    "diagnostics",
    "learning",
]
