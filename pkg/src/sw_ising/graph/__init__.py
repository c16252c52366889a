"""
Stochastic partitioned graphs.

This package provides the immutable graph type shared by every sampler,
random and deterministic generators, edge-list I/O, and the component and cut
primitives used across the library.
"""

from .partitioned import (
    PartitionedGraph,
    GraphSpec,
    canonical_edges,
)

from .generators import (
    gen_partitioned,
    generate_blocks,
    partition_sizes,
    erdos_renyi,
    bipartite_erdos_renyi,
    complete_bipartite,
    complete_multipartite,
    spec_from_dict,
)

from .loaders import (
    load_edge_list,
    write_edge_list,
    read_edge_file,
    write_edge_file,
)

from .utils import (
    components,
    component_sizes,
    cut_size,
    induced_cut_size,
    subset_mask,
    to_networkx,
)

__all__ = [
    # Types
    "PartitionedGraph",
    "GraphSpec",
    "canonical_edges",
    # Generators
    "gen_partitioned",
    "generate_blocks",
    "partition_sizes",
    "erdos_renyi",
    "bipartite_erdos_renyi",
    "complete_bipartite",
    "complete_multipartite",
    "spec_from_dict",
    # File I/O
    "load_edge_list",
    "write_edge_list",
    "read_edge_file",
    "write_edge_file",
    # Utilities
    "components",
    "component_sizes",
    "cut_size",
    "induced_cut_size",
    "subset_mask",
    "to_networkx",
]
