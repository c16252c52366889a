"""
Graph utility functions: connected components, cuts and conversions.

These primitives are shared by the samplers (percolation components), the
diagnostics (cut audits, component statistics) and the tests.
"""

import logging
from typing import Iterable, Union

import networkx as nx
import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .partitioned import PartitionedGraph

logger = logging.getLogger(__name__)

VertexSubset = Union[np.ndarray, Iterable[int]]


def components(num_vertices: int, edge_subset: np.ndarray) -> np.ndarray:
    """Label the connected components of the graph (V, edge_subset).

    Labels are canonical: every vertex is labeled with the smallest vertex id
    of its component.

    Args:
        num_vertices: Number of vertices
        edge_subset: (m, 2) array of edges, endpoints < num_vertices

    Returns:
        int64 array mapping vertex -> component id

    Example:
        >>> components(3, np.array([[0, 1], [1, 2]]))
        array([0, 0, 0])
    """
    edge_subset = np.asarray(edge_subset, dtype=np.int64).reshape(-1, 2)
    vertices = np.arange(num_vertices, dtype=np.int64)
    if edge_subset.shape[0] == 0:
        return vertices

    data = np.ones(edge_subset.shape[0], dtype=np.int8)
    matrix = sp.coo_matrix(
        (data, (edge_subset[:, 0], edge_subset[:, 1])),
        shape=(num_vertices, num_vertices),
    )
    _, labels = connected_components(matrix, directed=False)

    # relabel each component by its minimum vertex
    minimum = np.full(labels.max() + 1, num_vertices, dtype=np.int64)
    np.minimum.at(minimum, labels, vertices)
    return minimum[labels]


def component_sizes(labels: np.ndarray) -> np.ndarray:
    """Size of the component each canonical id stands for (0 for non-root ids)."""
    return np.bincount(labels, minlength=labels.shape[0])


def subset_mask(num_vertices: int, subset: VertexSubset) -> np.ndarray:
    """Boolean membership mask for a vertex subset (ids or an existing mask)."""
    subset = np.asarray(list(subset) if not isinstance(subset, np.ndarray) else subset)
    if subset.dtype == bool:
        if subset.shape != (num_vertices,):
            raise ValueError(f"subset mask must have length {num_vertices}")
        return subset
    mask = np.zeros(num_vertices, dtype=bool)
    if subset.size:
        subset = subset.astype(np.int64)
        if subset.min() < 0 or subset.max() >= num_vertices:
            raise ValueError(f"subset: vertex ids must lie in [0, {num_vertices})")
        mask[subset] = True
    return mask


def cut_size(graph: PartitionedGraph, s: VertexSubset) -> int:
    """Number of edges with exactly one endpoint in ``s``.

    Args:
        graph: The graph
        s: Vertex ids or a boolean mask

    Returns:
        cut_G(S)
    """
    mask = subset_mask(graph.num_vertices, s)
    u, v = graph.edges[:, 0], graph.edges[:, 1]
    return int(np.count_nonzero(mask[u] != mask[v]))


def induced_cut_size(
    graph: PartitionedGraph, u_subset: VertexSubset, s_subset: VertexSubset
) -> int:
    """cut_{G[U]}(S): edges inside ``U`` with exactly one endpoint in ``S``."""
    in_u = subset_mask(graph.num_vertices, u_subset)
    in_s = subset_mask(graph.num_vertices, s_subset)
    if np.any(in_s & ~in_u):
        raise ValueError("s_subset must be contained in u_subset")
    u, v = graph.edges[:, 0], graph.edges[:, 1]
    inside = in_u[u] & in_u[v]
    return int(np.count_nonzero(inside & (in_s[u] != in_s[v])))


def to_networkx(graph: PartitionedGraph) -> nx.Graph:
    """Convert to a networkx graph with a ``partition`` node attribute."""
    nx_graph = nx.Graph()
    nx_graph.add_nodes_from(
        (v, {"partition": int(part)}) for v, part in enumerate(graph.partition_of)
    )
    nx_graph.add_edges_from(map(tuple, graph.edges.tolist()))
    return nx_graph
