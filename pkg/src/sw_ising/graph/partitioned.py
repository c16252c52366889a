"""
Graph types for stochastic partitioned graphs.

This module defines the immutable ``PartitionedGraph`` that every sampler and
diagnostic runs on, and the ``GraphSpec`` describing the random model
G(n, [alpha_i], [p_ij]) it is drawn from.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

logger = logging.getLogger(__name__)

ALPHA_SUM_TOL = 1e-12


def _readonly(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


def canonical_edges(edges: np.ndarray, num_vertices: int) -> np.ndarray:
    """Bring an edge array into canonical form.

    Endpoints are ordered (smaller id first), duplicates are dropped and the
    rows are sorted lexicographically.

    Args:
        edges: Integer array of shape (m, 2)
        num_vertices: Number of vertices; endpoints must lie in [0, num_vertices)

    Returns:
        Canonical (m', 2) int64 array

    Raises:
        ValueError: On self-loops or out-of-range endpoints
    """
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if edges.size == 0:
        return np.empty((0, 2), dtype=np.int64)

    if edges.min() < 0 or edges.max() >= num_vertices:
        raise ValueError(
            f"edges: endpoints must lie in [0, {num_vertices}), "
            f"got range [{edges.min()}, {edges.max()}]"
        )
    loops = edges[:, 0] == edges[:, 1]
    if loops.any():
        vertex = int(edges[loops][0, 0])
        raise ValueError(f"edges: self-loop at vertex {vertex} is not allowed")

    ordered = np.sort(edges, axis=1)
    return np.unique(ordered, axis=0)


@dataclass(frozen=True, eq=False)
class PartitionedGraph:
    """Undirected simple graph whose vertices carry partition labels.

    Vertices are the dense ids ``0 .. num_vertices - 1``. Edges are stored in
    canonical form (see :func:`canonical_edges`) and the instance is immutable,
    so a single graph can be shared by any number of chains.

    Attributes:
        num_vertices: Number of vertices
        partition_of: Partition index per vertex
        edges: (m, 2) int64 array of canonical edges
    """

    num_vertices: int
    partition_of: np.ndarray
    edges: np.ndarray

    def __post_init__(self):
        if self.num_vertices < 0:
            raise ValueError("num_vertices must be non-negative")

        partition_of = np.asarray(self.partition_of, dtype=np.int64).copy()
        if partition_of.shape != (self.num_vertices,):
            raise ValueError(
                f"partition_of: expected {self.num_vertices} labels, "
                f"got {partition_of.shape[0] if partition_of.ndim else 0}"
            )
        if self.num_vertices and partition_of.min() < 0:
            raise ValueError("partition_of: labels must be non-negative")

        edges = canonical_edges(self.edges, self.num_vertices)
        object.__setattr__(self, "partition_of", _readonly(partition_of))
        object.__setattr__(self, "edges", _readonly(edges))

    @classmethod
    def from_edges(
        cls,
        num_vertices: int,
        edges: Sequence[Tuple[int, int]],
        partition_of: Optional[Sequence[int]] = None,
    ) -> "PartitionedGraph":
        """Build a graph from an edge sequence; all vertices in one partition if unlabeled."""
        if partition_of is None:
            partition_of = np.zeros(num_vertices, dtype=np.int64)
        return cls(num_vertices, np.asarray(partition_of), np.asarray(edges))

    @property
    def num_edges(self) -> int:
        return int(self.edges.shape[0])

    @cached_property
    def num_partitions(self) -> int:
        if self.num_vertices == 0:
            return 0
        return int(self.partition_of.max()) + 1

    @cached_property
    def partition_sizes(self) -> List[int]:
        return np.bincount(self.partition_of, minlength=self.num_partitions).tolist()

    def partition_members(self, index: int) -> np.ndarray:
        """Vertex ids belonging to partition ``index``."""
        return np.flatnonzero(self.partition_of == index)

    @cached_property
    def adjacency(self) -> sp.csr_matrix:
        """Symmetric 0/1 adjacency matrix in CSR form."""
        n = self.num_vertices
        rows = np.concatenate([self.edges[:, 0], self.edges[:, 1]])
        cols = np.concatenate([self.edges[:, 1], self.edges[:, 0]])
        data = np.ones(rows.shape[0], dtype=np.float64)
        return sp.csr_matrix((data, (rows, cols)), shape=(n, n))

    @cached_property
    def degrees(self) -> np.ndarray:
        return _readonly(
            np.bincount(self.edges.ravel(), minlength=self.num_vertices)
        )

    def __repr__(self) -> str:
        return (
            f"PartitionedGraph(num_vertices={self.num_vertices}, "
            f"num_edges={self.num_edges}, partition_sizes={self.partition_sizes})"
        )


@dataclass(frozen=True)
class GraphSpec:
    """Parameters of the random graph G(n, [alpha_i], [p_ij]).

    Attributes:
        n: Total number of vertices
        alphas: Partition fractions, each in (0, 1), summing to 1
        probs: Symmetric r x r matrix of edge probabilities in [0, 1]
    """

    n: int
    alphas: Tuple[float, ...]
    probs: Tuple[Tuple[float, ...], ...] = field(default=((0.0,),))

    def __post_init__(self):
        alphas = tuple(float(a) for a in self.alphas)
        probs = tuple(tuple(float(p) for p in row) for row in self.probs)
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "probs", probs)

        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n: expected a positive integer, got {self.n}")
        r = len(alphas)
        if r == 0:
            raise ValueError("alphas: at least one partition is required")
        if self.n < r:
            raise ValueError(f"n: {self.n} vertices cannot fill {r} partitions")
        for i, alpha in enumerate(alphas):
            # a single partition has alpha == 1
            if not (0.0 < alpha < 1.0 or (r == 1 and alpha == 1.0)):
                raise ValueError(f"alphas[{i}]: fraction {alpha} is outside (0, 1)")
        if abs(sum(alphas) - 1.0) > ALPHA_SUM_TOL:
            raise ValueError(f"alphas: fractions sum to {sum(alphas)!r}, expected 1")

        if len(probs) != r or any(len(row) != r for row in probs):
            raise ValueError(f"probs: expected a {r}x{r} matrix")
        matrix = np.array(probs)
        if not np.all((matrix >= 0.0) & (matrix <= 1.0)):
            i, j = np.argwhere((matrix < 0.0) | (matrix > 1.0))[0]
            raise ValueError(
                f"probs[{i}][{j}]: probability {matrix[i, j]} is outside [0, 1]"
            )
        if not np.array_equal(matrix, matrix.T):
            raise ValueError("probs: matrix must be symmetric")

    @property
    def num_partitions(self) -> int:
        return len(self.alphas)

    @property
    def prob_matrix(self) -> np.ndarray:
        return np.array(self.probs, dtype=np.float64)
