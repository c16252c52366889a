"""
Ferromagnetic Ising model on a partitioned graph.

The model assigns every spin configuration sigma in {-1, +1}^V the
unnormalized log-probability

    sum_{(u,v) in E} beta_uv * sigma_u * sigma_v + sum_v gamma_v * sigma_v

with per-edge couplings beta_uv >= 0 and per-vertex fields gamma_v of any sign.
Spin configurations are plain int8 numpy arrays of +1/-1.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np
import scipy.sparse as sp

from ..graph.loaders import read_edge_file, write_edge_file
from ..graph.partitioned import PartitionedGraph

logger = logging.getLogger(__name__)

SpinConfig = np.ndarray
DistSpec = Union[float, int, Dict[str, Any]]


@dataclass(frozen=True, eq=False)
class IsingModel:
    """Ising model: graph, per-edge couplings and per-vertex external fields.

    Attributes:
        graph: The underlying partitioned graph
        beta: Coupling per edge, aligned with ``graph.edges``; must be >= 0
        gamma: External field per vertex (mixed signs are accepted)
        strict: Reject negative couplings. Learning diagnostics that run
            without the ferromagnetic projection build models with
            ``strict=False``; their negative couplings percolate with
            probability 0.
    """

    graph: PartitionedGraph
    beta: np.ndarray
    gamma: np.ndarray
    strict: bool = field(default=True, repr=False)

    def __post_init__(self):
        beta = np.array(self.beta, dtype=np.float64).reshape(-1)
        gamma = np.array(self.gamma, dtype=np.float64).reshape(-1)

        if beta.shape[0] != self.graph.num_edges:
            raise ValueError(
                f"beta: expected {self.graph.num_edges} couplings, got {beta.shape[0]}"
            )
        if gamma.shape[0] != self.graph.num_vertices:
            raise ValueError(
                f"gamma: expected {self.graph.num_vertices} fields, got {gamma.shape[0]}"
            )
        if not np.all(np.isfinite(beta)):
            raise ValueError("beta: couplings must be finite")
        if not np.all(np.isfinite(gamma)):
            raise ValueError("gamma: fields must be finite")
        if self.strict and np.any(beta < 0):
            edge = int(np.flatnonzero(beta < 0)[0])
            raise ValueError(
                f"beta[{edge}]: coupling {beta[edge]} is negative; "
                f"only ferromagnetic models are supported"
            )

        beta.setflags(write=False)
        gamma.setflags(write=False)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "gamma", gamma)

    @classmethod
    def uniform(
        cls, graph: PartitionedGraph, beta: float, gamma: float = 0.0
    ) -> "IsingModel":
        """Model with the same coupling on every edge and the same field on every vertex."""
        return cls(
            graph,
            np.full(graph.num_edges, beta, dtype=np.float64),
            np.full(graph.num_vertices, gamma, dtype=np.float64),
        )

    @property
    def num_vertices(self) -> int:
        return self.graph.num_vertices

    @property
    def num_edges(self) -> int:
        return self.graph.num_edges

    @cached_property
    def percolation_probs(self) -> np.ndarray:
        """Retention probability 1 - exp(-2 beta_uv) per edge (0 for negative couplings)."""
        probs = -np.expm1(-2.0 * np.clip(self.beta, 0.0, None))
        probs.setflags(write=False)
        return probs

    @cached_property
    def coupling_matrix(self) -> sp.csr_matrix:
        """Symmetric sparse matrix W with W[u, v] = beta_uv."""
        n = self.num_vertices
        edges = self.graph.edges
        rows = np.concatenate([edges[:, 0], edges[:, 1]])
        cols = np.concatenate([edges[:, 1], edges[:, 0]])
        data = np.concatenate([self.beta, self.beta])
        matrix = sp.csr_matrix((data, (rows, cols)), shape=(n, n))
        matrix.sort_indices()
        return matrix


def validate_spins(sigma: SpinConfig, num_vertices: int) -> np.ndarray:
    """Check that ``sigma`` is a +1/-1 vector of the right length and return it as int8."""
    spins = np.asarray(sigma)
    if spins.shape != (num_vertices,):
        raise ValueError(
            f"sigma: expected {num_vertices} spins, got shape {spins.shape}"
        )
    if not np.all((spins == 1) | (spins == -1)):
        raise ValueError("sigma: spins must be +1 or -1")
    return spins.astype(np.int8, copy=False)


def constant_spins(num_vertices: int, spin: int = 1) -> SpinConfig:
    """Configuration with every spin equal to ``spin``."""
    if spin not in (1, -1):
        raise ValueError(f"spin must be +1 or -1, got {spin}")
    return np.full(num_vertices, spin, dtype=np.int8)


def random_spins(num_vertices: int, rng: np.random.Generator) -> SpinConfig:
    """Uniformly random configuration."""
    return (2 * rng.integers(0, 2, size=num_vertices) - 1).astype(np.int8)


def magnetization(sigma: SpinConfig) -> float:
    """Mean spin."""
    return float(np.mean(sigma))


def log_weight(model: IsingModel, sigma: SpinConfig) -> float:
    """Unnormalized log-probability of ``sigma``.

    Args:
        model: Ising model
        sigma: Spin configuration

    Returns:
        sum_E beta_uv sigma_u sigma_v + sum_V gamma_v sigma_v

    Example:
        >>> model = IsingModel.uniform(PartitionedGraph.from_edges(2, [(0, 1)]), 1.0)
        >>> log_weight(model, np.array([1, 1]))
        1.0
    """
    spins = validate_spins(sigma, model.num_vertices).astype(np.float64)
    edges = model.graph.edges
    pair = spins[edges[:, 0]] * spins[edges[:, 1]]
    return float(np.dot(model.beta, pair) + np.dot(model.gamma, spins))


def local_fields(model: IsingModel, sigma: SpinConfig) -> np.ndarray:
    """Per-vertex field sum_u beta_uv sigma_u + gamma_v."""
    spins = np.asarray(sigma, dtype=np.float64)
    return model.coupling_matrix @ spins + model.gamma


def percolation_prob(beta_uv: float) -> float:
    """Probability 1 - exp(-2 beta) that a monochromatic edge survives percolation."""
    if not math.isfinite(beta_uv):
        raise ValueError(f"beta: coupling must be finite, got {beta_uv}")
    if beta_uv < 0:
        raise ValueError(f"beta: coupling {beta_uv} is negative")
    return -math.expm1(-2.0 * beta_uv)


def theorem2_beta(B: float, n: int, k: float) -> float:
    """Coupling whose percolation probability is exactly B / (n sqrt(k)).

    This is the high-temperature scaling used for complete bipartite graphs of
    size (n, kn): beta = -1/2 log(1 - B / (n sqrt(k))).

    Args:
        B: Coupling scale, >= 0
        n: Size of the smaller partition
        k: Partition ratio, > 0

    Returns:
        The per-edge coupling
    """
    if B < 0:
        raise ValueError(f"B: expected a non-negative scale, got {B}")
    if n < 1:
        raise ValueError(f"n: expected a positive size, got {n}")
    if k <= 0:
        raise ValueError(f"k: expected a positive ratio, got {k}")
    p = B / (n * math.sqrt(k))
    if p >= 1.0:
        raise ValueError(f"B / (n sqrt(k)) = {p} must be < 1")
    return -0.5 * math.log1p(-p)


def draw_values(spec: DistSpec, size: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``size`` values from a distribution node of a configuration.

    Args:
        spec: A number (constant) or ``{"dist": "uniform", "lo": a, "hi": b}``
        size: Number of values
        rng: Generator

    Returns:
        float64 array
    """
    if isinstance(spec, (int, float)):
        return np.full(size, float(spec))
    if not isinstance(spec, dict) or "dist" not in spec:
        raise ValueError(f"distribution spec must be a number or a dist node, got {spec!r}")
    if spec["dist"] == "uniform":
        lo, hi = float(spec["lo"]), float(spec["hi"])
        if hi < lo:
            raise ValueError(f"uniform distribution: hi={hi} < lo={lo}")
        return rng.uniform(lo, hi, size=size)
    if spec["dist"] == "constant":
        return np.full(size, float(spec["value"]))
    raise ValueError(f"unknown distribution {spec['dist']!r}")


def sample_model(
    graph: PartitionedGraph,
    beta_dist: DistSpec,
    gamma_dist: DistSpec,
    rng: np.random.Generator,
) -> IsingModel:
    """Draw couplings then fields independently per edge/vertex and build a model."""
    beta = draw_values(beta_dist, graph.num_edges, rng)
    gamma = draw_values(gamma_dist, graph.num_vertices, rng)
    return IsingModel(graph, beta, gamma)


def load_model(path: Union[str, Path]) -> IsingModel:
    """Load a model file (edge list with a coupling column and a ``#gamma`` header).

    A missing ``#gamma`` header means zero field.
    """
    contents = read_edge_file(path, with_weights=True)
    gamma = contents.gamma
    if gamma is None:
        gamma = np.zeros(contents.graph.num_vertices)
    return IsingModel(contents.graph, contents.weights, gamma)


def save_model(
    model: IsingModel, path: Union[str, Path], comments: Optional[list] = None
) -> Path:
    """Write ``model`` in the model file format."""
    return write_edge_file(
        model.graph, path, weights=model.beta, gamma=model.gamma, comments=comments
    )
