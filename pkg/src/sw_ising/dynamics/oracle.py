"""
Exact brute-force computations on tiny models.

Configurations are indexed by integers: bit ``v`` of the index is 1 iff
``sigma_v = +1``. All distributions are normalized with log-sum-exp.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np
from scipy.special import expit, logsumexp

from ..graph.utils import components
from .model import IsingModel, SpinConfig, validate_spins

logger = logging.getLogger(__name__)

MAX_VERTICES = 20
MAX_KERNEL_VERTICES = 10
MAX_KERNEL_MONOCHROMATIC = 14

# rows of the configuration table processed at once
_CHUNK = 1 << 14


@dataclass(frozen=True)
class ExactDistribution:
    """Exact Ising distribution over all 2^n configurations.

    Attributes:
        probabilities: Probability per configuration index
        log_partition: log Z
    """

    probabilities: np.ndarray
    log_partition: float

    @property
    def num_vertices(self) -> int:
        return int(self.probabilities.shape[0]).bit_length() - 1


def _check_size(num_vertices: int, limit: int = MAX_VERTICES) -> None:
    if num_vertices > limit:
        raise ValueError(
            f"exact enumeration supports at most {limit} vertices, got {num_vertices}"
        )


def state_index(sigma: SpinConfig) -> int:
    """Integer index of a configuration (bit v set iff sigma_v = +1)."""
    spins = np.asarray(sigma)
    bits = (spins > 0).astype(np.int64)
    return int(np.dot(bits, 1 << np.arange(spins.shape[0], dtype=np.int64)))


def state_indices(samples: np.ndarray) -> np.ndarray:
    """Vectorized :func:`state_index` over the rows of a sample matrix."""
    samples = np.atleast_2d(samples)
    weights = 1 << np.arange(samples.shape[1], dtype=np.int64)
    return (samples > 0).astype(np.int64) @ weights


def config_from_index(index: int, num_vertices: int) -> SpinConfig:
    """Configuration with the given index."""
    bits = (index >> np.arange(num_vertices, dtype=np.int64)) & 1
    return (2 * bits - 1).astype(np.int8)


def all_configurations(num_vertices: int) -> np.ndarray:
    """All 2^n configurations as an int8 matrix, row i has index i."""
    _check_size(num_vertices)
    indices = np.arange(1 << num_vertices, dtype=np.int64)
    bits = (indices[:, None] >> np.arange(num_vertices, dtype=np.int64)) & 1
    return (2 * bits - 1).astype(np.int8)


def _log_weights(model: IsingModel) -> np.ndarray:
    n = model.num_vertices
    edges = model.graph.edges
    total = 1 << n
    out = np.empty(total, dtype=np.float64)
    shifts = np.arange(n, dtype=np.int64)
    for start in range(0, total, _CHUNK):
        indices = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        spins = (2 * ((indices[:, None] >> shifts) & 1) - 1).astype(np.float64)
        pair = spins[:, edges[:, 0]] * spins[:, edges[:, 1]]
        out[start : start + indices.shape[0]] = pair @ model.beta + spins @ model.gamma
    return out


def brute_force_distribution(model: IsingModel) -> ExactDistribution:
    """Exact distribution of ``model`` by full enumeration.

    Args:
        model: Ising model with at most 20 vertices

    Returns:
        ExactDistribution indexed by configuration integer

    Raises:
        ValueError: If the model has more than 20 vertices
    """
    _check_size(model.num_vertices)
    log_weights = _log_weights(model)
    log_z = float(logsumexp(log_weights))
    probabilities = np.exp(log_weights - log_z)
    return ExactDistribution(probabilities=probabilities, log_partition=log_z)


def exact_marginals(model: IsingModel) -> Tuple[np.ndarray, np.ndarray]:
    """Exact E[sigma_v] per vertex and E[sigma_u sigma_v] per edge."""
    dist = brute_force_distribution(model)
    n = model.num_vertices
    edges = model.graph.edges
    mu_v = np.zeros(n)
    mu_uv = np.zeros(model.num_edges)
    total = 1 << n
    shifts = np.arange(n, dtype=np.int64)
    for start in range(0, total, _CHUNK):
        indices = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        spins = (2 * ((indices[:, None] >> shifts) & 1) - 1).astype(np.float64)
        probs = dist.probabilities[indices]
        mu_v += probs @ spins
        mu_uv += probs @ (spins[:, edges[:, 0]] * spins[:, edges[:, 1]])
    return mu_v, mu_uv


def sample_exact(model: IsingModel, size: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``size`` independent configurations from the exact distribution."""
    dist = brute_force_distribution(model)
    indices = rng.choice(dist.probabilities.shape[0], size=size, p=dist.probabilities)
    shifts = np.arange(model.num_vertices, dtype=np.int64)
    return (2 * ((indices[:, None] >> shifts) & 1) - 1).astype(np.int8)


def sw_transition_row(model: IsingModel, sigma: SpinConfig) -> np.ndarray:
    """Exact distribution of the next state of one SW step from ``sigma``.

    Enumerates every percolation outcome of the monochromatic edges and every
    spin assignment of the resulting components.

    Args:
        model: Ising model with at most 10 vertices
        sigma: Current configuration with at most 14 monochromatic edges

    Returns:
        Probability per next-state index

    Raises:
        ValueError: If either size bound is exceeded
    """
    n = model.num_vertices
    _check_size(n, MAX_KERNEL_VERTICES)
    sigma = validate_spins(sigma, n)
    edges = model.graph.edges
    mono = np.flatnonzero(sigma[edges[:, 0]] == sigma[edges[:, 1]])
    if mono.shape[0] > MAX_KERNEL_MONOCHROMATIC:
        raise ValueError(
            f"exact SW kernel supports at most {MAX_KERNEL_MONOCHROMATIC} "
            f"monochromatic edges, got {mono.shape[0]}"
        )

    probs = model.percolation_probs[mono]
    row = np.zeros(1 << n, dtype=np.float64)
    vertex_bits = 1 << np.arange(n, dtype=np.int64)

    for outcome in range(1 << mono.shape[0]):
        kept = ((outcome >> np.arange(mono.shape[0])) & 1).astype(bool)
        weight = float(np.prod(np.where(kept, probs, 1.0 - probs)))
        if weight == 0.0:
            continue

        labels = components(n, edges[mono[kept]])
        roots = np.unique(labels)
        # index contribution of each component when it is +1
        masks = np.bincount(labels, weights=vertex_bits, minlength=n)[roots].astype(np.int64)
        up = expit(2.0 * np.bincount(labels, weights=model.gamma, minlength=n)[roots])

        assignments = np.arange(1 << roots.shape[0], dtype=np.int64)
        chosen = (assignments[:, None] >> np.arange(roots.shape[0])) & 1
        targets = chosen @ masks
        assignment_probs = np.prod(np.where(chosen == 1, up, 1.0 - up), axis=1)
        np.add.at(row, targets, weight * assignment_probs)

    return row


def sw_transition_matrix(model: IsingModel) -> np.ndarray:
    """Full SW transition matrix, one row per configuration index."""
    n = model.num_vertices
    _check_size(n, MAX_KERNEL_VERTICES)
    matrix = np.vstack(
        [sw_transition_row(model, config_from_index(i, n)) for i in range(1 << n)]
    )
    logger.debug(f"Assembled SW kernel for {n} vertices")
    return matrix


def gibbs_site_kernel(model: IsingModel, v: int) -> np.ndarray:
    """Exact transition matrix of a single-site update at vertex ``v``."""
    n = model.num_vertices
    _check_size(n, MAX_KERNEL_VERTICES)
    if not 0 <= v < n:
        raise ValueError(f"v: vertex {v} is outside [0, {n})")

    configs = all_configurations(n).astype(np.float64)
    fields = configs @ model.coupling_matrix.toarray()[:, v] + model.gamma[v]
    p_up = expit(2.0 * fields)

    indices = np.arange(1 << n, dtype=np.int64)
    up_index = indices | (1 << v)
    down_index = indices & ~(1 << v)
    kernel = np.zeros((1 << n, 1 << n), dtype=np.float64)
    np.add.at(kernel, (indices, up_index), p_up)
    np.add.at(kernel, (indices, down_index), 1.0 - p_up)
    return kernel


def gibbs_transition_matrix(model: IsingModel) -> np.ndarray:
    """Random-scan Gibbs kernel of one site update: average of the site kernels."""
    n = model.num_vertices
    if n == 0:
        return np.ones((1, 1))
    return sum(gibbs_site_kernel(model, v) for v in range(n)) / n


def phase_distribution(model: IsingModel) -> Dict[Tuple[float, float], float]:
    """Exact distribution of the phase (alpha_L, alpha_R) on a two-partition model.

    Args:
        model: Ising model on a graph with exactly 2 partitions

    Returns:
        Mapping from phase point to probability
    """
    # avoid a circular import: diagnostics depends on samplers
    from ..analysis.diagnostics import phase
    from ..analysis.simplified_sw import PhasePoint

    graph = model.graph
    if graph.num_partitions != 2:
        raise ValueError(
            f"phase distribution requires exactly 2 partitions, got {graph.num_partitions}"
        )
    dist = brute_force_distribution(model)
    phases = phase(all_configurations(model.num_vertices), graph)

    result: Dict[Tuple[float, float], float] = {}
    for (alpha_l, alpha_r), prob in zip(phases.tolist(), dist.probabilities.tolist()):
        key = PhasePoint(float(alpha_l), float(alpha_r))
        result[key] = result.get(key, 0.0) + prob
    return result
