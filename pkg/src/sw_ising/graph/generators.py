"""
Random and deterministic generators for partitioned graphs.

All generators place partition ``i`` on a contiguous id range, in partition
order, and return graphs in canonical edge order so that the same
``(spec, seed)`` always produces the same edge list.
"""

import logging
from typing import List, Optional, Sequence, Union

import numpy as np

from .partitioned import GraphSpec, PartitionedGraph

logger = logging.getLogger(__name__)

SeedLike = Union[None, int, np.random.Generator, np.random.SeedSequence]

# Geometric draws are requested in chunks of this size at least
_MIN_CHUNK = 1024


def partition_sizes(n: int, alphas: Sequence[float]) -> List[int]:
    """Split ``n`` vertices into partitions of fractions ``alphas``.

    Each size is ``floor(alpha_i * n)``; the remaining vertices go one each to
    the partitions with the largest fractional parts (lower index wins ties).

    Args:
        n: Total number of vertices
        alphas: Partition fractions summing to 1

    Returns:
        List of partition sizes summing to ``n``
    """
    exact = np.asarray(alphas, dtype=np.float64) * n
    sizes = np.floor(exact).astype(np.int64)
    remainder = int(n - sizes.sum())
    if remainder > 0:
        order = np.argsort(-(exact - sizes), kind="stable")
        sizes[order[:remainder]] += 1
    return sizes.tolist()


def _partition_labels(sizes: Sequence[int]) -> np.ndarray:
    return np.repeat(np.arange(len(sizes), dtype=np.int64), sizes)


def _sample_positions(
    num_pairs: int, p: float, rng: np.random.Generator
) -> np.ndarray:
    """Indices of successes among ``num_pairs`` independent Bernoulli(p) trials.

    Uses geometric gaps between successes, so the cost is proportional to the
    number of successes rather than ``num_pairs``.
    """
    if num_pairs <= 0 or p <= 0.0:
        return np.empty(0, dtype=np.int64)
    if p >= 1.0:
        return np.arange(num_pairs, dtype=np.int64)

    chunks = []
    position = -1
    chunk = max(_MIN_CHUNK, int(num_pairs * p * 1.1) + 16)
    while True:
        gaps = rng.geometric(p, size=chunk)
        positions = position + np.cumsum(gaps)
        inside = positions[positions < num_pairs]
        chunks.append(inside)
        if inside.shape[0] < positions.shape[0]:
            break
        position = int(positions[-1])
    return np.concatenate(chunks).astype(np.int64)


def _within_block_pairs(
    size: int, offset: int, p: float, rng: np.random.Generator
) -> np.ndarray:
    # pairs (a, b), a < b, enumerated row by row
    num_pairs = size * (size - 1) // 2
    positions = _sample_positions(num_pairs, p, rng)
    if positions.shape[0] == 0:
        return np.empty((0, 2), dtype=np.int64)
    row_lengths = np.arange(size - 1, 0, -1, dtype=np.int64)
    row_starts = np.concatenate([[0], np.cumsum(row_lengths)[:-1]])
    a = np.searchsorted(row_starts, positions, side="right") - 1
    b = positions - row_starts[a] + a + 1
    return np.column_stack([a + offset, b + offset])


def _cross_block_pairs(
    size_i: int,
    offset_i: int,
    size_j: int,
    offset_j: int,
    p: float,
    rng: np.random.Generator,
) -> np.ndarray:
    positions = _sample_positions(size_i * size_j, p, rng)
    a, b = np.divmod(positions, size_j)
    return np.column_stack([a + offset_i, b + offset_j])


def generate_blocks(
    sizes: Sequence[int], probs: np.ndarray, seed: SeedLike = None
) -> PartitionedGraph:
    """Sample a partitioned graph with explicit partition sizes.

    Block pairs ``(i, j)`` with ``i <= j`` are visited in row-major order and
    each consumes its own run of geometric draws from one generator.

    Args:
        sizes: Partition sizes
        probs: Symmetric matrix of edge probabilities
        seed: Seed or generator

    Returns:
        PartitionedGraph
    """
    rng = np.random.default_rng(seed)
    probs = np.asarray(probs, dtype=np.float64)
    offsets = np.concatenate([[0], np.cumsum(sizes)[:-1]]).astype(np.int64)

    blocks = []
    for i, size_i in enumerate(sizes):
        for j in range(i, len(sizes)):
            p = float(probs[i, j])
            if i == j:
                block = _within_block_pairs(size_i, offsets[i], p, rng)
            else:
                block = _cross_block_pairs(
                    size_i, offsets[i], sizes[j], offsets[j], p, rng
                )
            logger.debug(f"Block ({i}, {j}): p={p}, {block.shape[0]} edges")
            blocks.append(block)

    edges = np.concatenate(blocks) if blocks else np.empty((0, 2), dtype=np.int64)
    n = int(sum(sizes))
    return PartitionedGraph(n, _partition_labels(sizes), edges)


def gen_partitioned(spec: GraphSpec, seed: SeedLike = None) -> PartitionedGraph:
    """Sample a stochastic partitioned graph G(n, [alpha_i], [p_ij]).

    Every unordered pair ``{u, v}`` with ``u`` in partition ``i`` and ``v`` in
    partition ``j`` is an edge independently with probability ``p_ij``.

    Args:
        spec: Graph model parameters (validated on construction)
        seed: Seed or generator; the result is deterministic given the seed

    Returns:
        PartitionedGraph with partitions on contiguous id ranges

    Raises:
        ValueError: If rounding leaves a partition without vertices

    Example:
        >>> spec = GraphSpec(n=1000, alphas=(0.5, 0.5),
        ...                  probs=((0.007, 0.003), (0.003, 0.007)))
        >>> graph = gen_partitioned(spec, seed=1)
    """
    sizes = partition_sizes(spec.n, spec.alphas)
    empty = [i for i, size in enumerate(sizes) if size == 0]
    if empty:
        raise ValueError(
            f"n: {spec.n} vertices leave partition {empty[0]} empty (sizes {sizes})"
        )
    graph = generate_blocks(sizes, spec.prob_matrix, seed)
    logger.info(
        f"Generated partitioned graph: {graph.num_vertices} vertices, "
        f"{graph.num_edges} edges, sizes {sizes}"
    )
    return graph


def erdos_renyi(n: int, p: float, seed: SeedLike = None) -> PartitionedGraph:
    """Erdos-Renyi graph G(n, p) as a single-partition graph."""
    return gen_partitioned(GraphSpec(n=n, alphas=(1.0,), probs=((p,),)), seed)


def bipartite_erdos_renyi(
    n: int, m: int, p: float, seed: SeedLike = None
) -> PartitionedGraph:
    """Bipartite Erdos-Renyi graph G(n, m, p) with sides of exactly n and m vertices."""
    if n < 1 or m < 1:
        raise ValueError(f"bipartite sizes must be positive, got ({n}, {m})")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p: probability {p} is outside [0, 1]")
    probs = np.array([[0.0, p], [p, 0.0]])
    return generate_blocks([n, m], probs, seed)


def complete_multipartite(sizes: Sequence[int]) -> PartitionedGraph:
    """Complete r-partite graph: every cross-partition pair is an edge."""
    if len(sizes) == 0 or min(sizes) < 1:
        raise ValueError(f"sizes: all partitions must be non-empty, got {list(sizes)}")
    r = len(sizes)
    probs = np.ones((r, r)) - np.eye(r)
    return generate_blocks(sizes, probs, seed=0)


def complete_bipartite(n: int, m: int) -> PartitionedGraph:
    """Complete bipartite graph K_{n,m}.

    Args:
        n: Size of the left partition (ids ``0 .. n-1``)
        m: Size of the right partition (ids ``n .. n+m-1``)

    Returns:
        PartitionedGraph with exactly ``n * m`` cross-partition edges
    """
    if n < 1 or m < 1:
        raise ValueError(f"complete_bipartite: sizes must be positive, got ({n}, {m})")
    left = np.repeat(np.arange(n, dtype=np.int64), m)
    right = np.tile(np.arange(n, n + m, dtype=np.int64), n)
    return PartitionedGraph(n + m, _partition_labels([n, m]), np.column_stack([left, right]))


def spec_from_dict(graph_config: dict, n: Optional[int] = None) -> GraphSpec:
    """Build a GraphSpec from the ``graph`` section of a configuration."""
    return GraphSpec(
        n=int(n if n is not None else graph_config["n"]),
        alphas=tuple(graph_config["alphas"]),
        probs=tuple(tuple(row) for row in graph_config["probs"]),
    )
