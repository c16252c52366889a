"""
Edge-list file reading and writing.

Format: an optional ``#partitions i0 i1 ...`` header giving the partition of
every vertex, then one ``u v`` pair per line (whitespace separated). Other
lines starting with ``#`` are comments. Model files add a third column with
the coupling of each edge and a ``#gamma g0 g1 ...`` header line.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Union

import numpy as np

from .partitioned import PartitionedGraph

logger = logging.getLogger(__name__)

PARTITIONS_HEADER = "#partitions"
GAMMA_HEADER = "#gamma"


@dataclass
class EdgeListContents:
    """Raw contents of an edge-list or model file after parsing."""

    graph: PartitionedGraph
    weights: Optional[np.ndarray]
    gamma: Optional[np.ndarray]


def _parse_header_values(tokens: List[str], path: Path, lineno: int, cast):
    try:
        return [cast(token) for token in tokens]
    except ValueError:
        raise ValueError(f"{path}:{lineno}: malformed header values")


def read_edge_file(path: Union[str, Path], with_weights: bool = False) -> EdgeListContents:
    """Parse an edge-list or model file.

    Args:
        path: File to read
        with_weights: Expect a third column holding one coupling per edge

    Returns:
        EdgeListContents with the canonical graph; ``weights`` are aligned with
        ``graph.edges``.

    Raises:
        ValueError: Malformed line (message carries the line number), self-loop,
            or header/edge inconsistencies.
    """
    path = Path(path)
    columns = 3 if with_weights else 2

    partition_of: Optional[List[int]] = None
    gamma: Optional[List[float]] = None
    pairs: List[List[int]] = []
    weights: List[float] = []

    with open(path, "r") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                tokens = line.split()
                if tokens[0] == PARTITIONS_HEADER:
                    partition_of = _parse_header_values(tokens[1:], path, lineno, int)
                elif tokens[0] == GAMMA_HEADER:
                    gamma = _parse_header_values(tokens[1:], path, lineno, float)
                continue

            tokens = line.split()
            if len(tokens) != columns:
                raise ValueError(
                    f"{path}:{lineno}: expected {columns} columns, got {len(tokens)}"
                )
            try:
                u, v = int(tokens[0]), int(tokens[1])
                weight = float(tokens[2]) if with_weights else None
            except ValueError:
                raise ValueError(f"{path}:{lineno}: malformed line {line!r}")
            if u < 0 or v < 0:
                raise ValueError(f"{path}:{lineno}: negative vertex id")
            if u == v:
                raise ValueError(f"{path}:{lineno}: self-loop at vertex {u}")
            pairs.append([u, v])
            if with_weights:
                weights.append(weight)

    edges = np.array(pairs, dtype=np.int64).reshape(-1, 2)

    if partition_of is not None:
        num_vertices = len(partition_of)
        if edges.size and edges.max() >= num_vertices:
            raise ValueError(
                f"{path}: vertex id {edges.max()} exceeds the {num_vertices} "
                f"vertices declared in the partitions header"
            )
    else:
        observed = np.unique(edges) if edges.size else np.empty(0, dtype=np.int64)
        if gamma is not None:
            num_vertices = max(len(gamma), int(observed.max()) + 1 if observed.size else 0)
        elif observed.size and observed[-1] + 1 != observed.shape[0]:
            logger.warning(
                f"{path}: vertex ids are not contiguous "
                f"({observed.shape[0]} distinct ids, max {observed[-1]}); remapping densely"
            )
            edges = np.searchsorted(observed, edges)
            num_vertices = int(observed.shape[0])
        else:
            num_vertices = int(observed.shape[0])
        partition_of = [0] * num_vertices

    if gamma is not None and len(gamma) != num_vertices:
        raise ValueError(
            f"{path}: gamma header has {len(gamma)} values for {num_vertices} vertices"
        )

    # first occurrence of every unordered pair wins
    ordered = np.sort(edges, axis=1)
    _, first = np.unique(ordered, axis=0, return_index=True)
    if first.shape[0] < ordered.shape[0]:
        logger.info(f"{path}: dropped {ordered.shape[0] - first.shape[0]} duplicate edges")

    graph = PartitionedGraph(num_vertices, np.asarray(partition_of), ordered[first])
    edge_weights = None
    if with_weights:
        edge_weights = np.asarray(weights, dtype=np.float64)[first]

    logger.debug(f"Read {graph.num_edges} edges on {num_vertices} vertices from {path}")
    return EdgeListContents(
        graph=graph,
        weights=edge_weights,
        gamma=None if gamma is None else np.asarray(gamma, dtype=np.float64),
    )


def load_edge_list(path: Union[str, Path]) -> PartitionedGraph:
    """Load a graph from an edge-list file.

    Duplicate edges are collapsed, vertex-id gaps are remapped densely (with a
    logged warning) and self-loops are rejected.

    Args:
        path: Path to the edge-list file

    Returns:
        PartitionedGraph; all vertices share partition 0 unless the file has a
        ``#partitions`` header
    """
    return read_edge_file(path).graph


def write_edge_file(
    graph: PartitionedGraph,
    path: Union[str, Path],
    weights: Optional[np.ndarray] = None,
    gamma: Optional[np.ndarray] = None,
    comments: Optional[List[str]] = None,
) -> Path:
    """Write a graph (optionally with per-edge weights and per-vertex fields)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    lines = [f"# {comment}" for comment in comments or []]
    lines.append(" ".join([PARTITIONS_HEADER] + [str(p) for p in graph.partition_of]))
    if gamma is not None:
        lines.append(" ".join([GAMMA_HEADER] + [repr(float(g)) for g in gamma]))

    if weights is None:
        lines.extend(f"{u} {v}" for u, v in graph.edges.tolist())
    else:
        lines.extend(
            f"{u} {v} {float(w)!r}" for (u, v), w in zip(graph.edges.tolist(), weights)
        )

    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")

    logger.info(f"Wrote {graph.num_edges} edges to: {path}")
    return path


def write_edge_list(
    graph: PartitionedGraph,
    path: Union[str, Path],
    comments: Optional[List[str]] = None,
) -> Path:
    """Write the canonical edge list of ``graph`` (header first, sorted edges)."""
    return write_edge_file(graph, path, comments=comments)
