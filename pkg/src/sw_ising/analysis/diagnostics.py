"""
Macroscopic observables and empirical verification instruments.

Includes the phase of a configuration, grand-coupling coalescence
experiments, percolation component statistics, cut audits of random graphs
and total-variation distances against exact distributions.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Tuple, Union

import numpy as np

from ..dynamics.model import IsingModel, SpinConfig, constant_spins, random_spins, validate_spins
from ..dynamics.oracle import ExactDistribution, state_indices
from ..dynamics.samplers import ChainKind, step_function, sw_percolate
from ..graph.partitioned import PartitionedGraph
from ..graph.utils import induced_cut_size
from .simplified_sw import ModelScale, ThetaPair, solve_theta

logger = logging.getLogger(__name__)


@dataclass
class CoalescenceReport:
    """Outcome of a coupled run.

    Attributes:
        steps_to_coalesce: First step at which both chains agree, or None when censored
        censored: True if the chains never met within ``max_steps``
        trajectory: Max-norm phase distance after each step, when recorded
    """

    steps_to_coalesce: Optional[int]
    censored: bool
    max_steps: int
    trajectory: Optional[List[float]] = None

    @property
    def steps(self) -> int:
        """Steps to coalesce, or ``max_steps`` for a censored run."""
        return self.max_steps if self.censored else int(self.steps_to_coalesce)


@dataclass
class ComponentStats:
    """Component sizes after one percolation step.

    Attributes:
        giant_size_per_partition: |C_1 ∩ V_i| per partition
        giant_size: |C_1|
        sum_sq_small: Sum of squared sizes of all other components
        num_components: Number of components
    """

    giant_size_per_partition: np.ndarray
    giant_size: int
    sum_sq_small: int
    num_components: int


@dataclass
class CutAuditResult:
    """Outcome of a randomized cut audit.

    ``passed`` holds iff every sampled induced cut reached ``m_threshold * n``.
    """

    passed: bool
    min_cut_per_n: float
    witness_u: np.ndarray
    witness_s: np.ndarray
    num_trials: int
    m_threshold: float


@dataclass
class MixingEstimate:
    """Empirical coupling bound on the mixing time from random start pairs."""

    mixing_time: Optional[int]
    coalescence_steps: np.ndarray
    censored: np.ndarray
    disagreement: np.ndarray = field(repr=False)


def phase(sigma: SpinConfig, graph: PartitionedGraph) -> np.ndarray:
    """Per-partition fraction of vertices carrying the majority spin.

    The majority spin is +1 on an exact tie.

    Args:
        sigma: One configuration, or a (samples, n) matrix of configurations
        graph: Graph providing the partition labels

    Returns:
        Array of shape (num_partitions,) or (samples, num_partitions)

    Example:
        >>> graph = complete_bipartite(2, 2)
        >>> phase(np.array([1, 1, 1, -1]), graph)
        array([1. , 0.5])
    """
    spins = np.asarray(sigma)
    single = spins.ndim == 1
    spins = np.atleast_2d(spins)
    if spins.shape[1] != graph.num_vertices:
        raise ValueError(
            f"sigma: expected {graph.num_vertices} spins per row, got {spins.shape[1]}"
        )

    plus = spins > 0
    majority_up = 2 * plus.sum(axis=1) >= graph.num_vertices
    in_majority = np.where(majority_up[:, None], plus, ~plus)

    membership = np.zeros((graph.num_vertices, graph.num_partitions))
    membership[np.arange(graph.num_vertices), graph.partition_of] = 1.0
    sizes = np.asarray(graph.partition_sizes, dtype=np.float64)
    counts = in_majority.astype(np.float64) @ membership
    with np.errstate(invalid="ignore", divide="ignore"):
        fractions = np.where(sizes > 0, counts / sizes, np.nan)
    return fractions[0] if single else fractions


def _phase_distance(x: SpinConfig, y: SpinConfig, graph: PartitionedGraph) -> float:
    return float(np.max(np.abs(phase(x, graph) - phase(y, graph))))


def run_coupled(
    model: IsingModel,
    x0: SpinConfig,
    y0: SpinConfig,
    steps: int,
    kind,
    seed: Union[int, np.random.SeedSequence],
) -> Iterator[Tuple[int, SpinConfig, SpinConfig]]:
    """Run two grand-coupled chains and yield ``(t, x_t, y_t)`` after every step.

    Both chains draw from generators built from the same seed, so they
    consume identical random numbers.

    Raises:
        RuntimeError: If the chains separate after having met
    """
    step = step_function(kind)
    rng_x = np.random.default_rng(seed)
    rng_y = np.random.default_rng(seed)
    x = validate_spins(x0, model.num_vertices).copy()
    y = validate_spins(y0, model.num_vertices).copy()
    met = np.array_equal(x, y)
    for t in range(1, steps + 1):
        x = step(model, x, rng_x)
        y = step(model, y, rng_y)
        equal = np.array_equal(x, y)
        if met and not equal:
            raise RuntimeError(f"coupled chains separated at step {t} after coalescing")
        met = met or equal
        yield t, x, y


def coalescence_time(
    model: IsingModel,
    seed: Union[int, np.random.SeedSequence],
    max_steps: int,
    kind,
    record_trajectory: bool = False,
    starts: Optional[Tuple[SpinConfig, SpinConfig]] = None,
) -> CoalescenceReport:
    """Steps until two grand-coupled chains become identical.

    Args:
        model: Ising model
        seed: Shared seed of the coupled pair
        max_steps: Censoring horizon, >= 1
        kind: Chain kind
        record_trajectory: Record the max-norm phase distance after each step
        starts: Initial pair; defaults to all-(+1) and all-(-1)

    Returns:
        CoalescenceReport
    """
    if max_steps < 1:
        raise ValueError(f"max_steps: expected at least 1, got {max_steps}")
    n = model.num_vertices
    if starts is None:
        starts = (constant_spins(n, 1), constant_spins(n, -1))

    trajectory: Optional[List[float]] = [] if record_trajectory else None
    for t, x, y in run_coupled(model, starts[0], starts[1], max_steps, kind, seed):
        if trajectory is not None:
            trajectory.append(_phase_distance(x, y, model.graph))
        if np.array_equal(x, y):
            return CoalescenceReport(t, False, max_steps, trajectory)

    logger.warning(
        f"Coupled {ChainKind.parse(kind).value} chains did not meet within {max_steps} steps"
    )
    return CoalescenceReport(None, True, max_steps, trajectory)


def coupling_mixing_estimate(
    model: IsingModel,
    num_pairs: int,
    max_steps: int,
    kind,
    seed: int,
) -> MixingEstimate:
    """Estimate t -> Pr(X_t != Y_t) over random start pairs.

    Each pair starts from two independent uniform configurations and is then
    grand-coupled. The reported mixing time is the first t with
    disagreement probability at most 1/4 (None if never reached).
    """
    if num_pairs < 1:
        raise ValueError(f"num_pairs: expected at least 1, got {num_pairs}")
    n = model.num_vertices
    children = np.random.SeedSequence(seed).spawn(num_pairs)

    steps = np.empty(num_pairs, dtype=np.int64)
    censored = np.zeros(num_pairs, dtype=bool)
    for i, child in enumerate(children):
        start_seed, chain_seed = child.spawn(2)
        start_rng = np.random.default_rng(start_seed)
        x0, y0 = random_spins(n, start_rng), random_spins(n, start_rng)
        if np.array_equal(x0, y0):
            steps[i] = 0
            continue
        report = coalescence_time(model, chain_seed, max_steps, kind, starts=(x0, y0))
        steps[i] = report.steps
        censored[i] = report.censored

    times = np.arange(max_steps + 1)
    # a censored pair disagrees at every t up to the horizon
    disagreement = np.mean(
        (steps[None, :] > times[:, None]) | (censored[None, :]), axis=1
    )
    below = np.flatnonzero(disagreement <= 0.25)
    mixing_time = int(below[0]) if below.size else None
    return MixingEstimate(mixing_time, steps, censored, disagreement)


def component_stats(
    model: IsingModel, sigma: SpinConfig, rng: np.random.Generator
) -> ComponentStats:
    """Run one percolation step from ``sigma`` and summarize the component sizes."""
    perc = sw_percolate(model, sigma, rng)
    labels = perc.component_of
    sizes = np.bincount(labels, minlength=model.num_vertices)
    giant = int(np.argmax(sizes))
    giant_size = int(sizes[giant])
    per_partition = np.bincount(
        model.graph.partition_of[labels == giant],
        minlength=model.graph.num_partitions,
    )
    sum_sq = int(np.sum(sizes.astype(np.int64) ** 2))
    return ComponentStats(
        giant_size_per_partition=per_partition,
        giant_size=giant_size,
        sum_sq_small=sum_sq - giant_size**2,
        num_components=int(np.count_nonzero(sizes)),
    )


def giant_component_prediction(scale: ModelScale) -> ThetaPair:
    """Predicted giant-component fractions when every spin agrees (phase (1, 1))."""
    return solve_theta((1.0, 1.0), scale)


def cut_audit(
    graph: PartitionedGraph,
    num_trials: int,
    rng: np.random.Generator,
    m_threshold: float,
    min_side: Optional[int] = None,
) -> CutAuditResult:
    """Randomized audit of the induced-cut property.

    Each trial draws U with |U| >= n / 10 and S ⊆ U with both |S| and
    |U \\ S| at least ``min_side``, then measures cut_{G[U]}(S). The audit
    passes if every sampled cut is at least ``m_threshold * n``. This is an
    empirical check, not a proof.

    Args:
        graph: Graph to audit
        num_trials: Number of sampled (U, S) pairs
        rng: Generator
        m_threshold: The constant M
        min_side: Minimum size of S and U \\ S; defaults to ceil(M^2)

    Returns:
        CutAuditResult with the smallest observed cut / n and its witness
    """
    n = graph.num_vertices
    if num_trials < 1:
        raise ValueError(f"num_trials: expected at least 1, got {num_trials}")
    if min_side is None:
        min_side = math.ceil(m_threshold**2)
    min_side = max(int(min_side), 1)
    min_u = max(math.ceil(n / 10), 2 * min_side)
    if min_u > n:
        raise ValueError(
            f"min_side={min_side} leaves no admissible U on {n} vertices"
        )

    best = math.inf
    witness_u = witness_s = np.empty(0, dtype=np.int64)
    for trial in range(num_trials):
        u_size = int(rng.integers(min_u, n + 1))
        u_subset = np.sort(rng.choice(n, size=u_size, replace=False))
        s_size = int(rng.integers(min_side, u_size - min_side + 1))
        s_subset = np.sort(rng.choice(u_subset, size=s_size, replace=False))
        cut = induced_cut_size(graph, u_subset, s_subset)
        if cut < best:
            best = cut
            witness_u, witness_s = u_subset, s_subset

    min_cut_per_n = best / n
    passed = bool(min_cut_per_n >= m_threshold)
    logger.info(
        f"Cut audit over {num_trials} trials: min cut/n = {min_cut_per_n:.3f} "
        f"(threshold {m_threshold}) -> {'pass' if passed else 'fail'}"
    )
    return CutAuditResult(passed, min_cut_per_n, witness_u, witness_s, num_trials, m_threshold)


def state_histogram(samples: np.ndarray, num_vertices: Optional[int] = None) -> np.ndarray:
    """Counts of each configuration index among the rows of ``samples``."""
    samples = np.atleast_2d(samples)
    n = samples.shape[1] if num_vertices is None else num_vertices
    return np.bincount(state_indices(samples), minlength=1 << n)


def tv_distance(empirical, exact) -> float:
    """Total-variation distance between a histogram and an exact distribution.

    Args:
        empirical: Counts or probabilities per configuration index
        exact: ExactDistribution or probability vector of the same length

    Returns:
        1/2 sum |p - q| with both sides normalized
    """
    p = np.asarray(empirical, dtype=np.float64)
    q = exact.probabilities if isinstance(exact, ExactDistribution) else np.asarray(exact, dtype=np.float64)
    if p.shape != q.shape:
        raise ValueError(f"support size mismatch: {p.shape[0]} vs {q.shape[0]} states")
    if p.sum() <= 0:
        raise ValueError("empirical histogram is empty")
    return float(0.5 * np.abs(p / p.sum() - q / q.sum()).sum())
