"""
Contrastive-divergence parameter learning for ferromagnetic Ising models.

Persistent particles are advanced by either Markov chain between gradient
updates; the gradient of the log-likelihood is the difference between the
data moments and the particle moments.
"""

import logging
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Tuple, Union

import numpy as np
import pandas as pd
from tqdm import tqdm

from ..dynamics.model import IsingModel, random_spins
from ..dynamics.samplers import ChainKind, gibbs_steps, run_chain, step_work, sw_step
from ..graph.partitioned import PartitionedGraph

logger = logging.getLogger(__name__)

StepSize = Union[float, Callable[[int], float]]
Sampler = Callable[[IsingModel, int, np.random.Generator], np.ndarray]

TRACE_COLUMNS = ["iteration", "field_error", "coupling_error", "work"]


def inverse_decay(eta0: float, tau: float) -> Callable[[int], float]:
    """Step-size schedule eta0 / (1 + i / tau)."""
    if eta0 <= 0 or tau <= 0:
        raise ValueError(f"inverse_decay: eta0 and tau must be positive, got {eta0}, {tau}")

    def schedule(i: int) -> float:
        return eta0 / (1.0 + i / tau)

    return schedule


@dataclass(frozen=True)
class CDConfig:
    """Contrastive-divergence settings.

    Attributes:
        n_i: Number of gradient updates
        eta: Constant step size or schedule ``i -> eta(i)``
        k: Chain moves per particle per update (SW steps, or Gibbs site updates)
        n_s: Number of persistent particles
        clamp_beta: Project couplings back onto beta >= 0 after every update
    """

    n_i: int
    eta: StepSize = 0.05
    k: int = 1
    n_s: int = 100
    clamp_beta: bool = True

    def __post_init__(self):
        for name in ("n_i", "k", "n_s"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ValueError(f"{name}: expected a positive integer, got {value}")
        if not callable(self.eta) and self.eta < 0:
            raise ValueError(f"eta: expected a non-negative step size, got {self.eta}")

    def step_size(self, i: int) -> float:
        value = float(self.eta(i)) if callable(self.eta) else float(self.eta)
        if value < 0:
            raise ValueError(f"eta({i}) = {value} is negative")
        return value


@dataclass(frozen=True)
class Dataset:
    """Samples of spin configurations over a fixed graph."""

    samples: np.ndarray
    graph: PartitionedGraph

    def __post_init__(self):
        samples = np.asarray(self.samples)
        if samples.ndim != 2 or samples.shape[0] == 0:
            raise ValueError("dataset: expected a nonempty (samples, vertices) matrix")
        if samples.shape[1] != self.graph.num_vertices:
            raise ValueError(
                f"dataset: samples have {samples.shape[1]} spins, "
                f"graph has {self.graph.num_vertices} vertices"
            )
        if not np.all((samples == 1) | (samples == -1)):
            raise ValueError("dataset: spins must be +1 or -1")
        object.__setattr__(self, "samples", samples.astype(np.int8, copy=False))

    def __len__(self) -> int:
        return self.samples.shape[0]


class ParamEstimate(NamedTuple):
    """Estimated couplings per edge and fields per vertex."""

    beta_hat: np.ndarray
    gamma_hat: np.ndarray


def _moments(samples: np.ndarray, graph: PartitionedGraph) -> Tuple[np.ndarray, np.ndarray]:
    spins = samples.astype(np.float64)
    edges = graph.edges
    mu_v = spins.mean(axis=0)
    mu_uv = (spins[:, edges[:, 0]] * spins[:, edges[:, 1]]).mean(axis=0)
    return mu_v, mu_uv


def empirical_moments(dataset: Dataset) -> Tuple[np.ndarray, np.ndarray]:
    """Sample means of sigma_v per vertex and sigma_u sigma_v per edge."""
    if len(dataset) == 0:
        raise ValueError("dataset is empty")
    return _moments(dataset.samples, dataset.graph)


def generate_dataset(
    model: IsingModel,
    n_samples: int,
    burn_in: int,
    thin: int,
    rng: np.random.Generator,
    kind=ChainKind.SWENDSEN_WANG,
) -> Dataset:
    """Draw a dataset by running a chain from a uniform random start.

    The chain runs ``burn_in`` steps, records a sample, and records another
    one every ``thin`` steps after that.
    """
    if n_samples < 1:
        raise ValueError(f"n_samples: expected at least 1, got {n_samples}")
    if burn_in < 0 or thin < 1:
        raise ValueError(f"burn_in must be >= 0 and thin >= 1, got {burn_in}, {thin}")

    state = run_chain(model, random_spins(model.num_vertices, rng), burn_in, kind, rng)
    samples = np.empty((n_samples, model.num_vertices), dtype=np.int8)
    samples[0] = state
    for i in range(1, n_samples):
        state = run_chain(model, state, thin, kind, rng)
        samples[i] = state

    logger.info(
        f"Generated {n_samples} samples (burn-in {burn_in}, thin {thin}) "
        f"on {model.num_vertices} vertices"
    )
    return Dataset(samples, model.graph)


def _params(obj) -> Tuple[np.ndarray, np.ndarray]:
    if isinstance(obj, IsingModel):
        return obj.beta, obj.gamma
    beta, gamma = obj
    return np.asarray(beta, dtype=np.float64), np.asarray(gamma, dtype=np.float64)


def field_error(truth, estimate) -> float:
    """Mean absolute field error sum_v |gamma_v - gamma_hat_v| / |V|."""
    _, gamma = _params(truth)
    _, gamma_hat = _params(estimate)
    if gamma.shape != gamma_hat.shape:
        raise ValueError(f"gamma: dimension mismatch {gamma.shape} vs {gamma_hat.shape}")
    return float(np.mean(np.abs(gamma - gamma_hat))) if gamma.size else 0.0


def coupling_error(truth, estimate) -> float:
    """Mean absolute coupling error sum_E |beta_uv - beta_hat_uv| / |E|."""
    beta, _ = _params(truth)
    beta_hat, _ = _params(estimate)
    if beta.shape != beta_hat.shape:
        raise ValueError(f"beta: dimension mismatch {beta.shape} vs {beta_hat.shape}")
    return float(np.mean(np.abs(beta - beta_hat))) if beta.size else 0.0


def _advance(
    model: IsingModel,
    state: np.ndarray,
    kind: ChainKind,
    k: int,
    rng: np.random.Generator,
) -> np.ndarray:
    if kind is ChainKind.SWENDSEN_WANG:
        for _ in range(k):
            state = sw_step(model, state, rng)
        return state
    return gibbs_steps(model, state, k, rng)


def cd_learn_from_moments(
    mu_v: np.ndarray,
    mu_uv: np.ndarray,
    graph: PartitionedGraph,
    config: CDConfig,
    kind,
    rng: np.random.Generator,
    truth: Optional[IsingModel] = None,
    sampler: Optional[Sampler] = None,
    progress: bool = False,
) -> Tuple[ParamEstimate, pd.DataFrame]:
    """Contrastive divergence against given target moments.

    Args:
        mu_v: Target E[sigma_v] per vertex
        mu_uv: Target E[sigma_u sigma_v] per edge
        graph: Graph whose parameters are learned
        config: CD settings
        kind: Inner chain
        rng: Generator; particle streams are spawned from it
        truth: True model, used only for the error trace
        sampler: Optional replacement for the inner chain, called as
            ``sampler(model, n_s, rng)`` and returning fresh particles
        progress: Show a progress bar

    Returns:
        (estimate, trace) where trace has columns iteration, field_error,
        coupling_error, work
    """
    kind = ChainKind.parse(kind)
    mu_v = np.asarray(mu_v, dtype=np.float64)
    mu_uv = np.asarray(mu_uv, dtype=np.float64)
    if mu_v.shape != (graph.num_vertices,) or mu_uv.shape != (graph.num_edges,):
        raise ValueError(
            f"moments: expected shapes ({graph.num_vertices},) and ({graph.num_edges},), "
            f"got {mu_v.shape} and {mu_uv.shape}"
        )

    beta_hat = np.zeros(graph.num_edges)
    gamma_hat = np.zeros(graph.num_vertices)
    particle_rngs = rng.spawn(config.n_s)
    particles = np.stack([random_spins(graph.num_vertices, r) for r in particle_rngs])

    rows = []
    work = 0.0
    iterations = tqdm(range(config.n_i), desc=f"CD ({kind.value})", disable=not progress)
    for i in iterations:
        model = IsingModel(graph, beta_hat, gamma_hat, strict=False)
        if sampler is not None:
            particles = sampler(model, config.n_s, rng)
        else:
            for s, particle_rng in enumerate(particle_rngs):
                particles[s] = _advance(model, particles[s], kind, config.k, particle_rng)
            work += config.n_s * step_work(model, kind, config.k)

        model_v, model_uv = _moments(particles, graph)
        eta = config.step_size(i)
        beta_hat = beta_hat + eta * (mu_uv - model_uv)
        gamma_hat = gamma_hat + eta * (mu_v - model_v)
        if config.clamp_beta:
            np.clip(beta_hat, 0.0, None, out=beta_hat)

        estimate = ParamEstimate(beta_hat, gamma_hat)
        rows.append(
            {
                "iteration": i + 1,
                "field_error": field_error(truth, estimate) if truth is not None else np.nan,
                "coupling_error": coupling_error(truth, estimate) if truth is not None else np.nan,
                "work": work,
            }
        )

    trace = pd.DataFrame(rows, columns=TRACE_COLUMNS)
    if truth is not None and rows:
        logger.info(
            f"CD ({kind.value}) finished {config.n_i} updates: "
            f"field error {rows[-1]['field_error']:.4f}, "
            f"coupling error {rows[-1]['coupling_error']:.4f}"
        )
    return ParamEstimate(beta_hat, gamma_hat), trace


def cd_learn(
    dataset: Dataset,
    graph: PartitionedGraph,
    config: CDConfig,
    kind,
    rng: np.random.Generator,
    truth: Optional[IsingModel] = None,
    sampler: Optional[Sampler] = None,
    progress: bool = False,
) -> Tuple[ParamEstimate, pd.DataFrame]:
    """Learn couplings and fields from a dataset by contrastive divergence.

    Couplings and fields start at 0 and particles start uniformly at random.
    Pass ``k=1`` for Swendsen-Wang and ``k=|V|`` for Gibbs to give both
    chains comparable work per update.

    Args:
        dataset: Training samples over ``graph``
        graph: Graph whose parameters are learned
        config: CD settings
        kind: Inner chain
        rng: Generator
        truth: True model for the error trace
        sampler: Optional replacement for the inner chain
        progress: Show a progress bar

    Returns:
        (ParamEstimate, per-iteration error trace)

    Example:
        >>> estimate, trace = cd_learn(dataset, graph, CDConfig(n_i=500), "sw", rng)
    """
    if dataset.graph is not graph and (
        dataset.graph.num_vertices != graph.num_vertices
        or not np.array_equal(dataset.graph.edges, graph.edges)
    ):
        raise ValueError("dataset was drawn over a different graph")
    mu_v, mu_uv = empirical_moments(dataset)
    return cd_learn_from_moments(
        mu_v, mu_uv, graph, config, kind, rng, truth=truth, sampler=sampler, progress=progress
    )
