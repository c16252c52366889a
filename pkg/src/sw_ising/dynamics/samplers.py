"""
Swendsen-Wang and Gibbs Markov chains as pure step functions.

Every step function takes ``(model, sigma, rng)`` and returns a fresh
configuration; the input is never modified. The number of random draws per
step depends only on the model size, never on the state:

- ``sw_step`` draws one uniform per edge (canonical edge order) for
  percolation, then one uniform per vertex for spin assignment; a component
  uses the uniform at its canonical id (its smallest vertex).
- ``gibbs_sweep`` draws ``|V|`` site indices, then ``|V|`` uniforms.

Two chains driven by generators built from the same seed therefore share
their randomness draw for draw, which is the grand coupling used by
:mod:`sw_ising.analysis.diagnostics`.

Component labelling in ``sw_percolate`` builds a fresh sparse matrix over the
retained edges on every step (scipy converts it to CSR before labelling), so
each SW step allocates O(|V| + |E|) memory in addition to its O(|V| + |E|)
time. Nothing is cached between steps.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

import numpy as np
from scipy.special import expit

from ..graph.utils import components
from .model import IsingModel, SpinConfig, validate_spins

logger = logging.getLogger(__name__)

Observer = Callable[[int, SpinConfig], None]
StepFunction = Callable[[IsingModel, SpinConfig, np.random.Generator], SpinConfig]


class ChainKind(str, Enum):
    """The two supported Markov chains."""

    SWENDSEN_WANG = "sw"
    GIBBS = "gibbs"

    @classmethod
    def parse(cls, value) -> "ChainKind":
        """Accept a ChainKind, its value (``"sw"``/``"gibbs"``) or its name."""
        if isinstance(value, cls):
            return value
        text = str(value).strip().lower()
        for kind in cls:
            if text in (kind.value, kind.name.lower()):
                return kind
        raise ValueError(
            f"chain: unknown chain kind {value!r}; expected one of "
            f"{[kind.value for kind in cls]}"
        )


@dataclass(frozen=True)
class PercolationResult:
    """Outcome of the percolation half of a Swendsen-Wang step.

    Attributes:
        retained_edges: Indices into ``graph.edges`` of the kept edges
        component_of: Canonical component id (smallest member) per vertex
    """

    retained_edges: np.ndarray
    component_of: np.ndarray

    @property
    def num_components(self) -> int:
        return int(np.count_nonzero(self.component_of == np.arange(self.component_of.shape[0])))


def monochromatic_mask(model: IsingModel, sigma: SpinConfig) -> np.ndarray:
    """Boolean mask over edges whose endpoints carry the same spin."""
    edges = model.graph.edges
    return sigma[edges[:, 0]] == sigma[edges[:, 1]]


def sw_percolate(
    model: IsingModel, sigma: SpinConfig, rng: np.random.Generator
) -> PercolationResult:
    """Keep each monochromatic edge independently with probability 1 - exp(-2 beta_uv).

    One uniform is drawn for every edge, monochromatic or not, in canonical
    edge order.

    Args:
        model: Ising model
        sigma: Current configuration
        rng: Generator

    Returns:
        PercolationResult with the kept edges and the components of (V, M')
    """
    sigma = validate_spins(sigma, model.num_vertices)
    uniforms = rng.random(model.num_edges)
    kept = monochromatic_mask(model, sigma) & (uniforms < model.percolation_probs)
    retained = np.flatnonzero(kept)
    labels = components(model.num_vertices, model.graph.edges[retained])
    return PercolationResult(retained_edges=retained, component_of=labels)


def component_up_probs(model: IsingModel, component_of: np.ndarray) -> np.ndarray:
    """Probability that each component is assigned +1, indexed by canonical id.

    Entries for ids that are not component roots are meaningless.
    """
    field_sums = np.bincount(
        component_of, weights=model.gamma, minlength=model.num_vertices
    )
    return expit(2.0 * field_sums)


def sw_assign_spins(
    model: IsingModel, perc: PercolationResult, rng: np.random.Generator
) -> SpinConfig:
    """Give every component one spin: +1 with probability expit(2 * sum of its fields).

    Args:
        model: Ising model the percolation was computed for
        perc: Result of :func:`sw_percolate`
        rng: Generator

    Returns:
        New configuration
    """
    uniforms = rng.random(model.num_vertices)
    up = uniforms < component_up_probs(model, perc.component_of)
    spins = np.where(up, 1, -1).astype(np.int8)
    return spins[perc.component_of]


def sw_step(model: IsingModel, sigma: SpinConfig, rng: np.random.Generator) -> SpinConfig:
    """One Swendsen-Wang step with external fields."""
    return sw_assign_spins(model, sw_percolate(model, sigma, rng), rng)


def conditional_prob_up(model: IsingModel, sigma: SpinConfig, v: int) -> float:
    """Pr(sigma_v = +1 | all other spins)."""
    matrix = model.coupling_matrix
    start, stop = matrix.indptr[v], matrix.indptr[v + 1]
    field = float(np.dot(matrix.data[start:stop], sigma[matrix.indices[start:stop]]))
    return float(expit(2.0 * (field + model.gamma[v])))


def _site_update_in_place(
    model: IsingModel, spins: np.ndarray, v: int, uniform: float
) -> None:
    spins[v] = 1 if uniform < conditional_prob_up(model, spins, v) else -1


def gibbs_site_update(
    model: IsingModel, sigma: SpinConfig, v: int, rng: np.random.Generator
) -> SpinConfig:
    """Resample spin ``v`` from its conditional distribution.

    Args:
        model: Ising model
        sigma: Current configuration (not modified)
        v: Vertex to update
        rng: Generator; exactly one uniform is drawn

    Returns:
        New configuration that differs from ``sigma`` at most at ``v``
    """
    if not 0 <= v < model.num_vertices:
        raise ValueError(f"v: vertex {v} is outside [0, {model.num_vertices})")
    spins = validate_spins(sigma, model.num_vertices).copy()
    _site_update_in_place(model, spins, v, rng.random())
    return spins


def gibbs_steps(
    model: IsingModel, sigma: SpinConfig, k: int, rng: np.random.Generator
) -> SpinConfig:
    """Apply ``k`` random-scan single-site updates.

    The ``k`` site indices are drawn first, then ``k`` uniforms.
    """
    spins = validate_spins(sigma, model.num_vertices).copy()
    if k <= 0 or model.num_vertices == 0:
        return spins
    sites = rng.integers(0, model.num_vertices, size=k)
    uniforms = rng.random(k)
    for v, uniform in zip(sites.tolist(), uniforms.tolist()):
        _site_update_in_place(model, spins, v, uniform)
    return spins


def gibbs_sweep(model: IsingModel, sigma: SpinConfig, rng: np.random.Generator) -> SpinConfig:
    """One random-scan sweep: |V| updates at uniformly random sites."""
    return gibbs_steps(model, sigma, model.num_vertices, rng)


def step_function(kind) -> StepFunction:
    """Step function for a chain kind (one SW step or one Gibbs sweep)."""
    kind = ChainKind.parse(kind)
    if kind is ChainKind.SWENDSEN_WANG:
        return sw_step
    return gibbs_sweep


def step_work(model: IsingModel, kind, k: int = 1) -> float:
    """Work units of ``k`` chain moves: edge and neighbour touches plus vertex draws.

    An SW step touches every edge and every vertex once. A Gibbs site update
    touches the neighbours of one vertex, on average 2|E|/|V|.
    """
    kind = ChainKind.parse(kind)
    n, m = model.num_vertices, model.num_edges
    if kind is ChainKind.SWENDSEN_WANG:
        return float(k * (m + n))
    if n == 0:
        return 0.0
    return float(k * (1.0 + 2.0 * m / n))


def run_chain(
    model: IsingModel,
    sigma0: SpinConfig,
    steps: int,
    kind,
    rng: np.random.Generator,
    observer: Optional[Observer] = None,
) -> SpinConfig:
    """Run a chain for ``steps`` steps.

    Args:
        model: Ising model
        sigma0: Initial configuration (not modified)
        steps: Number of steps (SW steps or Gibbs sweeps)
        kind: Chain kind
        rng: Generator
        observer: Called as ``observer(t, state)`` after every step with a
            read-only view of the state

    Returns:
        Final configuration
    """
    if steps < 0:
        raise ValueError(f"steps: expected a non-negative count, got {steps}")
    step = step_function(kind)
    state = validate_spins(sigma0, model.num_vertices).copy()
    for t in range(1, steps + 1):
        state = step(model, state, rng)
        if observer is not None:
            view = state.view()
            view.setflags(write=False)
            observer(t, view)
    logger.debug(f"Ran {steps} {ChainKind.parse(kind).value} steps on {model.num_vertices} vertices")
    return state
