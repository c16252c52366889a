"""Shared fixtures: small graphs and models that exact enumeration can handle."""

import copy

import numpy as np
import pytest

from sw_ising.config.settings import DEFAULT_CONFIG, ENV_OVERRIDES, merge_configs
from sw_ising.dynamics.model import IsingModel
from sw_ising.graph.generators import complete_bipartite
from sw_ising.graph.partitioned import PartitionedGraph


def random_small_model(
    rng: np.random.Generator,
    max_vertices: int = 6,
    max_edges: int = 8,
    beta_hi: float = 1.0,
    gamma_scale: float = 0.5,
) -> IsingModel:
    """Random model on at most ``max_vertices`` vertices and ``max_edges`` edges."""
    n = int(rng.integers(2, max_vertices + 1))
    pairs = np.array([(u, v) for u in range(n) for v in range(u + 1, n)])
    m = int(rng.integers(1, min(max_edges, len(pairs)) + 1))
    chosen = pairs[rng.choice(len(pairs), size=m, replace=False)]
    graph = PartitionedGraph.from_edges(n, chosen)
    beta = rng.uniform(0.0, beta_hi, size=graph.num_edges)
    gamma = rng.uniform(-gamma_scale, gamma_scale, size=n)
    return IsingModel(graph, beta, gamma)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def single_edge():
    return PartitionedGraph.from_edges(2, [(0, 1)])


@pytest.fixture
def path3():
    return PartitionedGraph.from_edges(3, [(0, 1), (1, 2)])


@pytest.fixture
def k22():
    return complete_bipartite(2, 2)


@pytest.fixture
def k22_model(k22):
    return IsingModel(
        k22,
        np.array([0.3, 0.1, 0.4, 0.2]),
        np.array([0.1, -0.2, 0.05, 0.15]),
    )


@pytest.fixture
def small_models():
    """Twenty random models small enough for exact transition kernels."""
    rng = np.random.default_rng(2024)
    return [random_small_model(rng) for _ in range(20)]


@pytest.fixture
def isolated_env(tmp_path, monkeypatch):
    """Working and home directory without config files or SW_ISING_* variables."""
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("HOME", str(tmp_path))
    for variable in ENV_OVERRIDES:
        monkeypatch.delenv(variable, raising=False)
    return tmp_path


@pytest.fixture
def tiny_config(tmp_path):
    """Complete configuration whose experiments finish in well under a second each."""
    return merge_configs(
        copy.deepcopy(DEFAULT_CONFIG),
        {
            "seed": 7,
            "paths": {"output_dir": str(tmp_path / "out")},
            "graph": {"n": 16, "probs": [[0.5, 0.2], [0.2, 0.5]]},
            "model": {"beta": {"dist": "uniform", "lo": 0.0, "hi": 0.5}},
            "sample": {"steps": 20, "record_every": 5},
            "mix": {"sizes": [3, 4], "B": 1.0, "chains": ["sw", "gibbs"], "num_seeds": 3, "max_steps": 500},
            "fixedpoint": {"B": [1.0, 3.0], "k": [1]},
            "learn": {"n_samples": 30, "burn_in": 5, "n_i": 4, "n_s": 3},
            "reproduce": {"x_values": [0.2, 0.6], "num_models": 2, "max_n": 16},
        },
    )
