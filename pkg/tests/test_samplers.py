import numpy as np
import pytest
from scipy.special import expit

from sw_ising.analysis.diagnostics import state_histogram, tv_distance
from sw_ising.dynamics.model import IsingModel, constant_spins, random_spins
from sw_ising.dynamics.oracle import brute_force_distribution
from sw_ising.dynamics.samplers import (
    ChainKind,
    PercolationResult,
    conditional_prob_up,
    gibbs_site_update,
    gibbs_steps,
    gibbs_sweep,
    run_chain,
    step_function,
    step_work,
    sw_assign_spins,
    sw_percolate,
    sw_step,
)
from sw_ising.graph.partitioned import PartitionedGraph


def within(frequency: float, p: float, trials: int, sigmas: float = 4.0) -> bool:
    return abs(frequency - p) <= sigmas * np.sqrt(p * (1 - p) / trials)


def test_chain_kind_parse():
    assert ChainKind.parse("sw") is ChainKind.SWENDSEN_WANG
    assert ChainKind.parse("Gibbs") is ChainKind.GIBBS
    assert ChainKind.parse("swendsen_wang") is ChainKind.SWENDSEN_WANG
    assert ChainKind.parse(ChainKind.GIBBS) is ChainKind.GIBBS
    with pytest.raises(ValueError, match="unknown chain"):
        ChainKind.parse("metropolis")
    assert step_function("sw") is sw_step
    assert step_function("gibbs") is gibbs_sweep


def test_zero_coupling_keeps_no_edges(k22, rng):
    model = IsingModel.uniform(k22, 0.0)
    perc = sw_percolate(model, constant_spins(4), rng)
    assert perc.retained_edges.size == 0
    assert perc.component_of.tolist() == [0, 1, 2, 3]
    assert perc.num_components == 4


def test_bichromatic_edges_are_never_kept(single_edge, rng):
    model = IsingModel.uniform(single_edge, 5.0)
    sigma = np.array([1, -1])
    for _ in range(200):
        assert sw_percolate(model, sigma, rng).retained_edges.size == 0


def test_monochromatic_edge_retention_frequency(single_edge, rng):
    model = IsingModel.uniform(single_edge, 0.5)
    sigma = np.array([1, 1])
    trials = 20000
    kept = sum(sw_percolate(model, sigma, rng).retained_edges.size for _ in range(trials))
    assert within(kept / trials, 1 - np.exp(-1.0), trials)


def test_component_spin_is_fair_without_field(path3, rng):
    model = IsingModel.uniform(path3, 1.0)
    perc = PercolationResult(np.array([0, 1]), np.zeros(3, dtype=np.int64))
    trials = 20000
    ups = 0
    for _ in range(trials):
        spins = sw_assign_spins(model, perc, rng)
        assert len(set(spins.tolist())) == 1
        ups += spins[0] == 1
    assert within(ups / trials, 0.5, trials)


def test_component_spin_follows_summed_field(path3, rng):
    model = IsingModel(path3, np.ones(2), np.array([0.1, -0.2, 0.3]))
    perc = PercolationResult(np.array([0, 1]), np.zeros(3, dtype=np.int64))
    trials = 20000
    ups = sum(sw_assign_spins(model, perc, rng)[0] == 1 for _ in range(trials))
    assert within(ups / trials, expit(0.4), trials)
    assert expit(0.4) == pytest.approx(0.59869, abs=1e-5)


def test_strong_field_fixes_singleton_spin(rng):
    graph = PartitionedGraph.from_edges(2, [])
    model = IsingModel(graph, np.empty(0), np.array([50.0, -50.0]))
    for _ in range(100):
        assert sw_step(model, random_spins(2, rng), rng).tolist() == [1, -1]


def test_sw_step_does_not_modify_input(k22_model, rng):
    sigma = constant_spins(4)
    before = sigma.copy()
    out = sw_step(k22_model, sigma, rng)
    assert np.array_equal(sigma, before)
    assert out is not sigma
    assert out.dtype == np.int8


def test_sw_step_without_coupling_samples_fields(path3, rng):
    gamma = np.array([0.3, -0.2, 0.0])
    model = IsingModel(path3, np.zeros(2), gamma)
    trials = 20000
    counts = np.zeros(3)
    sigma = constant_spins(3)
    for _ in range(trials):
        sigma = sw_step(model, sigma, rng)
        counts += sigma == 1
    for v in range(3):
        assert within(counts[v] / trials, expit(2 * gamma[v]), trials)


@pytest.mark.parametrize("kind", ["sw", "gibbs"])
def test_draw_count_does_not_depend_on_state(k22_model, kind):
    step = step_function(kind)
    rng_a = np.random.default_rng(99)
    rng_b = np.random.default_rng(99)
    step(k22_model, constant_spins(4, 1), rng_a)
    step(k22_model, np.array([1, -1, -1, 1]), rng_b)
    assert rng_a.bit_generator.state == rng_b.bit_generator.state


def test_conditional_probabilities():
    lonely = IsingModel(PartitionedGraph.from_edges(1, []), np.empty(0), np.array([0.5]))
    assert conditional_prob_up(lonely, np.array([1]), 0) == pytest.approx(0.73106, abs=1e-5)

    pair = IsingModel.uniform(PartitionedGraph.from_edges(2, [(0, 1)]), 1.0)
    assert conditional_prob_up(pair, np.array([1, -1]), 1) == pytest.approx(0.88080, abs=1e-5)
    assert conditional_prob_up(pair, np.array([-1, 1]), 0) == pytest.approx(0.88080, abs=1e-5)


def test_isolated_vertex_gibbs_frequency(rng):
    model = IsingModel(PartitionedGraph.from_edges(1, []), np.empty(0), np.array([0.5]))
    trials = 20000
    ups = sum(gibbs_site_update(model, np.array([-1]), 0, rng)[0] == 1 for _ in range(trials))
    assert within(ups / trials, expit(1.0), trials)


def test_gibbs_site_update_touches_only_one_site(k22_model, rng):
    sigma = np.array([1, -1, 1, -1])
    for _ in range(50):
        v = int(rng.integers(0, 4))
        out = gibbs_site_update(k22_model, sigma, v, rng)
        others = np.arange(4) != v
        assert np.array_equal(out[others], sigma[others])
    with pytest.raises(ValueError, match="outside"):
        gibbs_site_update(k22_model, sigma, 4, rng)


def test_gibbs_steps_zero_is_a_copy(k22_model, rng):
    sigma = np.array([1, -1, 1, -1])
    out = gibbs_steps(k22_model, sigma, 0, rng)
    assert np.array_equal(out, sigma)
    assert out is not sigma


def test_step_work():
    graph = PartitionedGraph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
    model = IsingModel.uniform(graph, 0.5)
    assert step_work(model, "sw") == 7.0
    assert step_work(model, "sw", k=3) == 21.0
    assert step_work(model, "gibbs", k=4) == pytest.approx(4 * (1 + 6 / 4))


def test_run_chain_zero_steps_and_errors(k22_model, rng):
    sigma = np.array([1, 1, -1, -1])
    assert np.array_equal(run_chain(k22_model, sigma, 0, "sw", rng), sigma)
    with pytest.raises(ValueError, match="steps"):
        run_chain(k22_model, sigma, -1, "sw", rng)


@pytest.mark.parametrize("kind", ["sw", "gibbs"])
def test_run_chain_is_deterministic_per_seed(k22_model, kind):
    sigma = np.array([1, 1, -1, -1])
    first = run_chain(k22_model, sigma, 50, kind, np.random.default_rng(5))
    second = run_chain(k22_model, sigma, 50, kind, np.random.default_rng(5))
    assert np.array_equal(first, second)


def test_run_chain_observer_sees_read_only_states(k22_model, rng):
    seen = []

    def observer(t, state):
        seen.append(t)
        with pytest.raises(ValueError):
            state[0] = 1

    run_chain(k22_model, constant_spins(4), 5, "sw", rng, observer)
    assert seen == [1, 2, 3, 4, 5]


@pytest.mark.parametrize("kind", ["sw", "gibbs"])
def test_chains_sample_exact_distribution(k22_model, kind):
    rng = np.random.default_rng(31)
    samples = np.empty((20000, 4), dtype=np.int8)

    def observer(t, state):
        samples[t - 1] = state

    run_chain(k22_model, random_spins(4, rng), 20000, kind, rng, observer)
    exact = brute_force_distribution(k22_model)
    assert tv_distance(state_histogram(samples, 4), exact) < 0.03


@pytest.mark.slow
@pytest.mark.parametrize("kind", ["sw", "gibbs"])
def test_long_run_matches_exact_distribution(k22_model, kind):
    rng = np.random.default_rng(77)
    steps = 100_000
    samples = np.empty((steps, 4), dtype=np.int8)

    def observer(t, state):
        samples[t - 1] = state

    run_chain(k22_model, random_spins(4, rng), steps, kind, rng, observer)
    exact = brute_force_distribution(k22_model)
    assert tv_distance(state_histogram(samples, 4), exact) < 0.01
