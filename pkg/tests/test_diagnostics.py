import numpy as np
import pytest

from sw_ising.analysis.diagnostics import (
    coalescence_time,
    component_stats,
    coupling_mixing_estimate,
    cut_audit,
    giant_component_prediction,
    phase,
    run_coupled,
    state_histogram,
    tv_distance,
)
from sw_ising.analysis.simplified_sw import ModelScale
from sw_ising.dynamics.model import IsingModel, constant_spins, theorem2_beta
from sw_ising.dynamics.oracle import brute_force_distribution, sample_exact
from sw_ising.dynamics.samplers import run_chain
from sw_ising.graph.generators import complete_bipartite, erdos_renyi
from sw_ising.graph.partitioned import PartitionedGraph

THETA_STAR = 0.7968121


def test_phase_examples(k22):
    assert phase(np.array([1, 1, 1, -1]), k22).tolist() == [1.0, 0.5]
    # exact tie: +1 is the majority
    assert phase(np.array([1, -1, 1, -1]), k22).tolist() == [0.5, 0.5]
    assert phase(np.array([-1, -1, -1, 1]), k22).tolist() == [1.0, 0.5]


def test_phase_of_sample_matrix(k22):
    samples = np.array([[1, 1, 1, 1], [-1, -1, 1, -1], [1, 1, -1, -1]])
    assert phase(samples, k22).tolist() == [[1.0, 1.0], [1.0, 0.5], [1.0, 0.0]]
    with pytest.raises(ValueError, match="spins per row"):
        phase(np.ones(3), k22)


def test_sw_from_extremal_starts_meets_after_one_step(k22_model):
    for seed in range(10):
        report = coalescence_time(k22_model, seed, 100, "sw")
        assert not report.censored
        assert report.steps_to_coalesce == 1


def test_gibbs_coalescence_and_trajectory():
    model = IsingModel.uniform(complete_bipartite(3, 3), 0.2)
    report = coalescence_time(model, 4, 10_000, "gibbs", record_trajectory=True)
    assert not report.censored
    assert report.steps == report.steps_to_coalesce
    assert len(report.trajectory) == report.steps
    assert report.trajectory[-1] == 0.0


def test_censored_run_reports_horizon(caplog):
    model = IsingModel.uniform(complete_bipartite(5, 5), 2.0)
    report = coalescence_time(model, 0, 1, "gibbs")
    assert report.censored
    assert report.steps_to_coalesce is None
    assert report.steps == 1
    assert "did not meet" in caplog.text
    with pytest.raises(ValueError, match="max_steps"):
        coalescence_time(model, 0, 0, "gibbs")


def test_grand_coupled_gibbs_preserves_order():
    graph = complete_bipartite(4, 4)
    model = IsingModel(graph, np.full(graph.num_edges, 0.3), np.linspace(-0.2, 0.2, 8))
    top, bottom = constant_spins(8, 1), constant_spins(8, -1)
    for _, x, y in run_coupled(model, top, bottom, 200, "gibbs", seed=17):
        assert np.all(x >= y)


def test_coupled_chains_stay_together_once_met(k22_model):
    start = constant_spins(4)
    for _, x, y in run_coupled(k22_model, start, start, 50, "gibbs", seed=3):
        assert np.array_equal(x, y)


def test_coupling_mixing_estimate(k22_model):
    estimate = coupling_mixing_estimate(k22_model, num_pairs=50, max_steps=200, kind="gibbs", seed=8)
    assert estimate.mixing_time is not None
    assert estimate.coalescence_steps.shape == (50,)
    assert not estimate.censored.any()
    assert np.all(np.diff(estimate.disagreement) <= 0)
    assert estimate.disagreement[estimate.mixing_time] <= 0.25
    with pytest.raises(ValueError, match="num_pairs"):
        coupling_mixing_estimate(k22_model, 0, 10, "sw", 0)


def test_component_stats_without_coupling(rng):
    graph = complete_bipartite(5, 5)
    stats = component_stats(IsingModel.uniform(graph, 0.0), constant_spins(10), rng)
    assert stats.giant_size == 1
    assert stats.num_components == 10
    assert stats.sum_sq_small == 9
    assert stats.giant_size_per_partition.sum() == 1


def test_component_stats_fully_coupled(rng):
    graph = complete_bipartite(5, 5)
    stats = component_stats(IsingModel.uniform(graph, 50.0), constant_spins(10), rng)
    assert stats.giant_size == 10
    assert stats.giant_size_per_partition.tolist() == [5, 5]
    assert stats.sum_sq_small == 0


def test_giant_component_prediction_at_full_order():
    theta = giant_component_prediction(ModelScale(2.0))
    assert theta.theta_L == pytest.approx(THETA_STAR, abs=1e-7)


def _mean_giant_fraction(n: int, num_seeds: int) -> float:
    graph = complete_bipartite(n, n)
    model = IsingModel.uniform(graph, theorem2_beta(2.0, n, 1.0))
    fractions = []
    for seed in range(num_seeds):
        stats = component_stats(model, constant_spins(2 * n), np.random.default_rng(seed))
        fractions.append(stats.giant_size_per_partition[0] / n)
    return float(np.mean(fractions))


def test_giant_component_matches_prediction():
    assert _mean_giant_fraction(500, 5) == pytest.approx(THETA_STAR, abs=0.05)


@pytest.mark.slow
def test_giant_component_matches_prediction_at_scale():
    assert _mean_giant_fraction(2000, 10) == pytest.approx(THETA_STAR, abs=0.02)


def test_small_components_grow_linearly_with_size():
    normalized = {}
    for n in (250, 1000):
        graph = complete_bipartite(n, n)
        model = IsingModel.uniform(graph, theorem2_beta(2.0, n, 1.0))
        values = [
            component_stats(model, constant_spins(2 * n), np.random.default_rng(seed)).sum_sq_small / (2 * n)
            for seed in range(10)
        ]
        normalized[n] = float(np.mean(values))
    assert normalized[1000] < 2.0
    assert normalized[1000] <= 1.5 * normalized[250]


def test_cut_audit_passes_on_dense_random_graph():
    graph = erdos_renyi(1000, 0.5, seed=21)
    result = cut_audit(graph, 20, np.random.default_rng(5), m_threshold=10.0, min_side=250)
    assert result.passed
    assert result.min_cut_per_n >= 10.0
    assert result.num_trials == 20
    assert set(result.witness_s.tolist()) <= set(result.witness_u.tolist())


def test_cut_audit_fails_without_edges(rng):
    graph = PartitionedGraph.from_edges(100, [])
    result = cut_audit(graph, 5, rng, m_threshold=1.0)
    assert not result.passed
    assert result.min_cut_per_n == 0.0


def test_cut_audit_rejects_impossible_sides(rng):
    graph = PartitionedGraph.from_edges(10, [])
    with pytest.raises(ValueError, match="no admissible U"):
        cut_audit(graph, 5, rng, m_threshold=1.0, min_side=6)
    with pytest.raises(ValueError, match="num_trials"):
        cut_audit(graph, 0, rng, m_threshold=1.0)


def test_tv_distance(k22_model, rng):
    exact = brute_force_distribution(k22_model)
    assert tv_distance(exact.probabilities * 1000, exact) == pytest.approx(0.0, abs=1e-12)

    samples = sample_exact(k22_model, 20000, rng)
    histogram = state_histogram(samples, 4)
    assert histogram.sum() == 20000
    assert tv_distance(histogram, exact) < 0.03

    with pytest.raises(ValueError, match="mismatch"):
        tv_distance(np.ones(8), exact)
    with pytest.raises(ValueError, match="empty"):
        tv_distance(np.zeros(16), exact)


@pytest.mark.slow
def test_sw_coalescence_does_not_grow_with_size():
    medians = {}
    for n in (50, 400):
        model = IsingModel.uniform(complete_bipartite(n, n), theorem2_beta(4.0, n, 1.0))
        steps = [coalescence_time(model, seed, 10_000, "sw").steps for seed in range(20)]
        medians[n] = float(np.median(steps))
    assert medians[400] <= 60
    assert medians[400] / medians[50] <= 3


@pytest.mark.slow
def test_gibbs_stays_apart_where_sw_coalesces():
    # K_{200,200} at B=4: ordered, so Gibbs from the extremal starts cannot cross over
    model = IsingModel.uniform(complete_bipartite(200, 200), theorem2_beta(4.0, 200, 1.0))
    assert coalescence_time(model, 0, 10_000, "gibbs").censored
    assert not coalescence_time(model, 0, 10_000, "sw").censored


@pytest.mark.slow
@pytest.mark.parametrize("kind", ["sw", "gibbs"])
def test_coupled_chain_has_solo_chain_distribution(k22_model, kind):
    steps = 100_000
    plus, minus = constant_spins(4, 1), constant_spins(4, -1)
    coupled = np.empty((steps, 4), dtype=np.int8)
    for t, _, y in run_coupled(k22_model, plus, minus, steps, kind, seed=31):
        coupled[t - 1] = y

    solo = np.empty((steps, 4), dtype=np.int8)

    def record(t, state):
        solo[t - 1] = state

    run_chain(k22_model, minus, steps, kind, np.random.default_rng(32), observer=record)
    assert tv_distance(state_histogram(coupled, 4), state_histogram(solo, 4)) < 0.02
