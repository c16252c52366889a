import numpy as np
import pytest

from sw_ising.analysis.learning import (
    TRACE_COLUMNS,
    CDConfig,
    Dataset,
    cd_learn,
    cd_learn_from_moments,
    coupling_error,
    empirical_moments,
    field_error,
    generate_dataset,
    inverse_decay,
)
from sw_ising.dynamics.model import IsingModel
from sw_ising.dynamics.oracle import exact_marginals, sample_exact
from sw_ising.graph.generators import bipartite_erdos_renyi, complete_bipartite
from sw_ising.graph.partitioned import PartitionedGraph


def exact_sampler(model, n_s, rng):
    return sample_exact(model, n_s, rng)


def test_inverse_decay():
    schedule = inverse_decay(0.5, 10.0)
    assert schedule(0) == 0.5
    assert schedule(10) == pytest.approx(0.25)
    with pytest.raises(ValueError):
        inverse_decay(0.0, 1.0)


def test_cd_config_validation():
    config = CDConfig(n_i=10, eta=inverse_decay(1.0, 5.0))
    assert config.step_size(5) == pytest.approx(0.5)
    assert CDConfig(n_i=1, eta=0.0).step_size(3) == 0.0
    with pytest.raises(ValueError, match="n_s"):
        CDConfig(n_i=10, n_s=0)
    with pytest.raises(ValueError, match="eta"):
        CDConfig(n_i=10, eta=-0.1)
    with pytest.raises(ValueError, match="k:"):
        CDConfig(n_i=10, k=1.5)


def test_dataset_validation(k22):
    with pytest.raises(ValueError, match="nonempty"):
        Dataset(np.empty((0, 4)), k22)
    with pytest.raises(ValueError, match="3 spins"):
        Dataset(np.ones((2, 3)), k22)
    with pytest.raises(ValueError, match=r"\+1 or -1"):
        Dataset(np.zeros((2, 4)), k22)


def test_empirical_moments(single_edge):
    dataset = Dataset(np.array([[1, 1], [1, -1], [-1, -1], [1, 1]]), single_edge)
    mu_v, mu_uv = empirical_moments(dataset)
    assert mu_v.tolist() == [0.5, 0.0]
    assert mu_uv.tolist() == [0.5]


def test_parameter_errors(single_edge):
    truth = IsingModel(single_edge, np.array([0.5]), np.array([0.1, -0.1]))
    assert field_error(truth, truth) == 0.0
    assert coupling_error(truth, (np.array([0.25]), np.zeros(2))) == pytest.approx(0.25)
    assert field_error(truth, (np.array([0.25]), np.zeros(2))) == pytest.approx(0.1)
    with pytest.raises(ValueError, match="mismatch"):
        field_error(truth, (np.array([0.5]), np.zeros(3)))


def test_generate_dataset_is_reproducible(k22_model):
    first = generate_dataset(k22_model, 50, 10, 2, np.random.default_rng(1))
    second = generate_dataset(k22_model, 50, 10, 2, np.random.default_rng(1))
    assert len(first) == 50
    assert first.samples.shape == (50, 4)
    assert np.array_equal(first.samples, second.samples)
    with pytest.raises(ValueError, match="thin"):
        generate_dataset(k22_model, 5, 0, 0, np.random.default_rng(1))


def test_cd_with_exact_sampler_recovers_parameters(k22_model):
    mu_v, mu_uv = exact_marginals(k22_model)
    estimate, trace = cd_learn_from_moments(
        mu_v,
        mu_uv,
        k22_model.graph,
        CDConfig(n_i=500, eta=0.2, n_s=2000),
        "sw",
        np.random.default_rng(0),
        truth=k22_model,
        sampler=exact_sampler,
    )
    assert list(trace.columns) == TRACE_COLUMNS
    assert trace["iteration"].tolist() == list(range(1, 501))
    assert (trace["work"] == 0).all()
    assert trace["field_error"].iloc[-1] < 0.05
    assert trace["coupling_error"].iloc[-1] < 0.05
    assert coupling_error(k22_model, estimate) == trace["coupling_error"].iloc[-1]


@pytest.mark.parametrize("kind, k", [("sw", 1), ("gibbs", 4)])
def test_cd_with_chains_approaches_truth(k22_model, kind, k):
    mu_v, mu_uv = exact_marginals(k22_model)
    _, trace = cd_learn_from_moments(
        mu_v,
        mu_uv,
        k22_model.graph,
        CDConfig(n_i=600, eta=0.05, k=k, n_s=100),
        kind,
        np.random.default_rng(3),
        truth=k22_model,
    )
    assert trace["coupling_error"].iloc[-1] < 0.1
    assert trace["field_error"].iloc[-1] < 0.1
    assert np.all(np.diff(trace["work"]) > 0)


def test_clamping_keeps_couplings_ferromagnetic(single_edge):
    # perfectly anti-aligned target: the coupling gradient is never positive
    mu_v, mu_uv = np.zeros(2), np.array([-1.0])
    clamped, _ = cd_learn_from_moments(
        mu_v, mu_uv, single_edge, CDConfig(n_i=50, eta=0.1, n_s=20), "gibbs", np.random.default_rng(0)
    )
    assert clamped.beta_hat.tolist() == [0.0]

    free, trace = cd_learn_from_moments(
        mu_v,
        mu_uv,
        single_edge,
        CDConfig(n_i=50, eta=0.1, n_s=20, clamp_beta=False),
        "gibbs",
        np.random.default_rng(0),
    )
    assert free.beta_hat[0] < 0
    assert trace["field_error"].isna().all()


def test_moment_shapes_are_checked(single_edge):
    with pytest.raises(ValueError, match="moments"):
        cd_learn_from_moments(
            np.zeros(3), np.zeros(1), single_edge, CDConfig(n_i=1), "sw", np.random.default_rng(0)
        )


def test_zero_step_size_leaves_estimates_at_zero(k22_model):
    dataset = generate_dataset(k22_model, 50, 10, 1, np.random.default_rng(2))
    estimate, trace = cd_learn(
        dataset, k22_model.graph, CDConfig(n_i=30, eta=0.0, n_s=5), "gibbs", np.random.default_rng(5), truth=k22_model
    )
    assert not estimate.beta_hat.any()
    assert not estimate.gamma_hat.any()
    zero = (np.zeros(4), np.zeros(4))
    assert (trace["coupling_error"] == coupling_error(k22_model, zero)).all()
    assert (trace["field_error"] == field_error(k22_model, zero)).all()


def test_cd_learn_from_dataset(k22_model):
    dataset = generate_dataset(k22_model, 200, 10, 1, np.random.default_rng(2))
    estimate, trace = cd_learn(
        dataset, k22_model.graph, CDConfig(n_i=20, n_s=10), "sw", np.random.default_rng(4), truth=k22_model
    )
    assert estimate.beta_hat.shape == (4,)
    assert estimate.gamma_hat.shape == (4,)
    assert len(trace) == 20

    other = PartitionedGraph.from_edges(4, [(0, 1)])
    with pytest.raises(ValueError, match="different graph"):
        cd_learn(dataset, other, CDConfig(n_i=1), "sw", np.random.default_rng(4))


@pytest.mark.slow
def test_cd_learning_on_bipartite_graph():
    graph = complete_bipartite(3, 3)
    rng = np.random.default_rng(10)
    truth = IsingModel(graph, rng.uniform(0, 0.4, graph.num_edges), rng.uniform(0, 0.1, 6))
    mu_v, mu_uv = exact_marginals(truth)
    for kind, k in (("sw", 1), ("gibbs", 6)):
        _, trace = cd_learn_from_moments(
            mu_v, mu_uv, graph, CDConfig(n_i=2000, eta=0.05, k=k, n_s=100), kind, rng, truth=truth
        )
        assert trace["coupling_error"].iloc[-1] < 0.08
        assert trace["field_error"].iloc[-1] < 0.08


@pytest.mark.slow
def test_sw_dataset_moments_match_exact_marginals(k22_model):
    n_samples, num_batches = 100_000, 100
    dataset = generate_dataset(k22_model, n_samples, 10, 1, np.random.default_rng(6))
    mu_v, mu_uv = empirical_moments(dataset)
    exact_v, exact_uv = exact_marginals(k22_model)

    # consecutive samples are correlated, so the standard error comes from batch means
    batches = np.split(dataset.samples.astype(np.float64), num_batches)
    u, v = k22_model.graph.edges[:, 0], k22_model.graph.edges[:, 1]
    batch_v = np.array([batch.mean(axis=0) for batch in batches])
    batch_uv = np.array([(batch[:, u] * batch[:, v]).mean(axis=0) for batch in batches])
    for estimate, exact, per_batch in ((mu_v, exact_v, batch_v), (mu_uv, exact_uv, batch_uv)):
        standard_error = per_batch.std(axis=0, ddof=1) / np.sqrt(num_batches)
        assert np.all(np.abs(estimate - exact) <= 4 * standard_error)


@pytest.mark.slow
def test_sw_cd_couplings_not_worse_than_gibbs_cd():
    # bipartite G(100, 100, p=0.02): mean degree 2, close to the ordering threshold
    # for couplings ~ Unif(0, 1); on sparser graphs Gibbs-CD is ahead
    num_seeds = 5
    sw_field, sw_coupling, gibbs_coupling = [], [], []
    for seed in range(num_seeds):
        rng = np.random.default_rng(seed)
        graph = bipartite_erdos_renyi(100, 100, 0.02, seed=rng)
        truth = IsingModel(graph, rng.uniform(0, 1, graph.num_edges), rng.uniform(0, 0.1, 200))
        dataset = generate_dataset(truth, 1000, 100, 1, rng)
        for chain_index, (kind, k) in enumerate((("sw", 1), ("gibbs", 200))):
            _, trace = cd_learn(
                dataset,
                graph,
                CDConfig(n_i=1000, eta=0.05, k=k, n_s=20),
                kind,
                np.random.default_rng([seed, chain_index]),
                truth=truth,
            )
            final = trace.iloc[-1]
            if kind == "sw":
                sw_field.append(final["field_error"])
                sw_coupling.append(final["coupling_error"])
            else:
                gibbs_coupling.append(final["coupling_error"])

    differences = np.array(sw_coupling) - np.array(gibbs_coupling)
    standard_error = differences.std(ddof=1) / np.sqrt(num_seeds)
    assert differences.mean() <= 4 * standard_error
    assert np.mean(sw_field) < 0.1
