"""Random models, sampling, and the analytic covariance."""

import numpy as np
import pytest

from cimwalk.graphs import Dag
from cimwalk.scoring import SufficientStats, score_dag
from cimwalk.simulate import (WEIGHT_HIGH, WEIGHT_LOW, SemModel,
                              SimulationError, assign_weights, make_rng,
                              population_covariance, random_dag, sample)


def _chain_model():
    dag = Dag.from_arcs(3, [(0, 1), (1, 2)])
    return SemModel(dag=dag, weights={(0, 1): 0.5, (1, 2): -0.5})


def test_random_dag_degenerate_densities():
    assert random_dag(5, 0.0, make_rng(0)).arcs() == ()
    complete = random_dag(5, 4.0, make_rng(0))
    assert len(complete.arcs()) == 10
    assert random_dag(1, 0.0, make_rng(0)).p == 1


def test_random_dag_validation():
    with pytest.raises(SimulationError):
        random_dag(0, 0.0, make_rng(0))
    with pytest.raises(SimulationError):
        random_dag(5, -0.1, make_rng(0))
    with pytest.raises(SimulationError):
        random_dag(5, 4.5, make_rng(0))


def test_random_dag_is_seed_deterministic():
    a = random_dag(8, 2.0, make_rng(123))
    b = random_dag(8, 2.0, make_rng(123))
    c = random_dag(8, 2.0, make_rng(124))
    assert a.arcs() == b.arcs()
    assert a.arcs() != c.arcs()


def test_random_dag_density_is_roughly_right():
    total = 0
    for rep in range(40):
        total += len(random_dag(20, 3.0, make_rng(1000 + rep)).arcs())
    mean_degree = 2 * total / (40 * 20)
    assert 2.5 < mean_degree < 3.5


def test_assign_weights_band_and_keys():
    dag = random_dag(8, 3.0, make_rng(5))
    model = assign_weights(dag, make_rng(6))
    assert set(model.weights) == set(dag.arcs())
    for w in model.weights.values():
        assert WEIGHT_LOW <= abs(w) <= WEIGHT_HIGH
    again = assign_weights(dag, make_rng(6))
    assert again.weights == model.weights


def test_model_validation():
    dag = Dag.from_arcs(2, [(0, 1)])
    with pytest.raises(SimulationError):
        SemModel(dag=dag, weights={})
    with pytest.raises(SimulationError):
        SemModel(dag=dag, weights={(0, 1): 0.5, (1, 0): 0.5})
    with pytest.raises(SimulationError):
        SemModel(dag=dag, weights={(0, 1): 0.1})  # below the band
    with pytest.raises(SimulationError):
        SemModel(dag=dag, weights={(0, 1): 1.5})
    with pytest.raises(SimulationError):
        SemModel(dag=dag, weights={(0, 1): 0.5}, noise_variance=0.0)


def test_sample_shape_and_determinism():
    model = _chain_model()
    data, stats = sample(model, 64, make_rng(9))
    assert data.shape == (64, 3)
    assert stats.n == 64 and stats.p == 3
    assert stats == SufficientStats.from_data(data)
    replay, _ = sample(model, 64, make_rng(9))
    assert np.array_equal(data, replay)
    with pytest.raises(SimulationError):
        sample(model, 0, make_rng(9))


def test_population_covariance_chain():
    cov = population_covariance(_chain_model())
    expected = np.array([
        [1.0, 0.5, -0.25],
        [0.5, 1.25, -0.625],
        [-0.25, -0.625, 1.3125],
    ])
    assert np.allclose(cov, expected, atol=1e-12)


def test_noise_variance_scales_covariance():
    base = _chain_model()
    doubled = SemModel(dag=base.dag, weights=base.weights, noise_variance=2.0)
    assert np.allclose(population_covariance(doubled),
                       2.0 * population_covariance(base), atol=1e-12)


def test_sample_covariance_approaches_population():
    model = _chain_model()
    _, stats = sample(model, 50_000, make_rng(21))
    assert np.allclose(stats.cov_matrix(), population_covariance(model),
                       atol=0.05)
    assert np.allclose(stats.mean, 0.0, atol=0.05)


def test_true_dag_scores_above_arc_deleted_dag():
    rng = make_rng(33)
    for _ in range(3):
        dag = random_dag(5, 2.0, rng)
        if not dag.arcs():
            continue
        model = assign_weights(dag, rng)
        stats = SufficientStats.from_covariance(
            population_covariance(model), n=10_000)
        full = score_dag(dag, stats)
        for arc in dag.arcs():
            pruned = dag.remove_arc(*arc)
            assert score_dag(pruned, stats) < full
