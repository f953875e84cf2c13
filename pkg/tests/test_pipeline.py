import numpy as np
import pytest

from essns.firesim import SpreadModel, simulate
from essns.fitness import jaccard_fitness
from essns.landscape import FireMap, GridSpec, Scenario, burned_at
from essns.novelty import NsGaParams
from essns.pipeline import (PipelineConfig, ProbabilityMatrix, accumulate_fire_lines,
                            aggregate_probability, candidate_thresholds, run_pipeline, run_step,
                            search_kign, threshold_matrix)

G2 = GridSpec(2, 2)
REF = Scenario(5, 10, 270, 5, 6, 8, 60, 0, 0)


def pm(values, grid=G2):
    return ProbabilityMatrix(grid, np.array(values, dtype=float).reshape(grid.shape))


def test_aggregate_single_map():
    m = FireMap.from_cells(G2, [(0, 1)])
    assert np.array_equal(aggregate_probability([m]).prob, m.burned.astype(float))


def test_aggregate_counts():
    maps = [FireMap.from_cells(G2, cells) for cells in ([(0, 0)], [(0, 0)], [(0, 0), (1, 1)], [])]
    assert aggregate_probability(maps).prob.tolist() == [[0.75, 0.0], [0.0, 0.25]]


def test_aggregate_errors():
    with pytest.raises(ValueError):
        aggregate_probability([])
    with pytest.raises(ValueError):
        aggregate_probability([FireMap.empty(G2), FireMap.empty(GridSpec(3, 3))])


def test_aggregate_bounds(rng):
    grid = GridSpec(6, 5)
    maps = [FireMap(grid, rng.random(grid.shape) < 0.5) for _ in range(7)]
    prob = aggregate_probability(maps).prob
    stack = np.stack([m.burned for m in maps])
    assert np.all(stack.min(axis=0) <= prob) and np.all(prob <= stack.max(axis=0))


def test_threshold_examples():
    m = pm([0.25, 0.5, 0.75, 1.0])
    assert threshold_matrix(m, 0.6).burned.tolist() == [[False, False], [True, True]]
    assert threshold_matrix(pm([0.2, 0.3, 0, 0]), 0.5).n_burned == 0
    assert threshold_matrix(pm([0.2, 0.3, 0, 0.9]), 0.2).n_burned == 3


@pytest.mark.parametrize("bad", [0.0, -0.1, 1.01])
def test_threshold_domain(bad):
    with pytest.raises(ValueError):
        threshold_matrix(pm([0.5] * 4), bad)


def test_threshold_antitone(rng):
    m = ProbabilityMatrix(GridSpec(5, 5), rng.integers(0, 9, (5, 5)) / 8)
    levels = np.linspace(0.01, 1.0, 50)
    for lo, hi in zip(levels, levels[1:]):
        assert threshold_matrix(m, hi).issubset(threshold_matrix(m, lo))


def test_candidates():
    assert candidate_thresholds(pm([0.0, 0.5, 0.5, 0.25])).tolist() == [1.0, 0.5, 0.25]


def test_search_kign_consensus():
    real = FireMap.from_cells(G2, [(0, 0), (1, 1)])
    k, f = search_kign(ProbabilityMatrix(G2, real.burned), real, FireMap.empty(G2))
    assert (k, f) == (1.0, 1.0)


def test_search_kign_no_information():
    real = FireMap.from_cells(G2, [(0, 0)])
    assert search_kign(pm([0, 0, 0, 0]), real, FireMap.empty(G2)) == (1.0, 0.0)


def test_search_kign_worked_example():
    real = FireMap.from_cells(G2, [(0, 0), (0, 1), (1, 0)])
    assert search_kign(pm([1.0, 0.5, 0.5, 0.0]), real, FireMap.empty(G2)) == (0.5, 1.0)


def test_search_kign_ties_pick_largest():
    # thresholds 1.0 and 0.5 both give fitness 0.5
    real = FireMap.from_cells(G2, [(0, 0), (0, 1)])
    matrix = pm([1.0, 0.0, 0.5, 0.0])
    assert search_kign(matrix, real, FireMap.empty(G2)) == (1.0, 0.5)


def test_search_kign_is_optimal(rng):
    grid = GridSpec(6, 6)
    for _ in range(50):
        matrix = ProbabilityMatrix(grid, rng.integers(0, 6, grid.shape) / 5)
        real = FireMap(grid, rng.random(grid.shape) < 0.4)
        pre = FireMap(grid, rng.random(grid.shape) < 0.2)
        k, f = search_kign(matrix, real, pre)
        assert f == jaccard_fitness(real, threshold_matrix(matrix, k), pre)
        for c in np.linspace(1e-6, 1.0, 400):
            assert jaccard_fitness(real, threshold_matrix(matrix, c), pre) <= f


def test_accumulate_fire_lines():
    a = FireMap.from_cells(G2, [(0, 0)])
    b = FireMap.from_cells(G2, [(1, 1)])
    out = accumulate_fire_lines([a, b])
    assert out[1].burned.tolist() == [[True, False], [False, True]]


GRID = GridSpec(32, 32, 30.0)
SMALL_GA = NsGaParams(population_size=8, max_generations=6)


def synthetic_truth(n, dt=40.0):
    ign = FireMap.from_cells(GRID, [(16, 16)])
    t = simulate(GRID, SpreadModel(), REF, ign, n * dt)
    return [burned_at(t, i * dt) for i in range(n)]


def test_first_step_has_no_prediction():
    truth = synthetic_truth(2)
    r = run_step(1, truth[0], truth[1], None, PipelineConfig(delta_t=40.0, ga=SMALL_GA))
    assert not r.has_prediction and r.prediction_fitness is None
    assert 0 < r.kign <= 1 and 0 <= r.calibration_fitness <= 1
    assert 1 <= r.generations_used <= 6


def test_run_step_rejects_empty_start():
    truth = synthetic_truth(2)
    with pytest.raises(ValueError):
        run_step(1, FireMap.empty(GRID), truth[1], None, PipelineConfig(delta_t=40.0))


def test_pipeline_counts_predictions():
    truth = synthetic_truth(5)
    results = run_pipeline(PipelineConfig(delta_t=40.0, ga=SMALL_GA, seed=3), truth)
    assert [r.step_index for r in results] == [1, 2, 3, 4]
    assert [r.has_prediction for r in results] == [False, True, True, True]
    for r in results[1:]:
        assert 0.0 <= r.prediction_fitness <= 1.0


def test_pipeline_prediction_uses_previous_step_state():
    truth = synthetic_truth(3)
    cfg = PipelineConfig(delta_t=40.0, ga=SMALL_GA, seed=5)
    r1, r2 = run_pipeline(cfg, truth)
    est = r1.estimator
    expected = threshold_matrix(est.predict_proba(truth[1]), r1.kign)
    assert r2.predicted == expected
    assert r2.prediction_fitness == jaccard_fitness(truth[2], expected, truth[1])


def test_pipeline_needs_three_fire_lines():
    with pytest.raises(ValueError):
        run_pipeline(PipelineConfig(delta_t=40.0), synthetic_truth(2))


def test_pipeline_deterministic():
    truth = synthetic_truth(4)
    cfg = PipelineConfig(delta_t=40.0, ga=SMALL_GA, seed=9)
    a = run_pipeline(cfg, truth)
    b = run_pipeline(cfg, truth)
    key = lambda rs: [(r.kign, r.calibration_fitness, r.prediction_fitness, r.generations_used,
                       r.best_fitness) for r in rs]
    assert key(a) == key(b)


def test_stalled_fire_predicted_perfectly():
    ign = FireMap.from_cells(GRID, [(16, 16), (16, 17)])
    results = run_pipeline(PipelineConfig(delta_t=40.0, ga=NsGaParams(population_size=16), seed=1),
                           [ign, ign, ign, ign])
    assert all(r.calibration_fitness == 1.0 for r in results)
    assert [r.prediction_fitness for r in results[1:]] == [1.0, 1.0]


def test_identical_best_set_gives_unanimous_matrix():
    truth = synthetic_truth(3)
    cfg = PipelineConfig(delta_t=40.0, ga=NsGaParams(population_size=4, max_generations=3,
                                                     bestset_capacity=1), seed=2)
    r1, r2 = run_pipeline(cfg, truth)
    assert set(np.unique(r1.matrix.prob)) <= {0.0, 1.0}
    only = r1.best_set.scenarios[0]
    expected = burned_at(simulate(GRID, SpreadModel(), only, truth[1], 40.0), 40.0)
    assert r2.predicted == expected
