"""Scikit-learn style estimator around one calibration interval.

``fit(X, y)`` takes the fire line at the start of an interval (``X``) and the
observed fire line at its end (``y``). It searches scenario space with the
novelty GA, aggregates the best scenarios into an ignition-probability matrix
and calibrates the key ignition value on that matrix. ``predict(X)`` then
forecasts the fire line one interval after a new starting fire ``X``.
"""
from __future__ import annotations

from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .firesim import SpreadModel
from .fitness import jaccard_fitness
from .landscape import FireMap, GridSpec
from .novelty import NsGaParams, run_ns_ga
from .paralleleval import EvalRequest, WorkerPool
from .pipeline import ProbabilityMatrix, aggregate_probability, search_kign, threshold_matrix


def check_fire_map(X, cell_size: float = 30.0, name: str = "X") -> FireMap:
    """Accept a FireMap or a 2-D boolean-like array."""
    if isinstance(X, FireMap):
        return X
    arr = np.asarray(X)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a FireMap or a 2-D array, got shape {arr.shape}")
    if arr.dtype != bool:
        if not np.all(np.isin(arr, (0, 1))):
            raise ValueError(f"{name} must be binary")
        arr = arr.astype(bool)
    grid = GridSpec(width=arr.shape[1], height=arr.shape[0], cell_size=cell_size)
    return FireMap(grid, arr)


class EssNsPredictor(BaseEstimator):
    """Novelty-search scenario calibration and fire-line forecasting.

    Parameters
    ----------
    delta_t : float
        Interval length in minutes.
    population_size, offspring_count, mutation_rate, crossover_rate,
    n_neighbors, max_generations, fitness_threshold, archive_capacity,
    bestset_capacity :
        Novelty GA settings; ``None`` capacities default to 2N (archive) and
        N (best set), ``offspring_count`` to N.
    spread_model : SpreadModel, optional
        Simulator constants; defaults to ``SpreadModel()``.
    cell_size : float
        Cell side in metres, used when ``X``/``y`` are plain arrays.
    workers : int
        Evaluation processes; 0 uses every available core.
    random_state : int, SeedSequence or Generator, optional

    Attributes
    ----------
    best_set_ : BestSet
    history_ : list of GenerationRecord
    n_generations_ : int
    probability_matrix_ : ProbabilityMatrix
    kign_ : float
    calibration_fitness_ : float
    """

    def __init__(self, delta_t=10.0, population_size=16, offspring_count=None,
                 mutation_rate=0.1, crossover_rate=0.9, n_neighbors=3, max_generations=20,
                 fitness_threshold=1.0, archive_capacity=None, bestset_capacity=None,
                 spread_model=None, cell_size=30.0, workers=1, random_state=None):
        self.delta_t = delta_t
        self.population_size = population_size
        self.offspring_count = offspring_count
        self.mutation_rate = mutation_rate
        self.crossover_rate = crossover_rate
        self.n_neighbors = n_neighbors
        self.max_generations = max_generations
        self.fitness_threshold = fitness_threshold
        self.archive_capacity = archive_capacity
        self.bestset_capacity = bestset_capacity
        self.spread_model = spread_model
        self.cell_size = cell_size
        self.workers = workers
        self.random_state = random_state

    def _ga_params(self) -> NsGaParams:
        return NsGaParams(
            population_size=self.population_size,
            offspring_count=self.offspring_count,
            mutation_rate=self.mutation_rate,
            crossover_rate=self.crossover_rate,
            neighbors=self.n_neighbors,
            max_generations=self.max_generations,
            fitness_threshold=self.fitness_threshold,
            archive_capacity=self.archive_capacity,
            bestset_capacity=self.bestset_capacity,
        )

    def _model(self) -> SpreadModel:
        return self.spread_model if self.spread_model is not None else SpreadModel()

    def _check_is_fitted(self):
        if not hasattr(self, "best_set_"):
            raise NotFittedError(f"{type(self).__name__} is not fitted yet; call fit first")

    def fit(self, X, y, pool: Optional[WorkerPool] = None):
        start = check_fire_map(X, self.cell_size, "X")
        target = check_fire_map(y, self.cell_size, "y")
        if start.grid != target.grid:
            raise ValueError(f"X and y grids differ: {start.grid} vs {target.grid}")
        if start.n_burned == 0:
            raise ValueError("the starting fire line X is empty")
        if not self.delta_t > 0:
            raise ValueError(f"delta_t must be positive, got {self.delta_t}")
        params = self._ga_params()
        model = self._model()
        rng = np.random.default_rng(self.random_state)

        own_pool = pool is None
        if own_pool:
            pool = WorkerPool(self.workers)
        try:
            def evaluator(scenarios):
                return pool.evaluate(EvalRequest(scenarios, start, target, self.delta_t, model))

            history: list = []
            best = run_ns_ga(params, evaluator, rng, history)
            self.best_set_ = best
            self.history_ = history
            self.n_generations_ = len(history)
            self.grid_ = start.grid
            self.probability_matrix_ = self._aggregate(start, pool)
        finally:
            if own_pool:
                pool.close()
        self.kign_, self.calibration_fitness_ = search_kign(self.probability_matrix_, target, start)
        return self

    def _aggregate(self, start: FireMap, pool: WorkerPool) -> ProbabilityMatrix:
        if not len(self.best_set_):
            # no scenario survived the search (e.g. a zero fitness threshold)
            return ProbabilityMatrix(start.grid, np.zeros(start.grid.shape))
        maps = pool.simulate_many(self.best_set_.scenarios, start, self.delta_t, self._model())
        return aggregate_probability(maps)

    def predict_proba(self, X, pool: Optional[WorkerPool] = None) -> ProbabilityMatrix:
        """Ignition probability one interval after the fire line ``X``."""
        self._check_is_fitted()
        start = check_fire_map(X, self.cell_size, "X")
        if start.n_burned == 0:
            raise ValueError("the starting fire line X is empty")
        own_pool = pool is None
        if own_pool:
            pool = WorkerPool(self.workers)
        try:
            return self._aggregate(start, pool)
        finally:
            if own_pool:
                pool.close()

    def predict(self, X, pool: Optional[WorkerPool] = None) -> FireMap:
        """Forecast fire line one interval after ``X``, thresholded at ``kign_``."""
        return threshold_matrix(self.predict_proba(X, pool), self.kign_)

    def score(self, X, y) -> float:
        """Jaccard fitness of ``predict(X)`` against ``y``, ignoring cells burned in ``X``."""
        start = check_fire_map(X, self.cell_size, "X")
        target = check_fire_map(y, self.cell_size, "y")
        return jaccard_fitness(target, self.predict(start), start)
