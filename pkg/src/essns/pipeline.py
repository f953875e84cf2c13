"""Per-step prediction process: optimization, statistics, calibration, prediction."""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .firesim import SpreadModel
from .fitness import jaccard_fitness
from .landscape import FireMap, GridSpec, check_same_grid
from .novelty import BestSet, GenerationRecord, NsGaParams
from .paralleleval import WorkerPool

logger = logging.getLogger(__name__)


class ProbabilityMatrix:
    """Per-cell ignition probability on a grid."""

    __slots__ = ("grid", "prob")

    def __init__(self, grid: GridSpec, prob):
        prob = np.array(prob, dtype=float, copy=True)
        if prob.shape != grid.shape:
            raise ValueError(f"matrix shape {prob.shape} does not match grid {grid.shape}")
        if np.any(~np.isfinite(prob)) or np.any(prob < 0) or np.any(prob > 1):
            raise ValueError("probabilities must lie in [0, 1]")
        prob.setflags(write=False)
        self.grid = grid
        self.prob = prob

    def __eq__(self, other):
        if not isinstance(other, ProbabilityMatrix):
            return NotImplemented
        return self.grid == other.grid and np.array_equal(self.prob, other.prob)

    def __repr__(self):
        return f"ProbabilityMatrix({self.grid.height}x{self.grid.width}, max={self.prob.max():.3f})"


def aggregate_probability(maps: Sequence[FireMap]) -> ProbabilityMatrix:
    """Fraction of maps in which each cell is burned."""
    if not maps:
        raise ValueError("cannot aggregate an empty list of maps")
    grid = check_same_grid(*maps)
    counts = np.zeros(grid.shape, dtype=np.int64)
    for m in maps:
        counts += m.burned
    return ProbabilityMatrix(grid, counts / len(maps))


def check_kign(kign: float) -> float:
    kign = float(kign)
    if not 0.0 < kign <= 1.0:
        raise ValueError(f"key ignition value must lie in (0, 1], got {kign}")
    return kign


def threshold_matrix(matrix: ProbabilityMatrix, kign: float) -> FireMap:
    """Cells whose ignition probability reaches ``kign``."""
    return FireMap(matrix.grid, matrix.prob >= check_kign(kign))


def candidate_thresholds(matrix: ProbabilityMatrix) -> np.ndarray:
    """Distinct positive probability levels plus 1.0, descending."""
    levels = np.unique(matrix.prob[matrix.prob > 0])
    return np.unique(np.append(levels, 1.0))[::-1]


def search_kign(matrix: ProbabilityMatrix, real: FireMap, preburned: FireMap) -> tuple[float, float]:
    """Threshold with the best Jaccard fitness against ``real``.

    Fitness is piecewise constant between observed probability levels, so only
    those levels are tried. Ties go to the largest threshold.
    """
    check_same_grid(matrix, real, preburned)
    best_k, best_f = None, -1.0
    for k in candidate_thresholds(matrix):
        f = jaccard_fitness(real, threshold_matrix(matrix, k), preburned)
        if f > best_f:
            best_k, best_f = float(k), f
    return best_k, best_f


@dataclass
class PipelineConfig:
    """Everything a prediction run needs besides the observed fire lines."""

    delta_t: float
    ga: NsGaParams = field(default_factory=NsGaParams)
    model: SpreadModel = field(default_factory=SpreadModel)
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if not self.delta_t > 0:
            raise ValueError(f"delta_t must be positive, got {self.delta_t}")

    def make_estimator(self, step: int):
        from .estimator import EssNsPredictor

        ga = self.ga
        return EssNsPredictor(
            delta_t=self.delta_t,
            population_size=ga.population_size,
            offspring_count=ga.offspring_count,
            mutation_rate=ga.mutation_rate,
            crossover_rate=ga.crossover_rate,
            n_neighbors=ga.neighbors,
            max_generations=ga.max_generations,
            fitness_threshold=ga.fitness_threshold,
            archive_capacity=ga.archive_capacity,
            bestset_capacity=ga.bestset_capacity,
            spread_model=self.model,
            workers=self.workers,
            random_state=step_seed(self.seed, step),
        )


def step_seed(seed: int, step: int) -> np.random.SeedSequence:
    """Independent, reproducible random stream for one prediction step."""
    return np.random.SeedSequence([int(seed), int(step)])


@dataclass
class PredictionStepResult:
    step_index: int
    kign: float
    calibration_fitness: float
    generations_used: int
    best_fitness: float
    wall_time: float
    predicted: Optional[FireMap] = None
    prediction_fitness: Optional[float] = None
    matrix: Optional[ProbabilityMatrix] = field(default=None, repr=False)
    prediction_matrix: Optional[ProbabilityMatrix] = field(default=None, repr=False)
    best_set: Optional[BestSet] = field(default=None, repr=False)
    history: list[GenerationRecord] = field(default_factory=list, repr=False)
    estimator: object = field(default=None, repr=False, compare=False)

    @property
    def has_prediction(self) -> bool:
        return self.predicted is not None


def run_step(step: int, rfl_prev: FireMap, rfl_now: FireMap,
             previous: Optional[PredictionStepResult], config: PipelineConfig,
             pool: Optional[WorkerPool] = None) -> PredictionStepResult:
    """Execute one prediction step on the interval ``[t_{i-1}, t_i]``.

    Prediction stage: when a previous step exists, its best scenarios are
    re-simulated from ``rfl_prev`` and thresholded with its key ignition value,
    giving the forecast for ``t_i`` made with information available at
    ``t_{i-1}``; it is scored against ``rfl_now``. Then the optimization,
    statistical and calibration stages fit a fresh estimator on the interval
    and produce this step's key ignition value.
    """
    if step < 1:
        raise ValueError("steps are numbered from 1")
    check_same_grid(rfl_prev, rfl_now)
    if rfl_prev.n_burned == 0:
        raise ValueError(f"step {step}: the fire line at t_{step - 1} is empty")
    own_pool = pool is None
    if own_pool:
        pool = WorkerPool(config.workers)
    started = time.perf_counter()
    try:
        predicted = prediction_fitness = prediction_matrix = None
        if previous is not None:
            est_prev = previous.estimator
            prediction_matrix = est_prev.predict_proba(rfl_prev, pool=pool)
            predicted = threshold_matrix(prediction_matrix, est_prev.kign_)
            prediction_fitness = jaccard_fitness(rfl_now, predicted, rfl_prev)

        est = config.make_estimator(step)
        est.fit(rfl_prev, rfl_now, pool=pool)
    except Exception:
        logger.error("prediction step %d failed", step)
        raise
    finally:
        if own_pool:
            pool.close()
    wall = time.perf_counter() - started
    logger.info("step %d: kign=%.4f calibration=%.4f prediction=%s generations=%d",
                step, est.kign_, est.calibration_fitness_, prediction_fitness, est.n_generations_)
    return PredictionStepResult(
        step_index=step,
        kign=est.kign_,
        calibration_fitness=est.calibration_fitness_,
        generations_used=est.n_generations_,
        best_fitness=est.best_set_.max_fitness,
        wall_time=wall,
        predicted=predicted,
        prediction_fitness=prediction_fitness,
        matrix=est.probability_matrix_,
        prediction_matrix=prediction_matrix,
        best_set=est.best_set_,
        history=est.history_,
        estimator=est,
    )


def accumulate_fire_lines(truth: Sequence[FireMap]) -> list[FireMap]:
    """Make a sequence of fire lines nested: burned cells stay burned."""
    out: list[FireMap] = []
    for fire in truth:
        out.append(fire if not out else out[-1].union(fire))
    return out


def run_pipeline(config: PipelineConfig, truth: Sequence[FireMap]) -> list[PredictionStepResult]:
    """Run steps 1..n-1 over observed fire lines ``truth[0..n-1]``."""
    if len(truth) < 3:
        raise ValueError(f"need at least 3 fire lines (t_0, t_1, t_2), got {len(truth)}")
    check_same_grid(*truth)
    truth = accumulate_fire_lines(truth)
    results: list[PredictionStepResult] = []
    previous = None
    with WorkerPool(config.workers) as pool:
        for i in range(1, len(truth)):
            previous = run_step(i, truth[i - 1], truth[i], previous, config, pool)
            results.append(previous)
    return results
