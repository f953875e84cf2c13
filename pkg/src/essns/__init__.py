"""Wildfire spread prediction with novelty-search scenario calibration."""

__version__ = "0.1.0"

from .estimator import EssNsPredictor
from .firesim import SpreadModel, directional_rate, simulate
from .fitness import jaccard_fitness
from .landscape import (FireMap, GridSpec, IgnitionTimeMap, Scenario, burned_at,
                        random_scenario, validate_scenario)
from .novelty import (Archive, BestSet, Individual, NsGaParams, distance, evaluate_novelty,
                      generate_offspring, replace_by_novelty, run_ns_ga, update_archive,
                      update_best)
from .paralleleval import EvalRequest, WorkerPool, evaluate_batch
from .pipeline import (PipelineConfig, PredictionStepResult, ProbabilityMatrix,
                       aggregate_probability, run_pipeline, run_step, search_kign,
                       threshold_matrix)

__all__ = [
    "Archive", "BestSet", "EssNsPredictor", "EvalRequest", "FireMap", "GridSpec",
    "IgnitionTimeMap", "Individual", "NsGaParams", "PipelineConfig", "PredictionStepResult",
    "ProbabilityMatrix", "Scenario", "SpreadModel", "WorkerPool", "aggregate_probability",
    "burned_at", "directional_rate", "distance", "evaluate_batch", "evaluate_novelty",
    "generate_offspring", "jaccard_fitness", "random_scenario", "replace_by_novelty",
    "run_ns_ga", "run_pipeline", "run_step", "search_kign", "simulate", "threshold_matrix",
    "update_archive", "update_best", "validate_scenario",
]
