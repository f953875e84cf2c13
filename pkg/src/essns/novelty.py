"""Novelty-driven genetic algorithm that keeps the best-fitness scenarios.

Individuals are steered by novelty alone: the novelty of a scenario is the mean
fitness gap to its ``k`` nearest neighbours among the current population, the
new offspring and the archive of past novel individuals. Fitness is still
recorded, and a bounded ``BestSet`` remembers the highest-fitness scenarios seen
anywhere during the search; that set is the algorithm's output.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Iterator, Optional, Sequence

import numpy as np

from .landscape import PARAMETER_RANGES, Scenario, random_scenario, sample_parameter

logger = logging.getLogger(__name__)

Evaluator = Callable[[Sequence[Scenario]], Sequence[float]]


@dataclass(eq=False)
class Individual:
    scenario: Scenario
    id: int
    birth_generation: int = 0
    fitness: Optional[float] = None
    novelty: Optional[float] = None

    def __repr__(self):
        return (f"Individual(id={self.id}, gen={self.birth_generation}, "
                f"fitness={self.fitness}, novelty={self.novelty})")


def _by_novelty(ind: Individual):
    return (-ind.novelty, ind.id)


def _by_fitness(ind: Individual):
    return (-ind.fitness, ind.id)


@dataclass(frozen=True)
class Archive:
    """Bounded record of novel individuals, most novel first.

    Members are snapshots: their novelty is the value computed when they were
    admitted and is never refreshed.
    """

    capacity: int
    members: tuple[Individual, ...] = ()

    def __post_init__(self):
        if self.capacity < 1:
            raise ValueError("archive capacity must be positive")

    def __len__(self):
        return len(self.members)


@dataclass(frozen=True)
class BestSet:
    """Bounded collection of the highest-fitness individuals, best first."""

    capacity: int
    members: tuple[Individual, ...] = ()

    def __post_init__(self):
        if self.capacity < 1:
            raise ValueError("best-set capacity must be positive")

    def __len__(self):
        return len(self.members)

    @property
    def max_fitness(self) -> float:
        return self.members[0].fitness if self.members else 0.0

    @property
    def min_fitness(self) -> float:
        return self.members[-1].fitness if self.members else 0.0

    @property
    def scenarios(self) -> list[Scenario]:
        return [ind.scenario for ind in self.members]


@dataclass(frozen=True)
class NsGaParams:
    population_size: int = 16
    offspring_count: Optional[int] = None
    mutation_rate: float = 0.1
    crossover_rate: float = 0.9
    neighbors: int = 3
    max_generations: int = 20
    fitness_threshold: float = 1.0
    archive_capacity: Optional[int] = None
    bestset_capacity: Optional[int] = None

    def __post_init__(self):
        n = self.population_size
        if n < 1:
            raise ValueError("population_size must be positive")
        # defaults: m = N, archive 2N, bestSet N
        if self.offspring_count is None:
            object.__setattr__(self, "offspring_count", n)
        if self.archive_capacity is None:
            object.__setattr__(self, "archive_capacity", 2 * n)
        if self.bestset_capacity is None:
            object.__setattr__(self, "bestset_capacity", n)
        for name in ("offspring_count", "neighbors", "max_generations",
                     "archive_capacity", "bestset_capacity"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be a positive integer")
        for name in ("mutation_rate", "crossover_rate"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")
        # thresholds above 1 are allowed and disable the early stop
        if not self.fitness_threshold >= 0.0:
            raise ValueError(f"fitness_threshold must be >= 0, got {self.fitness_threshold}")

    def to_dict(self) -> dict:
        return {f: getattr(self, f) for f in self.__dataclass_fields__}


def distance(a: Individual, b: Individual) -> float:
    """Behavioural distance: absolute fitness difference."""
    if a.fitness is None or b.fitness is None:
        raise ValueError("distance needs both fitness values")
    return abs(a.fitness - b.fitness)


def evaluate_novelty(x: Individual, novelty_set: Sequence[Individual], k: int) -> float:
    """Mean distance from ``x`` to its ``k`` nearest neighbours in ``novelty_set``.

    Members sharing ``x``'s id are ignored. With fewer than ``k`` candidates
    the mean runs over all of them.
    """
    if k < 1:
        raise ValueError("k must be positive")
    others = [ind for ind in novelty_set if ind.id != x.id]
    if not others:
        raise ValueError("novelty set has no individual other than x")
    dists = sorted((distance(x, ind), ind.id) for ind in others)
    nearest = [d for d, _ in dists[:k]]
    return math.fsum(nearest) / len(nearest)


def _roulette_probabilities(population: Sequence[Individual]) -> Optional[np.ndarray]:
    weights = [ind.novelty for ind in population]
    if any(w is None for w in weights):
        return None
    weights = np.asarray(weights, dtype=float)
    total = weights.sum()
    if not total > 0:
        return None
    return weights / total


def _mutate(genes: list, mutation_rate: float, rng: np.random.Generator) -> list:
    names = list(PARAMETER_RANGES)
    flips = rng.random(len(names)) < mutation_rate
    return [sample_parameter(name, rng) if flip else gene
            for name, gene, flip in zip(names, genes, flips)]


def generate_offspring(population: Sequence[Individual], m: int, mutation_rate: float,
                       crossover_rate: float, rng: np.random.Generator,
                       ids: Optional[Iterator[int]] = None, generation: int = 0) -> list[Individual]:
    """Roulette-wheel selection, uniform crossover and uniform-reset mutation.

    Parents are drawn with probability proportional to novelty; when novelty
    is missing or zero everywhere the wheel is uniform. Pairs are produced
    until ``m`` children exist (an odd ``m`` drops the last sibling).

    Args:
        ids: source of fresh individual ids. Defaults to counting up from one
            past the largest id in ``population``.
    """
    if not population:
        raise ValueError("population is empty")
    if m < 1:
        raise ValueError("m must be positive")
    if ids is None:
        ids = itertools.count(max(ind.id for ind in population) + 1)
    probs = _roulette_probabilities(population)
    names = list(PARAMETER_RANGES)
    children: list[Individual] = []
    while len(children) < m:
        i, j = rng.choice(len(population), size=2, replace=True, p=probs)
        g1 = [getattr(population[i].scenario, n) for n in names]
        g2 = [getattr(population[j].scenario, n) for n in names]
        if rng.random() < crossover_rate:
            swap = rng.random(len(names)) < 0.5
            g1, g2 = ([b if s else a for a, b, s in zip(g1, g2, swap)],
                      [a if s else b for a, b, s in zip(g1, g2, swap)])
        for genes in (g1, g2):
            genes = _mutate(genes, mutation_rate, rng)
            children.append(Individual(Scenario(*genes), next(ids), generation))
    return children[:m]


def update_archive(archive: Archive, offspring: Sequence[Individual]) -> Archive:
    """Keep the ``capacity`` most novel of the archive members and offspring."""
    if any(ind.novelty is None for ind in offspring):
        raise ValueError("offspring novelty must be set before archiving")
    candidates = list(archive.members) + [replace(ind) for ind in offspring]
    candidates.sort(key=_by_novelty)
    return Archive(archive.capacity, tuple(candidates[:archive.capacity]))


def replace_by_novelty(population: Sequence[Individual], offspring: Sequence[Individual],
                       n: int) -> list[Individual]:
    """Elitist replacement: the ``n`` most novel of parents and offspring."""
    pool = list(population) + list(offspring)
    if len(pool) < n:
        raise ValueError(f"only {len(pool)} individuals available for a population of {n}")
    if any(ind.novelty is None for ind in pool):
        raise ValueError("novelty must be set for every candidate")
    pool.sort(key=_by_novelty)
    return pool[:n]


def update_best(best: BestSet, offspring: Sequence[Individual]) -> BestSet:
    """Merge offspring into the best set, keeping the top ``capacity`` by fitness."""
    if any(ind.fitness is None for ind in offspring):
        raise ValueError("offspring fitness must be set")
    seen = {ind.id for ind in best.members}
    candidates = list(best.members) + [replace(ind) for ind in offspring if ind.id not in seen]
    candidates.sort(key=_by_fitness)
    return BestSet(best.capacity, tuple(candidates[:best.capacity]))


@dataclass
class GenerationRecord:
    """What one pass of the main loop produced."""

    generation: int
    max_fitness: float
    mean_novelty: float
    archive_size: int
    bestset_min_fitness: float
    bestset_max_fitness: float
    evaluations: int
    # filled only when the run is asked to keep snapshots
    scored: list[Individual] = field(default_factory=list, repr=False)
    novelty_set: list[Individual] = field(default_factory=list, repr=False)


def _evaluate(individuals: Sequence[Individual], evaluator: Evaluator) -> int:
    pending = [ind for ind in individuals if ind.fitness is None]
    if not pending:
        return 0
    values = list(evaluator([ind.scenario for ind in pending]))
    if len(values) != len(pending):
        raise RuntimeError(f"evaluator returned {len(values)} values for {len(pending)} scenarios")
    for ind, value in zip(pending, values):
        value = float(value)
        if not 0.0 <= value <= 1.0:
            raise RuntimeError(f"evaluator returned fitness {value} outside [0, 1]")
        ind.fitness = value
    return len(pending)


def run_ns_ga(params: NsGaParams, evaluator: Evaluator, rng: np.random.Generator,
              history: Optional[list] = None, keep_snapshots: bool = False) -> BestSet:
    """Run the novelty-search GA and return the best-fitness individuals found.

    Args:
        params: algorithm settings.
        evaluator: maps a list of scenarios to fitness values in [0, 1]; must be
            deterministic. Each individual is evaluated once and cached.
        rng: the only randomness source of the run.
        history: if given, one :class:`GenerationRecord` is appended per
            generation.
        keep_snapshots: store copies of the scored individuals and novelty
            reference set in each record (for auditing novelty values).
    """
    ids = itertools.count()
    population = [Individual(random_scenario(rng), next(ids), 0)
                  for _ in range(params.population_size)]
    archive = Archive(params.archive_capacity)
    best = BestSet(params.bestset_capacity)
    generations = 0
    max_fitness = 0.0

    while generations < params.max_generations and max_fitness < params.fitness_threshold:
        offspring = generate_offspring(population, params.offspring_count, params.mutation_rate,
                                       params.crossover_rate, rng, ids, generations + 1)
        scored = population + offspring
        try:
            n_evals = _evaluate(scored, evaluator)
        except Exception as exc:
            logger.error("fitness evaluation failed at generation %d: %s", generations + 1, exc)
            raise

        current = {ind.id for ind in scored}
        novelty_set = scored + [ind for ind in archive.members if ind.id not in current]
        for ind in scored:
            ind.novelty = evaluate_novelty(ind, novelty_set, params.neighbors)

        if keep_snapshots and history is not None:
            snap_scored = [replace(ind) for ind in scored]
            snap_set = [replace(ind) for ind in novelty_set]

        archive = update_archive(archive, offspring)
        population = replace_by_novelty(population, offspring, params.population_size)
        best = update_best(best, offspring)
        max_fitness = best.max_fitness
        generations += 1

        if history is not None:
            record = GenerationRecord(
                generation=generations,
                max_fitness=max_fitness,
                mean_novelty=math.fsum(ind.novelty for ind in scored) / len(scored),
                archive_size=len(archive),
                bestset_min_fitness=best.min_fitness,
                bestset_max_fitness=best.max_fitness,
                evaluations=n_evals,
            )
            if keep_snapshots:
                record.scored, record.novelty_set = snap_scored, snap_set
            history.append(record)
        logger.debug("generation %d: max fitness %.4f, archive %d", generations, max_fitness, len(archive))

    return best
