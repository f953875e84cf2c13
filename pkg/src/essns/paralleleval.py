"""Master/worker batch evaluation of scenarios.

Scenarios are cut into contiguous index chunks and farmed out to a process
pool. Every chunk returns its values together with its start index, so the
output order is fixed by the input order and not by scheduling: the result of
a batch does not depend on how many workers computed it.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from .firesim import SpreadModel, simulate_burned
from .fitness import jaccard_fitness
from .landscape import FireMap, Scenario, check_same_grid


class BatchEvaluationError(RuntimeError):
    """A scenario in a batch could not be simulated."""

    def __init__(self, index: int, message: str):
        super().__init__(index, message)
        self.index = index
        self.message = message

    def __str__(self):
        return f"scenario {self.index}: {self.message}"


@dataclass(frozen=True)
class EvalRequest:
    scenarios: tuple[Scenario, ...]
    start_fire: FireMap
    target_fire: FireMap
    horizon: float
    model: SpreadModel = field(default_factory=SpreadModel)

    def __post_init__(self):
        object.__setattr__(self, "scenarios", tuple(self.scenarios))
        if not self.scenarios:
            raise ValueError("evaluation request has no scenarios")
        check_same_grid(self.start_fire, self.target_fire)
        if not self.horizon > 0:
            raise ValueError(f"horizon must be positive, got {self.horizon}")


def resolve_workers(workers: int) -> int:
    """Map the user-facing worker count to a pool size (0 = all usable cores)."""
    if workers < 0:
        raise ValueError(f"workers must be >= 0, got {workers}")
    if workers == 0:
        try:
            return max(1, len(os.sched_getaffinity(0)))
        except AttributeError:  # not available on macOS/Windows
            return max(1, os.cpu_count() or 1)
    return workers


def _fitness_chunk(start: int, scenarios, model, start_fire, target_fire, horizon):
    out = []
    for offset, s in enumerate(scenarios):
        try:
            sim = simulate_burned(start_fire.grid, model, s, start_fire, horizon)
        except Exception as exc:
            raise BatchEvaluationError(start + offset, f"{type(exc).__name__}: {exc}") from None
        out.append(jaccard_fitness(target_fire, sim, start_fire))
    return start, out


def _burned_chunk(start: int, scenarios, model, start_fire, horizon):
    out = []
    for offset, s in enumerate(scenarios):
        try:
            out.append(simulate_burned(start_fire.grid, model, s, start_fire, horizon).burned)
        except Exception as exc:
            raise BatchEvaluationError(start + offset, f"{type(exc).__name__}: {exc}") from None
    return start, out


def _chunks(n: int, workers: int):
    size = max(1, -(-n // (4 * workers)))
    return [(i, min(i + size, n)) for i in range(0, n, size)]


class WorkerPool:
    """Reusable pool of evaluation workers.

    With one worker everything runs in the calling process. Use as a context
    manager, or call :meth:`close`.
    """

    def __init__(self, workers: int = 1):
        self.workers = resolve_workers(workers)
        self._executor = ProcessPoolExecutor(self.workers) if self.workers > 1 else None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def close(self):
        if self._executor is not None:
            self._executor.shutdown()
            self._executor = None

    def _run(self, fn, scenarios, *args):
        n = len(scenarios)
        results = [None] * n
        if self._executor is None or n == 1:
            start, values = fn(0, scenarios, *args)
            results[:] = values
            return results
        futures = [self._executor.submit(fn, lo, scenarios[lo:hi], *args)
                   for lo, hi in _chunks(n, self.workers)]
        for fut in futures:
            start, values = fut.result()
            results[start:start + len(values)] = values
        return results

    def evaluate(self, req: EvalRequest) -> list[float]:
        """Fitness of each scenario in ``req``, in input order."""
        return self._run(_fitness_chunk, req.scenarios, req.model, req.start_fire,
                         req.target_fire, req.horizon)

    def simulate_many(self, scenarios: Sequence[Scenario], start_fire: FireMap, horizon: float,
                      model: SpreadModel) -> list[FireMap]:
        """Fire maps of each scenario after ``horizon`` minutes, in input order."""
        scenarios = tuple(scenarios)
        if not scenarios:
            return []
        burned = self._run(_burned_chunk, scenarios, model, start_fire, horizon)
        return [FireMap(start_fire.grid, b) for b in burned]


def evaluate_batch(req: EvalRequest, workers: int = 1) -> list[float]:
    """One-shot batch evaluation with a temporary pool."""
    with WorkerPool(workers) as pool:
        return pool.evaluate(req)
