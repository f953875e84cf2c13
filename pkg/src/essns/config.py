"""Run configuration: a single versioned JSON document."""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

from .firesim import SpreadModel
from .landscape import GridSpec, Scenario, validate_scenario
from .novelty import NsGaParams

SCHEMA = "essns-config/1"
MANIFEST_SCHEMA = "essns-manifest/1"

# Hidden reference fire used when no observed fire lines are supplied.
DEFAULT_REFERENCE = Scenario(model=5, wind_spd=10.0, wind_dir=270.0, m1=5.0, m10=6.0,
                             m100=8.0, mherb=60.0, slope=0.0, aspect=0.0)
# Bisected so that the first interval burns about 3% of a 64x64 grid.
DEFAULT_DELTA_T = 55.0


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SyntheticTruth:
    scenario: Scenario
    ignition: tuple[tuple[int, int], ...]

    def to_dict(self) -> dict:
        return {"synthetic": {"scenario": self.scenario.to_dict(),
                              "ignition": [list(c) for c in self.ignition]}}


@dataclass(frozen=True)
class FileTruth:
    paths: tuple[str, ...]

    def to_dict(self) -> dict:
        return {"files": list(self.paths)}


@dataclass(frozen=True)
class RunConfig:
    grid: GridSpec = GridSpec(64, 64, 30.0)
    model: SpreadModel = field(default_factory=SpreadModel)
    ga: NsGaParams = field(default_factory=lambda: NsGaParams(population_size=32, neighbors=5,
                                                              max_generations=30))
    delta_t: float = DEFAULT_DELTA_T
    steps: int = 5
    seed: int = 0
    workers: int = 1
    record_timing: bool = False
    truth: SyntheticTruth | FileTruth = SyntheticTruth(DEFAULT_REFERENCE, ((32, 32),))
    output_dir: str = "essns-run"

    def __post_init__(self):
        if self.steps < 3:
            raise ConfigError(f"steps must be at least 3, got {self.steps}")
        if not self.delta_t > 0:
            raise ConfigError(f"delta_t must be positive, got {self.delta_t}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.workers < 0:
            raise ConfigError("workers must be >= 0")
        if isinstance(self.truth, SyntheticTruth):
            if not validate_scenario(self.truth.scenario):
                raise ConfigError(f"reference scenario is out of range: {self.truth.scenario}")
            if not self.truth.ignition:
                raise ConfigError("synthetic truth needs at least one ignition cell")
            for r, c in self.truth.ignition:
                if not (0 <= r < self.grid.height and 0 <= c < self.grid.width):
                    raise ConfigError(f"ignition cell {(r, c)} is outside the grid")
        else:
            if len(self.truth.paths) < self.steps:
                raise ConfigError(f"{self.steps} steps need {self.steps} fire-line files, "
                                  f"got {len(self.truth.paths)}")
            for p in self.truth.paths:
                if not os.path.isfile(p):
                    raise ConfigError(f"fire-line file not found: {p}")

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "grid": {"width": self.grid.width, "height": self.grid.height,
                     "cell_size": self.grid.cell_size},
            "spread_model": self.model.to_dict(),
            "ga": self.ga.to_dict(),
            "delta_t": self.delta_t,
            "steps": self.steps,
            "seed": self.seed,
            "workers": self.workers,
            "record_timing": self.record_timing,
            "truth": self.truth.to_dict(),
            "output_dir": self.output_dir,
        }

    def with_overrides(self, **kwargs) -> "RunConfig":
        kwargs = {k: v for k, v in kwargs.items() if v is not None}
        try:
            return replace(self, **kwargs)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc


_TOP_KEYS = {"schema", "grid", "spread_model", "ga", "delta_t", "steps", "seed", "workers",
             "record_timing", "truth", "output_dir"}


def config_from_dict(data: dict, base_dir: Optional[Path] = None) -> RunConfig:
    """Build a RunConfig; relative truth paths resolve against ``base_dir``."""
    if data.get("schema") == MANIFEST_SCHEMA:
        data = data["config"]
    schema = data.get("schema", SCHEMA)
    if schema != SCHEMA:
        raise ConfigError(f"unsupported config schema {schema!r} (expected {SCHEMA!r})")
    unknown = set(data) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    defaults = RunConfig()
    try:
        grid = GridSpec(**data["grid"]) if "grid" in data else defaults.grid
        model = SpreadModel.from_dict(data.get("spread_model"))
        ga = NsGaParams(**data["ga"]) if "ga" in data else defaults.ga
        truth_data = data.get("truth")
        if truth_data is None:
            truth = defaults.truth
        elif "synthetic" in truth_data:
            syn = truth_data["synthetic"]
            truth = SyntheticTruth(Scenario.from_dict(syn["scenario"]),
                                   tuple((int(r), int(c)) for r, c in syn["ignition"]))
        elif "files" in truth_data:
            base = base_dir or Path.cwd()
            truth = FileTruth(tuple(str((base / p).resolve()) for p in truth_data["files"]))
        else:
            raise ConfigError("truth must contain either 'synthetic' or 'files'")
        return RunConfig(
            grid=grid,
            model=model,
            ga=ga,
            delta_t=float(data.get("delta_t", defaults.delta_t)),
            steps=int(data.get("steps", defaults.steps)),
            seed=int(data.get("seed", defaults.seed)),
            workers=int(data.get("workers", defaults.workers)),
            record_timing=bool(data.get("record_timing", defaults.record_timing)),
            truth=truth,
            output_dir=str(data.get("output_dir", defaults.output_dir)),
        )
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid config: {exc}") from exc


def load_config(path: str | os.PathLike) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return config_from_dict(data, path.parent)
