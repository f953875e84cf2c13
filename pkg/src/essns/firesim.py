"""Deterministic minimum-travel-time fire spread on an 8-neighbour grid.

The spread rate is a simplified Rothermel-style product of a fuel base rate,
a moisture damping factor, and wind and slope amplification terms that act
only on headings with a positive component along the driver. Because every
scenario is uniform over the grid, each of the eight neighbour directions has
a single travel cost and the ignition times are shortest-path distances from
the initial fire.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .landscape import FireMap, GridSpec, IgnitionTimeMap, Scenario, burned_at, validate_scenario

N_FUEL_MODELS = 13
MAX_WIND_SPEED = 80.0
MOISTURE_FLOOR = 0.01

# (row offset, col offset) clockwise from North; row index grows southward.
NEIGHBOR_OFFSETS = ((-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1))
NEIGHBOR_HEADINGS = np.arange(8) * 45.0
NEIGHBOR_STEPS = np.array([1.0, math.sqrt(2.0)] * 4)


def _default_base_rates() -> tuple[float, ...]:
    return tuple(float(v) for v in np.linspace(1.0, 10.0, N_FUEL_MODELS))


@dataclass(frozen=True)
class SpreadModel:
    """Constants of the spread-rate formula.

    Attributes:
        base_rate: no-wind, no-slope, dry-fuel rate (m/min) per fuel model 1..13.
        wind_coeff: amplification at full wind speed (80 mph) straight downwind.
        slope_coeff: amplification per unit tan(slope) straight upslope.
        moisture_ext: moisture of extinction (percent) per fuel model.
    """

    base_rate: tuple[float, ...] = field(default_factory=_default_base_rates)
    wind_coeff: float = 3.0
    slope_coeff: float = 2.0
    moisture_ext: tuple[float, ...] = (30.0,) * N_FUEL_MODELS

    def __post_init__(self):
        base = tuple(float(v) for v in self.base_rate)
        ext = tuple(float(v) for v in self.moisture_ext)
        if len(base) != N_FUEL_MODELS or len(ext) != N_FUEL_MODELS:
            raise ValueError(f"base_rate and moisture_ext need {N_FUEL_MODELS} entries")
        if not all(v > 0 and math.isfinite(v) for v in base):
            raise ValueError("base rates must be positive and finite")
        if not all(0 < v <= 100 for v in ext):
            raise ValueError("moisture of extinction must lie in (0, 100]")
        if not (self.wind_coeff >= 0 and self.slope_coeff >= 0):
            raise ValueError("wind and slope coefficients must be nonnegative")
        object.__setattr__(self, "base_rate", base)
        object.__setattr__(self, "moisture_ext", ext)
        object.__setattr__(self, "wind_coeff", float(self.wind_coeff))
        object.__setattr__(self, "slope_coeff", float(self.slope_coeff))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["base_rate"] = list(self.base_rate)
        d["moisture_ext"] = list(self.moisture_ext)
        return d

    @classmethod
    def from_dict(cls, data: dict | None) -> "SpreadModel":
        data = dict(data or {})
        unknown = set(data) - {"base_rate", "wind_coeff", "slope_coeff", "moisture_ext"}
        if unknown:
            raise ValueError(f"unknown spread-model keys: {sorted(unknown)}")
        return cls(**data)


def effective_moisture(s: Scenario) -> float:
    return 0.6 * s.m1 + 0.2 * s.m10 + 0.1 * s.m100 + 0.1 * (s.mherb / 5.0)


def moisture_damping(model: SpreadModel, s: Scenario) -> float:
    damp = 1.0 - effective_moisture(s) / model.moisture_ext[s.model - 1]
    return min(1.0, max(MOISTURE_FLOOR, damp))


def directional_rate(model: SpreadModel, s: Scenario, heading):
    """Spread rate (m/min) along ``heading`` (degrees clockwise from North).

    ``heading`` may be a scalar or an array; the result has the same shape.
    """
    if not validate_scenario(s):
        raise ValueError(f"scenario outside admissible ranges: {s}")
    heading = np.asarray(heading, dtype=float)
    wind_to = (s.wind_dir + 180.0) % 360.0
    upslope = (s.aspect + 180.0) % 360.0
    along_wind = np.maximum(0.0, np.cos(np.radians(heading - wind_to)))
    along_slope = np.maximum(0.0, np.cos(np.radians(heading - upslope)))
    wind = 1.0 + model.wind_coeff * (s.wind_spd / MAX_WIND_SPEED) * along_wind
    slope = 1.0 + model.slope_coeff * math.tan(math.radians(s.slope)) * along_slope
    rate = model.base_rate[s.model - 1] * moisture_damping(model, s) * wind * slope
    return rate[()] if rate.ndim == 0 else rate


@lru_cache(maxsize=16)
def _neighbor_graph(height: int, width: int):
    """CSR skeleton of the 8-neighbour graph: (indptr, indices, direction)."""
    idx = np.arange(height * width).reshape(height, width)
    src, dst, direction = [], [], []
    for k, (dr, dc) in enumerate(NEIGHBOR_OFFSETS):
        a = idx[max(0, -dr):height - max(0, dr), max(0, -dc):width - max(0, dc)].ravel()
        src.append(a)
        dst.append(a + dr * width + dc)
        direction.append(np.full(a.size, k))
    src = np.concatenate(src)
    dst = np.concatenate(dst)
    direction = np.concatenate(direction)
    order = np.lexsort((dst, src))
    src, dst, direction = src[order], dst[order], direction[order]
    indptr = np.searchsorted(src, np.arange(height * width + 1)).astype(np.int32)
    for arr in (indptr, dst, direction):
        arr.setflags(write=False)
    return indptr, dst.astype(np.int32), direction


def edge_costs(grid: GridSpec, model: SpreadModel, s: Scenario) -> np.ndarray:
    """Travel time (minutes) across one edge in each of the 8 directions."""
    return grid.cell_size * NEIGHBOR_STEPS / directional_rate(model, s, NEIGHBOR_HEADINGS)


def simulate(grid: GridSpec, model: SpreadModel, s: Scenario, initial: FireMap, t_end: float) -> IgnitionTimeMap:
    """Ignition times from ``initial`` up to the horizon ``t_end`` (minutes)."""
    if initial.grid != grid:
        raise ValueError(f"initial fire grid {initial.grid} does not match {grid}")
    sources = np.flatnonzero(initial.burned)
    if sources.size == 0:
        raise ValueError("initial fire line is empty")
    if not (t_end > 0):
        raise ValueError(f"t_end must be positive, got {t_end}")
    costs = edge_costs(grid, model, s)
    indptr, indices, direction = _neighbor_graph(grid.height, grid.width)
    n = grid.n_cells
    graph = csr_matrix((costs[direction], indices, indptr), shape=(n, n))
    time = dijkstra(graph, directed=True, indices=sources, min_only=True, limit=float(t_end))
    return IgnitionTimeMap(grid, time.reshape(grid.shape))


def simulate_burned(grid: GridSpec, model: SpreadModel, s: Scenario, initial: FireMap, horizon: float) -> FireMap:
    """Fire map at ``horizon`` minutes after ``initial``."""
    return burned_at(simulate(grid, model, s, initial, horizon), horizon)
