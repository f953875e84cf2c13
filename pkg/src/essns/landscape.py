"""Grid geometry, fire-line maps and environmental scenarios."""
from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import Iterable

import numpy as np

# (low, high) per scenario field. Angles are half-open [0, 360).
PARAMETER_RANGES: dict[str, tuple[float, float]] = {
    "model": (1, 13),
    "wind_spd": (0.0, 80.0),
    "wind_dir": (0.0, 360.0),
    "m1": (1.0, 60.0),
    "m10": (1.0, 60.0),
    "m100": (1.0, 60.0),
    "mherb": (30.0, 300.0),
    "slope": (0.0, 81.0),
    "aspect": (0.0, 360.0),
}
ANGLE_FIELDS = frozenset({"wind_dir", "aspect"})
INTEGER_FIELDS = frozenset({"model"})


@dataclass(frozen=True)
class GridSpec:
    """Uniform raster of square cells; row 0 is the northern edge."""

    width: int
    height: int
    cell_size: float = 30.0

    def __post_init__(self):
        if int(self.width) != self.width or int(self.height) != self.height:
            raise ValueError("grid dimensions must be integers")
        if self.width < 1 or self.height < 1:
            raise ValueError(f"grid must be at least 1x1, got {self.width}x{self.height}")
        if not (self.cell_size > 0 and math.isfinite(self.cell_size)):
            raise ValueError(f"cell_size must be positive, got {self.cell_size}")
        object.__setattr__(self, "width", int(self.width))
        object.__setattr__(self, "height", int(self.height))
        object.__setattr__(self, "cell_size", float(self.cell_size))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.height, self.width)

    @property
    def n_cells(self) -> int:
        return self.width * self.height


def _normalize_angle(value: float) -> float:
    value = float(value) % 360.0
    # -1e-17 % 360 == 360.0 in floating point
    return 0.0 if value >= 360.0 else value


@dataclass(frozen=True)
class Scenario:
    """One assignment of the nine environmental inputs of the simulator.

    Units: wind speed in miles/hour, directions and slope in degrees
    (directions clockwise from North; ``wind_dir`` is where the wind blows
    *from*), moistures in percent. Angles are normalized into [0, 360) on
    construction; range checks are left to :func:`validate_scenario` so that
    out-of-range candidates can still be represented and rejected.
    """

    model: int
    wind_spd: float
    wind_dir: float
    m1: float
    m10: float
    m100: float
    mherb: float
    slope: float
    aspect: float

    def __post_init__(self):
        if float(self.model) != int(self.model):
            raise ValueError(f"fuel model must be an integer, got {self.model!r}")
        object.__setattr__(self, "model", int(self.model))
        for name in ("wind_spd", "m1", "m10", "m100", "mherb", "slope"):
            object.__setattr__(self, name, float(getattr(self, name)))
        for name in ANGLE_FIELDS:
            object.__setattr__(self, name, _normalize_angle(getattr(self, name)))

    @classmethod
    def field_names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in fields(cls))

    def to_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in self.field_names()], dtype=float)

    @classmethod
    def from_array(cls, values: Iterable[float]) -> "Scenario":
        values = list(values)
        if len(values) != len(PARAMETER_RANGES):
            raise ValueError(f"expected {len(PARAMETER_RANGES)} values, got {len(values)}")
        kwargs = dict(zip(cls.field_names(), values))
        kwargs["model"] = int(round(kwargs["model"]))
        return cls(**kwargs)

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in self.field_names()}

    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        missing = set(cls.field_names()) - set(data)
        if missing:
            raise ValueError(f"scenario is missing fields: {sorted(missing)}")
        extra = set(data) - set(cls.field_names())
        if extra:
            raise ValueError(f"unknown scenario fields: {sorted(extra)}")
        return cls(**data)


def validate_scenario(s: Scenario) -> bool:
    """Return True iff every field lies inside its admissible range."""
    for name, (low, high) in PARAMETER_RANGES.items():
        value = getattr(s, name)
        if name in ANGLE_FIELDS:
            value = _normalize_angle(value)
            if not (low <= value < high):
                return False
        elif not (low <= value <= high) or not math.isfinite(value):
            return False
    return True


def sample_parameter(name: str, rng: np.random.Generator) -> float:
    """Draw one field uniformly from its range."""
    low, high = PARAMETER_RANGES[name]
    if name in INTEGER_FIELDS:
        return int(rng.integers(int(low), int(high) + 1))
    return float(rng.uniform(low, high))


def random_scenario(rng: np.random.Generator) -> Scenario:
    """Sample a scenario with each field independent and uniform on its range."""
    return Scenario(**{name: sample_parameter(name, rng) for name in PARAMETER_RANGES})


def _as_grid_array(grid: GridSpec, values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    if arr.shape != grid.shape:
        raise ValueError(f"array shape {arr.shape} does not match grid {grid.shape}")
    arr.setflags(write=False)
    return arr


class FireMap:
    """Set of burned cells on a grid (a fire line snapshot)."""

    __slots__ = ("grid", "burned")

    def __init__(self, grid: GridSpec, burned):
        self.grid = grid
        self.burned = _as_grid_array(grid, burned, bool)

    @classmethod
    def empty(cls, grid: GridSpec) -> "FireMap":
        return cls(grid, np.zeros(grid.shape, dtype=bool))

    @classmethod
    def from_cells(cls, grid: GridSpec, cells: Iterable[tuple[int, int]]) -> "FireMap":
        burned = np.zeros(grid.shape, dtype=bool)
        for row, col in cells:
            if not (0 <= row < grid.height and 0 <= col < grid.width):
                raise ValueError(f"cell {(row, col)} lies outside the {grid.shape} grid")
            burned[row, col] = True
        return cls(grid, burned)

    @property
    def n_burned(self) -> int:
        return int(np.count_nonzero(self.burned))

    def union(self, other: "FireMap") -> "FireMap":
        check_same_grid(self, other)
        return FireMap(self.grid, self.burned | other.burned)

    def issubset(self, other: "FireMap") -> bool:
        check_same_grid(self, other)
        return not np.any(self.burned & ~other.burned)

    def __eq__(self, other):
        if not isinstance(other, FireMap):
            return NotImplemented
        return self.grid == other.grid and np.array_equal(self.burned, other.burned)

    def __hash__(self):
        return hash((self.grid, self.burned.tobytes()))

    def __repr__(self):
        return f"FireMap({self.grid.height}x{self.grid.width}, burned={self.n_burned})"


class IgnitionTimeMap:
    """Per-cell ignition time in minutes.

    Encoding: ``0.0`` marks the initial fire, ``inf`` marks cells that never
    ignite within the simulated horizon, every other cell carries its strictly
    positive ignition time.
    """

    __slots__ = ("grid", "time")

    NEVER = math.inf

    def __init__(self, grid: GridSpec, time):
        self.grid = grid
        self.time = _as_grid_array(grid, time, float)
        if np.any(np.isnan(self.time)) or np.any(self.time < 0):
            raise ValueError("ignition times must be nonnegative")

    @property
    def initial(self) -> np.ndarray:
        return self.time == 0.0

    @property
    def ignited(self) -> np.ndarray:
        return np.isfinite(self.time)

    def __eq__(self, other):
        if not isinstance(other, IgnitionTimeMap):
            return NotImplemented
        return self.grid == other.grid and np.array_equal(self.time, other.time)

    def __hash__(self):
        return hash((self.grid, self.time.tobytes()))

    def __repr__(self):
        return f"IgnitionTimeMap({self.grid.height}x{self.grid.width}, ignited={int(self.ignited.sum())})"


def burned_at(m: IgnitionTimeMap, t: float) -> FireMap:
    """Snapshot of the fire at instant ``t`` (minutes)."""
    if not t >= 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    return FireMap(m.grid, np.isfinite(m.time) & (m.time <= t))


def check_same_grid(*maps) -> GridSpec:
    """Raise ValueError unless all maps share one grid; return it."""
    grid = maps[0].grid
    for other in maps[1:]:
        if other.grid != grid:
            raise ValueError(f"grid mismatch: {grid} vs {other.grid}")
    return grid
