"""Plain-text map formats: PGM (P2) fire maps and CSV rasters."""
from __future__ import annotations

import csv
import os
from pathlib import Path

import numpy as np

from .landscape import FireMap, GridSpec, IgnitionTimeMap

BURNED_LEVEL = 255


def write_pgm(path: str | os.PathLike, fire: FireMap) -> None:
    """Write a fire map as ASCII PGM: 0 = unburned, 255 = burned."""
    height, width = fire.grid.shape
    lines = ["P2", f"{width} {height}", str(BURNED_LEVEL)]
    for row in fire.burned:
        lines.append(" ".join(str(BURNED_LEVEL) if v else "0" for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def _pgm_tokens(text: str):
    for line in text.splitlines():
        line = line.split("#", 1)[0]
        yield from line.split()


def read_pgm(path: str | os.PathLike, cell_size: float = 30.0) -> FireMap:
    """Parse an ASCII PGM; any nonzero level counts as burned."""
    tokens = list(_pgm_tokens(Path(path).read_text(encoding="ascii")))
    if not tokens or tokens[0] != "P2":
        raise ValueError(f"{path}: not a plain-text PGM (P2) file")
    try:
        width, height, maxval = (int(tok) for tok in tokens[1:4])
        values = np.array([int(tok) for tok in tokens[4:]], dtype=int)
    except ValueError as exc:
        raise ValueError(f"{path}: malformed PGM header or pixel data") from exc
    if values.size != width * height:
        raise ValueError(f"{path}: expected {width * height} pixels, found {values.size}")
    if maxval < 1 or np.any(values < 0) or np.any(values > maxval):
        raise ValueError(f"{path}: pixel values out of range 0..{maxval}")
    grid = GridSpec(width=width, height=height, cell_size=cell_size)
    return FireMap(grid, values.reshape(height, width) > 0)


def write_ignition_csv(path: str | os.PathLike, m: IgnitionTimeMap) -> None:
    """Row-major CSV, one value per cell, -1 for cells that never ignite."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in m.time:
            writer.writerow(["-1" if not np.isfinite(v) else repr(float(v)) for v in row])


def read_ignition_csv(path: str | os.PathLike, cell_size: float = 30.0) -> IgnitionTimeMap:
    with open(path, newline="") as fh:
        rows = [[float(v) for v in row] for row in csv.reader(fh) if row]
    time = np.array(rows, dtype=float)
    time[time == -1] = np.inf
    grid = GridSpec(width=time.shape[1], height=time.shape[0], cell_size=cell_size)
    return IgnitionTimeMap(grid, time)


def write_matrix_csv(path: str | os.PathLike, values: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in values:
            writer.writerow([repr(float(v)) for v in row])


def read_matrix_csv(path: str | os.PathLike) -> np.ndarray:
    with open(path, newline="") as fh:
        return np.array([[float(v) for v in row] for row in csv.reader(fh) if row], dtype=float)
