import math

import numpy as np
import pytest

from essns.io import (read_ignition_csv, read_matrix_csv, read_pgm, write_ignition_csv,
                      write_matrix_csv, write_pgm)
from essns.landscape import FireMap, GridSpec, IgnitionTimeMap


def test_pgm_round_trip(tmp_path, rng):
    grid = GridSpec(7, 5, 30.0)
    fire = FireMap(grid, rng.random(grid.shape) < 0.4)
    write_pgm(tmp_path / "f.pgm", fire)
    assert read_pgm(tmp_path / "f.pgm") == fire


def test_pgm_layout(tmp_path):
    fire = FireMap.from_cells(GridSpec(3, 2), [(0, 2), (1, 0)])
    write_pgm(tmp_path / "f.pgm", fire)
    assert (tmp_path / "f.pgm").read_text() == "P2\n3 2\n255\n0 0 255\n255 0 0\n"


def test_pgm_accepts_comments_and_any_layout(tmp_path):
    (tmp_path / "f.pgm").write_text("P2\n# made by hand\n2 2 255\n0 255 255\n0\n")
    assert read_pgm(tmp_path / "f.pgm").burned.tolist() == [[False, True], [True, False]]


@pytest.mark.parametrize("text", ["P5\n1 1\n255\n0\n", "P2\n2 2\n255\n0 0 0\n", "P2\n1 1\n255\n300\n"])
def test_pgm_malformed(tmp_path, text):
    (tmp_path / "f.pgm").write_text(text)
    with pytest.raises(ValueError):
        read_pgm(tmp_path / "f.pgm")


def test_ignition_csv_uses_minus_one_for_never(tmp_path):
    m = IgnitionTimeMap(GridSpec(3, 1), [[0.0, 12.5, math.inf]])
    write_ignition_csv(tmp_path / "t.csv", m)
    assert (tmp_path / "t.csv").read_text().split() == ["0.0,12.5,-1"]
    assert read_ignition_csv(tmp_path / "t.csv") == m


def test_matrix_csv_round_trip(tmp_path, rng):
    values = rng.random((4, 6))
    write_matrix_csv(tmp_path / "m.csv", values)
    assert np.array_equal(read_matrix_csv(tmp_path / "m.csv"), values)
