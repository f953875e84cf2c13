import math

import numpy as np
import pytest

from essns.firesim import (MOISTURE_FLOOR, SpreadModel, directional_rate, effective_moisture,
                           simulate)
from essns.landscape import FireMap, GridSpec, Scenario, burned_at, random_scenario
from oracles import all_pairs_times, neighbor_costs

MODEL = SpreadModel()
CALM = Scenario(model=7, wind_spd=0, wind_dir=0, m1=5, m10=5, m100=5, mherb=50, slope=0, aspect=0)


def test_default_constants():
    assert MODEL.base_rate[0] == 1.0 and MODEL.base_rate[-1] == 10.0
    assert np.allclose(np.diff(MODEL.base_rate), 0.75)
    assert MODEL.wind_coeff == 3.0 and MODEL.slope_coeff == 2.0
    assert set(MODEL.moisture_ext) == {30.0}


@pytest.mark.parametrize("kwargs", [
    dict(base_rate=(0.0,) + (1.0,) * 12), dict(base_rate=(1.0,) * 12),
    dict(moisture_ext=(0.0,) * 13), dict(moisture_ext=(101.0,) * 13),
])
def test_invalid_spread_model(kwargs):
    with pytest.raises(ValueError):
        SpreadModel(**kwargs)


def test_spread_model_dict_round_trip():
    m = SpreadModel(wind_coeff=1.5)
    assert SpreadModel.from_dict(m.to_dict()) == m
    with pytest.raises(ValueError):
        SpreadModel.from_dict({"bogus": 1})


def test_isotropic_without_wind_or_slope():
    rates = directional_rate(MODEL, CALM, np.arange(0, 360, 15.0))
    assert np.all(rates == rates[0])


def test_rate_hand_computed():
    # model 7: base 5.5; m_eff = 3 + 1 + 0.5 + 1 = 5.5; damp = 1 - 5.5/30
    expected = 5.5 * (1 - 5.5 / 30)
    assert effective_moisture(CALM) == pytest.approx(5.5)
    assert directional_rate(MODEL, CALM, 123.0) == pytest.approx(expected, rel=1e-14)


def test_wind_favours_downwind_heading():
    # wind from the west blows toward 90 degrees
    s = Scenario(**{**CALM.to_dict(), "wind_spd": 80, "wind_dir": 270})
    down, up = directional_rate(MODEL, s, [90.0, 270.0])
    assert down > up
    base = directional_rate(MODEL, CALM, 0.0)
    assert down == pytest.approx(base * (1 + 3.0))
    assert up == pytest.approx(base)


def test_slope_favours_upslope_heading():
    # a north-facing slope rises toward the south
    s = Scenario(**{**CALM.to_dict(), "slope": 45, "aspect": 0})
    south, north = directional_rate(MODEL, s, [180.0, 0.0])
    base = directional_rate(MODEL, CALM, 0.0)
    assert south == pytest.approx(base * (1 + 2.0 * math.tan(math.radians(45))))
    assert north == pytest.approx(base)


def test_saturated_fuel_hits_moisture_floor():
    wet = Scenario(model=3, wind_spd=40, wind_dir=90, m1=30, m10=30, m100=30, mherb=150,
                   slope=10, aspect=200)
    assert effective_moisture(wet) == pytest.approx(30.0)
    dry_factor = 1 + 3.0 * 0.5 * max(0.0, math.cos(math.radians(0.0 - 270.0)))
    slope_factor = 1 + 2.0 * math.tan(math.radians(10)) * max(0.0, math.cos(math.radians(0.0 - 20.0)))
    expected = MODEL.base_rate[2] * MOISTURE_FLOOR * dry_factor * slope_factor
    assert directional_rate(MODEL, wet, 0.0) == pytest.approx(expected, rel=1e-12)


def test_rate_positive_and_finite_over_random_scenarios(rng):
    for _ in range(500):
        rates = directional_rate(MODEL, random_scenario(rng), np.arange(8) * 45.0)
        assert np.all(rates > 0) and np.all(np.isfinite(rates))


def test_invalid_scenario_is_domain_error():
    with pytest.raises(ValueError):
        directional_rate(MODEL, Scenario(**{**CALM.to_dict(), "wind_spd": 81}), 0.0)


def test_three_by_three_hand_computed():
    grid = GridSpec(3, 3, 30.0)
    r = directional_rate(MODEL, CALM, 0.0)
    times = simulate(grid, MODEL, CALM, FireMap.from_cells(grid, [(1, 1)]), 1e9).time
    orth, diag = 30.0 / r, 30.0 * math.sqrt(2) / r
    assert times[1, 1] == 0.0
    for cell in [(0, 1), (1, 0), (1, 2), (2, 1)]:
        assert times[cell] == pytest.approx(orth, rel=1e-15)
    for cell in [(0, 0), (0, 2), (2, 0), (2, 2)]:
        assert times[cell] == pytest.approx(diag, rel=1e-15)


def test_short_horizon_keeps_only_initial_fire(grid16, center_fire16):
    r = directional_rate(MODEL, CALM, 0.0)
    result = simulate(grid16, MODEL, CALM, center_fire16, 0.5 * 30.0 / r)
    assert burned_at(result, 0.5 * 30.0 / r) == center_fire16
    assert np.isinf(result.time).sum() == grid16.n_cells - 1


def test_horizon_boundary_is_inclusive():
    grid = GridSpec(3, 1, 30.0)
    r = directional_rate(MODEL, CALM, 90.0)
    t = simulate(grid, MODEL, CALM, FireMap.from_cells(grid, [(0, 0)]), 30.0 / r)
    assert t.time[0, 1] == 30.0 / r
    assert np.isinf(t.time[0, 2])


def test_empty_initial_fire_rejected(grid16):
    with pytest.raises(ValueError):
        simulate(grid16, MODEL, CALM, FireMap.empty(grid16), 10.0)


def test_nonpositive_horizon_rejected(grid16, center_fire16):
    with pytest.raises(ValueError):
        simulate(grid16, MODEL, CALM, center_fire16, 0.0)


def test_grid_mismatch_rejected(grid16):
    with pytest.raises(ValueError):
        simulate(grid16, MODEL, CALM, FireMap.from_cells(GridSpec(8, 8), [(1, 1)]), 10.0)


def test_matches_floyd_warshall_on_random_scenarios(rng):
    grid = GridSpec(9, 7, 25.0)
    for _ in range(10):
        s = random_scenario(rng)
        sources = [(int(rng.integers(7)), int(rng.integers(9))) for _ in range(2)]
        costs = neighbor_costs(grid.cell_size, lambda h: float(directional_rate(MODEL, s, h)))
        expected = all_pairs_times(grid.height, grid.width, costs, sources)
        got = simulate(grid, MODEL, s, FireMap.from_cells(grid, sources), 1e12).time
        np.testing.assert_allclose(got, expected, rtol=0, atol=1e-9)


def test_extending_horizon_keeps_earlier_times(rng, grid16, center_fire16):
    for _ in range(20):
        s = random_scenario(rng)
        full = simulate(grid16, MODEL, s, center_fire16, 1e12).time
        cut = np.quantile(full, 0.3)
        short = simulate(grid16, MODEL, s, center_fire16, cut).time
        reached = np.isfinite(short)
        assert np.array_equal(short[reached], full[reached])
        assert np.all(full[~reached] > cut)


def test_bit_identical_repeats(rng, grid16, center_fire16):
    s = random_scenario(rng)
    a = simulate(grid16, MODEL, s, center_fire16, 500.0)
    b = simulate(grid16, MODEL, s, center_fire16, 500.0)
    assert a.time.tobytes() == b.time.tobytes()


def test_calm_rotation_symmetry_on_odd_grid():
    grid = GridSpec(15, 15, 30.0)
    t = simulate(grid, MODEL, CALM, FireMap.from_cells(grid, [(7, 7)]), 1e12).time
    for k in (1, 2, 3):
        assert np.array_equal(np.rot90(t, k), t)
