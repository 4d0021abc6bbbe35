import math

import pytest

from a2x_blockage import (BuildingSegment, ScenarioHeights, ValidationError,
                          effective_radius, estimate_connectivity, gain_area_oracle,
                          shadow_area_exact, shadow_area_oracle)
from a2x_blockage.scenario import Scenario

DEFAULT = Scenario()


def test_no_buildings_full_connectivity():
    est = estimate_connectivity(DEFAULT.vary("lambda_b", 0.0), 50, 100)
    assert est.p_c_hat == 1.0
    assert est.standard_error == 0.0
    assert est.n_realizations == 50 and est.users_per_realization == 100


def test_reproducible_and_worker_independent():
    a = estimate_connectivity(DEFAULT, 120, 200, seed=8)
    b = estimate_connectivity(DEFAULT, 120, 200, seed=8, workers=3)
    assert a == b
    assert 0.0 < a.p_c_hat < 1.0
    assert estimate_connectivity(DEFAULT, 120, 200, seed=9) != a


def test_single_injected_building_matches_shadow():
    scenario = DEFAULT.vary("h_a", 25.0)
    lam = scenario.effective_radius
    b = BuildingSegment.at_distance(25.0, 6.0, math.pi / 4, bearing=0.3)
    est = estimate_connectivity(scenario, 400, 500, seed=1, buildings=[b])
    expected = 1.0 - shadow_area_exact(b, scenario.heights, lam) / (math.pi * lam * lam)
    assert abs(est.p_c_hat - expected) <= 3 * est.standard_error


def test_empty_injection():
    assert estimate_connectivity(DEFAULT, 10, 10, buildings=[]).p_c_hat == 1.0


def test_standard_error_shrinks_with_realizations():
    small = estimate_connectivity(DEFAULT, 1000, 200, seed=4)
    large = estimate_connectivity(DEFAULT, 2000, 200, seed=4)
    ratio = large.standard_error / small.standard_error
    assert abs(ratio - 1 / math.sqrt(2)) <= 0.2 / math.sqrt(2)


def test_connectivity_falls_with_density_and_height():
    grid = [1e-5, 1e-4, 5e-4]
    ests = [estimate_connectivity(DEFAULT.vary("lambda_b", v), 500, 300) for v in grid]
    for a, b in zip(ests, ests[1:]):
        assert b.p_c_hat <= a.p_c_hat + 3 * math.hypot(a.standard_error, b.standard_error)
    tall = [estimate_connectivity(DEFAULT.vary("h_b", h), 500, 300) for h in (10.0, 30.0, 45.0)]
    for a, b in zip(tall, tall[1:]):
        assert b.p_c_hat <= a.p_c_hat + 3 * math.hypot(a.standard_error, b.standard_error)


def test_invalid_counts():
    with pytest.raises(ValidationError):
        estimate_connectivity(DEFAULT, 0, 10)


# -- area oracles ---------------------------------------------------------------

def test_oracle_point_obstacle():
    est = shadow_area_oracle(BuildingSegment.at_distance(25.0, 0.0, 1.0),
                             ScenarioHeights(30.0, 2.0, 30.0), 96.0, 10 ** 5)
    assert est.area_hat == 0.0


def test_oracle_outside_disk():
    est = shadow_area_oracle(BuildingSegment.at_distance(150.0, 6.0, 1.0),
                             ScenarioHeights(30.0, 2.0, 30.0), 96.0, 10 ** 5)
    assert est.area_hat == 0.0 and est.n_samples == 10 ** 5


def test_oracle_deterministic(ref_building, low_heights):
    a = shadow_area_oracle(ref_building, low_heights, 96.0, 10 ** 5, seed=5)
    assert a == shadow_area_oracle(ref_building, low_heights, 96.0, 10 ** 5, seed=5)
    assert 0.0 <= a.area_hat <= math.pi * 96.0 ** 2


def test_gain_oracle_requires_altitude(ref_building, low_heights):
    with pytest.raises(ValidationError):
        gain_area_oracle(ref_building, low_heights, 96.0)


def test_gain_oracle_zero_just_above_roof(ref_building):
    heights = ScenarioHeights(30.001, 2.0, 30.0)
    est = gain_area_oracle(ref_building, heights, effective_radius(100.0, heights), 10 ** 5)
    assert est.area_hat == 0.0


def test_gain_oracle_matches_reference(ref_building):
    heights = ScenarioHeights(58.0, 2.0, 30.0)
    est = gain_area_oracle(ref_building, heights, effective_radius(100.0, heights),
                           10 ** 6, seed=6)
    assert abs(est.area_hat - 373.068941640062250) <= 3 * est.standard_error


def test_gain_oracle_high_altitude_limit(ref_building):
    est = gain_area_oracle(ref_building, ScenarioHeights(1e6, 2.0, 30.0), 96.0, 10 ** 6, seed=7)
    assert abs(est.area_hat - 732.691378762317254) <= 3 * est.standard_error + 0.1
