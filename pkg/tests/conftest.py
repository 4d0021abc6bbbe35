import math

import numpy as np
import pytest

from a2x_blockage import BuildingSegment, ScenarioHeights

# Reference building used throughout: d_x = 25 m, l = 6 m, omega = pi/4.
REF_BUILDING = dict(d_x=25.0, length=6.0, orientation=math.pi / 4)


@pytest.fixture
def ref_building():
    return BuildingSegment.at_distance(**REF_BUILDING)


@pytest.fixture
def low_heights():
    return ScenarioHeights(30.0, 2.0, 30.0)


def random_configs(n, seed, above_rooftop=None, r_max=100.0):
    """Valid (building, heights, lam) triples for property tests.

    Covers chords clipped by the disk edge, footprints whose nearest point is
    interior, and both altitude regimes unless ``above_rooftop`` pins one.
    """
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        h_u = rng.uniform(0.0, 10.0)
        h_b = rng.uniform(h_u + 1.0, 60.0)
        regime = rng.random() < 0.75 if above_rooftop is None else above_rooftop
        if regime:
            h_a = rng.uniform(h_b + 0.05, h_u + r_max - 1.0)
        else:
            h_a = rng.uniform(h_u + 0.5, h_b)
        if not h_a > h_u:
            continue
        heights = ScenarioHeights(h_a, h_u, h_b)
        lam = math.sqrt(r_max ** 2 - (h_a - h_u) ** 2)
        length = rng.uniform(0.0, 15.0)
        d_x = rng.uniform(0.0, lam + 8.0)
        omega = rng.uniform(0.0, math.pi)
        b = BuildingSegment.at_distance(d_x, length, omega, rng.uniform(-math.pi, math.pi))
        if d_x <= 0.5 * length + 1e-6:
            continue  # stay clear of footprints through the origin
        out.append((b, heights, lam))
    return out


_ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    def record(criterion, ok, detail):
        line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'} ({detail})"
        _ACCEPTANCE_LINES.append(line)
        print(line)
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
