"""Monte Carlo ground truth: connectivity probability and area oracles."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .errors import ValidationError
from .geometry import (BuildingSegment, DiskBuilding, ScenarioHeights,
                       blocked_by_disks, blocked_by_segments, crossing_fraction,
                       distance_to_origin, segment_endpoints)
from .process import _uniform_disk, make_rng, sample_building_arrays
from .scenario import Scenario

_ORACLE_BATCH = 1 << 18


@dataclass(frozen=True)
class ConnectivityEstimate:
    p_c_hat: float
    standard_error: float
    n_realizations: int
    users_per_realization: int
    seed: int


@dataclass(frozen=True)
class AreaEstimate:
    area_hat: float
    standard_error: float
    n_samples: int


def _connected_fractions(scenario: Scenario, lam: float, start: int, stop: int,
                         users_per_realization: int, seed: int,
                         fixed: Optional[tuple]) -> np.ndarray:
    params = scenario.sampling_params()
    heights = scenario.heights
    out = np.empty(stop - start)
    for k, index in enumerate(range(start, stop)):
        rng = make_rng(seed, index)
        if fixed is None:
            centers, lengths, orientations = sample_building_arrays(params, rng)
            near, far = segment_endpoints(centers, lengths, orientations)
        else:
            near, far = fixed
        users = _uniform_disk(rng, users_per_realization, lam)
        if len(near) == 0:
            out[k] = 1.0
            continue
        # footprints that stay outside the disk cannot block anyone
        keep = distance_to_origin(near, far) < lam
        if not keep.any():
            out[k] = 1.0
            continue
        blocked = blocked_by_segments(users, near[keep], far[keep], heights).any(axis=1)
        out[k] = 1.0 - blocked.mean()
    return out


def estimate_connectivity(scenario: Scenario, n_realizations: Optional[int] = None,
                          users_per_realization: Optional[int] = None,
                          seed: Optional[int] = None, *,
                          buildings: Optional[Sequence[BuildingSegment]] = None,
                          workers: int = 1) -> ConnectivityEstimate:
    """Spatial-average connectivity probability by simulation.

    Each realization draws buildings over the padded window and users over the
    efficient coverage disk; the per-realization connected fraction is
    averaged, and the standard error is taken across realizations since users
    of one realization share the same buildings.  Passing ``buildings`` fixes
    the building layout in every realization.  Results do not depend on
    ``workers``.
    """
    n_realizations = scenario.mc.realizations if n_realizations is None else n_realizations
    users_per_realization = (scenario.mc.users_per_realization
                             if users_per_realization is None else users_per_realization)
    seed = scenario.mc.seed if seed is None else seed
    if n_realizations < 1 or users_per_realization < 1:
        raise ValidationError("realization and user counts must be >= 1")
    lam = scenario.effective_radius

    fixed = None
    if buildings is not None:
        if buildings:
            near, far = segment_endpoints([b.center for b in buildings],
                                          [b.length for b in buildings],
                                          [b.orientation for b in buildings])
        else:
            near = far = np.zeros((0, 2))
        fixed = (near, far)

    if workers <= 1 or n_realizations < 2 * workers:
        fractions = _connected_fractions(scenario, lam, 0, n_realizations,
                                         users_per_realization, seed, fixed)
    else:
        edges = np.linspace(0, n_realizations, workers + 1).astype(int)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(_connected_fractions,
                             [scenario] * workers, [lam] * workers,
                             edges[:-1].tolist(), edges[1:].tolist(),
                             [users_per_realization] * workers, [seed] * workers,
                             [fixed] * workers)
            fractions = np.concatenate(list(parts))

    p_hat = float(fractions.mean())
    se = float(fractions.std(ddof=1) / math.sqrt(n_realizations)) if n_realizations > 1 else 0.0
    return ConnectivityEstimate(p_hat, se, n_realizations, users_per_realization, int(seed))


def _area_estimate(hits: int, n: int, lam: float) -> AreaEstimate:
    disk = math.pi * lam * lam
    frac = hits / n
    return AreaEstimate(frac * disk, disk * math.sqrt(frac * (1.0 - frac) / n), n)


def _count(predicate, lam: float, n_samples: int, seed: int) -> int:
    if n_samples < 1:
        raise ValidationError("n_samples must be >= 1")
    rng = make_rng(seed)
    hits = 0
    for start in range(0, n_samples, _ORACLE_BATCH):
        pts = _uniform_disk(rng, min(_ORACLE_BATCH, n_samples - start), lam)
        hits += int(np.count_nonzero(predicate(pts)))
    return hits


def shadow_area_oracle(obstacle: Union[BuildingSegment, DiskBuilding],
                       heights: ScenarioHeights, lam: float, n_samples: int = 10 ** 6,
                       seed: int = 0) -> AreaEstimate:
    """Blocked area of one obstacle by rejection sampling over the disk."""
    if isinstance(obstacle, DiskBuilding):
        def predicate(pts):
            return blocked_by_disks(pts, [obstacle.center], [obstacle.diameter], heights)[:, 0]
    else:
        q, p = obstacle.endpoints()

        def predicate(pts):
            return blocked_by_segments(pts, [q], [p], heights)[:, 0]
    return _area_estimate(_count(predicate, lam, n_samples, seed), n_samples, lam)


def gain_area_oracle(b: BuildingSegment, heights: ScenarioHeights, lam: float,
                     n_samples: int = 10 ** 6, seed: int = 0) -> AreaEstimate:
    """Area behind the footprint whose links clear the rooftop, by rejection sampling."""
    if not heights.above_rooftop:
        raise ValidationError("coverage gain needs the AAP above the rooftop")
    q, p = b.endpoints()
    clear = heights.clearance_fraction()

    def predicate(pts):
        t = crossing_fraction(pts, [q], [p])[:, 0]
        return t < clear  # nan compares False

    return _area_estimate(_count(predicate, lam, n_samples, seed), n_samples, lam)
