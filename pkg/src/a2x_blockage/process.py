"""Boolean line-segment building process and uniform user drops.

All randomness flows from ``(seed, stream)`` pairs.  Each stream is an
independent child of ``numpy.random.SeedSequence(seed)``, so realization ``i``
draws the same numbers no matter which worker runs it or in what order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np
from numpy.typing import NDArray

from .errors import ValidationError
from .geometry import BuildingSegment, distance_to_origin, segment_endpoints


@dataclass(frozen=True)
class Uniform:
    """Uniform on the half-open interval (low, high]."""

    low: float
    high: float

    def __post_init__(self):
        if not (math.isfinite(self.low) and math.isfinite(self.high)):
            raise ValidationError("uniform bounds must be finite")
        if not self.high > self.low:
            raise ValidationError(f"uniform needs high > low, got ({self.low}, {self.high}]")

    @property
    def support(self) -> Tuple[float, float]:
        return self.low, self.high

    def pdf(self, x: float) -> float:
        return 1.0 / (self.high - self.low) if self.low < x <= self.high else 0.0

    def sample(self, rng: np.random.Generator, n: int) -> NDArray:
        return self.high - (self.high - self.low) * rng.random(n)


@dataclass(frozen=True)
class PointMass:
    value: float

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValidationError("point-mass value must be finite")

    @property
    def support(self) -> Tuple[float, float]:
        return self.value, self.value

    def sample(self, rng: np.random.Generator, n: int) -> NDArray:
        return np.full(n, float(self.value))


Distribution = Union[Uniform, PointMass]


@dataclass(frozen=True)
class BuildingProcessParams:
    """Density (buildings per m^2), length and orientation laws, sampling window.

    ``window_radius`` may be left as None in a scenario template; it must be
    set (see :meth:`with_padding`) before sampling.
    """

    density: float
    length_dist: Distribution = Uniform(0.0, 15.0)
    orientation_dist: Distribution = Uniform(0.0, math.pi)
    window_radius: Optional[float] = None

    def __post_init__(self):
        if not (self.density >= 0 and math.isfinite(self.density)):
            raise ValidationError(f"density must be >= 0, got {self.density!r}")
        if self.length_dist.support[0] < 0:
            raise ValidationError("building lengths must be >= 0")
        if self.window_radius is not None and not self.window_radius > 0:
            raise ValidationError(f"window_radius must be > 0, got {self.window_radius!r}")

    @property
    def max_length(self) -> float:
        return self.length_dist.support[1]

    def min_window(self, lam: float) -> float:
        return lam + 0.5 * self.max_length

    def with_padding(self, lam: float) -> "BuildingProcessParams":
        """Copy with the window set to cover every building that can reach the disk."""
        if self.window_radius is None:
            return BuildingProcessParams(self.density, self.length_dist,
                                         self.orientation_dist, self.min_window(lam))
        if self.window_radius < self.min_window(lam) - 1e-9:
            raise ValidationError(
                f"window_radius {self.window_radius:g} m is smaller than the disk radius "
                f"plus half the longest building ({self.min_window(lam):g} m)")
        return self


@dataclass(frozen=True)
class BuildingRealization:
    buildings: Tuple[BuildingSegment, ...]
    seed: int
    window_radius: float


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Generator for substream ``stream`` of ``seed``."""
    seq = np.random.SeedSequence(int(seed), spawn_key=(int(stream),))
    return np.random.Generator(np.random.PCG64(seq))


def _uniform_disk(rng: np.random.Generator, n: int, radius: float) -> NDArray:
    r = radius * np.sqrt(rng.random(n))
    phi = 2.0 * math.pi * rng.random(n)
    return np.column_stack([r * np.cos(phi), r * np.sin(phi)])


def _through_origin(centers, lengths, orientations) -> NDArray:
    near, far = segment_endpoints(centers, lengths, orientations)
    return distance_to_origin(near, far) <= 1e-12 * np.maximum(1.0, lengths)


def sample_building_arrays(params: BuildingProcessParams, rng: np.random.Generator):
    """Centers (N, 2), lengths (N,), orientations (N,) for one realization."""
    if params.window_radius is None:
        raise ValidationError("window_radius must be set before sampling")
    mean = params.density * math.pi * params.window_radius ** 2
    n = int(rng.poisson(mean))
    centers = _uniform_disk(rng, n, params.window_radius)
    lengths = params.length_dist.sample(rng, n)
    orientations = params.orientation_dist.sample(rng, n)
    # footprints through the AAP projection are a null event; redraw them
    bad = _through_origin(centers, lengths, orientations) if n else np.zeros(0, bool)
    while bad.any():
        k = int(bad.sum())
        centers[bad] = _uniform_disk(rng, k, params.window_radius)
        lengths[bad] = params.length_dist.sample(rng, k)
        orientations[bad] = params.orientation_dist.sample(rng, k)
        bad = _through_origin(centers, lengths, orientations)
    return centers, lengths, orientations


def sample_buildings(params: BuildingProcessParams, seed: int,
                     stream: int = 0) -> BuildingRealization:
    centers, lengths, orientations = sample_building_arrays(params, make_rng(seed, stream))
    buildings = tuple(BuildingSegment((float(c[0]), float(c[1])), float(l), float(w))
                      for c, l, w in zip(centers, lengths, orientations))
    return BuildingRealization(buildings, int(seed), float(params.window_radius))


def sample_users(n: int, lam: float, seed: int, stream: int = 0) -> NDArray:
    """``n`` points i.i.d. uniform on the disk of radius ``lam``, shape (n, 2)."""
    if n < 1:
        raise ValidationError(f"need at least one user, got {n}")
    if not lam > 0:
        raise ValidationError(f"disk radius must be positive, got {lam}")
    return _uniform_disk(make_rng(seed, stream), n, lam)
