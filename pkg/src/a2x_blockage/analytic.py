"""Lower bound on the connectivity probability by nested quadrature.

Ignoring overlap between shadows, Campbell's theorem turns the expected
blocked fraction into

    E[sum S_b] / (pi Lam^2) = (2 lambda_b / Lam^2) * E_{l, omega}[ int_0^Lam S_b(r) r dr ]

and replacing S_b with a pointwise upper bound gives a lower bound on p_c.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple

from scipy import integrate

from .errors import A2XError, DegenerateObstacleError, QuadratureError
from .geometry import _check_not_degenerate, _chord, _gain_lower
from .process import PointMass, Uniform
from .scenario import QuadratureSpec, Scenario

__all__ = [
    "QuadratureSpec", "BoundResult", "AltitudeSweep", "blocked_area_upper_integrand",
    "connectivity_lower_bound", "sweep_altitude",
]


@dataclass(frozen=True)
class BoundResult:
    """``mean_blocked_area`` is the expected summed per-building bound in m^2."""

    p_c_lower: float
    raw_value: float
    mean_blocked_area: float
    clipped: bool


@dataclass(frozen=True)
class AltitudeSweep:
    altitudes: Tuple[float, ...]
    values: Tuple[Optional[float], ...]
    errors: Tuple[Optional[str], ...]
    best_altitude: Optional[float]


def _upper_bound(r: float, length: float, omega: float, lam: float,
                 omega_h: Optional[float]) -> float:
    try:
        _check_not_degenerate(r, length, omega)
    except DegenerateObstacleError:
        return 0.5 * math.pi * lam * lam
    d_s, d_l, theta, _, _, _ = _chord(r, length, omega, lam)
    if theta <= 0.0:
        return 0.0
    area = 0.5 * (theta * lam * lam - d_s * d_s * math.sin(theta))
    if omega_h is not None:
        area -= _gain_lower(theta, d_l, lam, omega_h)
    return max(0.0, area)


def blocked_area_upper_integrand(r: float, length: float, omega: float,
                                 scenario: Scenario) -> float:
    """Upper bound on one building's blocked area, building centered at distance ``r``.

    Uses the squared near distance in the triangle term and the coverage-gain
    lower bound.  A footprint through the origin returns the half-disk worst
    case.
    """
    heights = scenario.heights
    omega_h = heights.omega_h if heights.above_rooftop else None
    return _upper_bound(r, length, omega, scenario.effective_radius, omega_h)


def _radius_solving(length: float, sin_w: float, target: float, sign: float) -> Optional[float]:
    # r such that the endpoint distance sqrt(l^2/4 + r^2 + sign*r*l*sin_w) equals target
    disc = (length * sin_w) ** 2 - length * length + 4.0 * target * target
    if disc < 0:
        return None
    r = 0.5 * (-sign * length * sin_w + math.sqrt(disc))
    return r if r > 0 else None


def _breakpoints(length: float, omega: float, lam: float,
                 omega_h: Optional[float]) -> List[float]:
    sin_w = abs(math.sin(omega))
    points = []
    targets = [lam] + ([lam / omega_h] if omega_h is not None else [])
    for target in targets:
        for sign in (1.0, -1.0):
            r = _radius_solving(length, sin_w, target, sign)
            if r is not None:
                points.append(r)
    if sin_w > 0:
        points.append(0.5 * length / sin_w)
    return sorted(p for p in points if 0.0 < p < lam)


class _Integrator:
    def __init__(self, quad: QuadratureSpec):
        self.quad = quad

    def __call__(self, fn, lo, hi, points=None):
        points = list(points or ())
        if len(points) >= self.quad.max_subdivisions:
            # quadpack wants fewer breakpoints than subintervals; go piecewise
            edges = [lo, *points, hi]
            return sum(self(fn, a, b) for a, b in zip(edges, edges[1:]) if b > a)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            result = integrate.quad(
                fn, lo, hi, epsabs=self.quad.absolute_tolerance,
                epsrel=self.quad.relative_tolerance, limit=self.quad.max_subdivisions,
                points=points or None, full_output=1)
        # a fourth element is the failure message; only exhaustion is fatal
        if len(result) > 3 and result[2].get("last", 0) >= self.quad.max_subdivisions:
            raise QuadratureError(
                f"quadrature on [{lo:g}, {hi:g}] exceeded {self.quad.max_subdivisions} "
                "subdivisions")
        return result[0]


def _expected(fn, dist, integrate_fn):
    if isinstance(dist, PointMass):
        return fn(dist.value)
    if isinstance(dist, Uniform):
        return integrate_fn(fn, dist.low, dist.high) / (dist.high - dist.low)
    raise TypeError(f"unsupported distribution {dist!r}")


def _mean_radial_moment(scenario: Scenario) -> float:
    """E_{l, omega}[ int_0^Lam S_b^+(r) r dr ]."""
    lam = scenario.effective_radius
    heights = scenario.heights
    omega_h = heights.omega_h if heights.above_rooftop else None
    quad = _Integrator(scenario.quad)

    def radial(length, omega):
        if length == 0.0:
            return 0.0
        return quad(lambda r: _upper_bound(r, length, omega, lam, omega_h) * r,
                    0.0, lam, _breakpoints(length, omega, lam, omega_h))

    def over_orientation(length):
        return _expected(lambda w: radial(length, w), scenario.process.orientation_dist, quad)

    return _expected(over_orientation, scenario.process.length_dist, quad)


def connectivity_lower_bound(scenario: Scenario,
                             quad: Optional[QuadratureSpec] = None) -> BoundResult:
    if quad is not None and quad != scenario.quad:
        scenario = replace(scenario, quad=quad)
    lam = scenario.effective_radius
    density = scenario.process.density
    if density == 0.0:
        return BoundResult(1.0, 1.0, 0.0, False)
    moment = _mean_radial_moment(scenario)
    mean_blocked = 2.0 * math.pi * density * moment
    raw = 1.0 - mean_blocked / (math.pi * lam * lam)
    clipped_value = min(1.0, max(0.0, raw))
    return BoundResult(clipped_value, raw, mean_blocked, clipped_value != raw)


def sweep_altitude(scenario: Scenario, altitudes: Sequence[float],
                   quad: Optional[QuadratureSpec] = None) -> AltitudeSweep:
    """Bound at each altitude; ties in the argmax go to the lowest altitude."""
    values, errors = [], []
    for h_a in altitudes:
        try:
            values.append(connectivity_lower_bound(scenario.vary("h_a", h_a), quad).p_c_lower)
            errors.append(None)
        except A2XError as exc:
            values.append(None)
            errors.append(f"{type(exc).__name__}: {exc}")
    best = None
    for h_a, v in sorted(zip(altitudes, values), key=lambda item: item[0]):
        if v is not None and (best is None or v > best[1]):
            best = (h_a, v)
    return AltitudeSweep(tuple(altitudes), tuple(values), tuple(errors),
                         None if best is None else best[0])
