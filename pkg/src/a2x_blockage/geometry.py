"""Shadow geometry for a single height-limited obstacle.

Conventions: the AAP ground projection is the origin, all lengths are in
meters, angles in radians and areas in m^2.  A building is a 2D segment with
center ``x``, length ``l`` and orientation ``omega``.  ``omega`` is measured
from the direction perpendicular to the line ``o -> x``, so the endpoint
``x + (l/2) u`` with ``u = cos(omega) e_t - sin(omega) e_r`` is the one
closer to the origin whenever ``sin(omega) >= 0``.  Drawing ``omega``
uniformly on ``(0, pi]`` is therefore the same as an isotropic orientation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import integrate

from .errors import DegenerateObstacleError, EmptyDiskError, ValidationError

Point = Tuple[float, float]

_QUAD_EPSREL = 1e-10


@dataclass(frozen=True)
class LinkBudget:
    """Normalized transmit parameters; ``noise`` is sigma^2 / P."""

    beam_gain: float
    noise: float
    snr_threshold: float
    pathloss_exponent: float

    def __post_init__(self):
        for name in ("beam_gain", "noise", "snr_threshold"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValidationError(f"{name} must be positive and finite, got {value!r}")
        if not self.pathloss_exponent >= 1:
            raise ValidationError(
                f"pathloss_exponent must be >= 1, got {self.pathloss_exponent!r}")
        if not math.isfinite(max_range(self)):
            raise ValidationError("link budget gives a non-finite maximal range")


@dataclass(frozen=True)
class ScenarioHeights:
    aap_altitude: float
    user_height: float
    building_height: float

    def __post_init__(self):
        h_a, h_u, h_b = self.aap_altitude, self.user_height, self.building_height
        if not all(math.isfinite(h) for h in (h_a, h_u, h_b)):
            raise ValidationError("heights must be finite")
        if h_u < 0:
            raise ValidationError(f"user_height must be >= 0, got {h_u}")
        if not h_a > h_u:
            raise ValidationError(
                f"aap_altitude ({h_a}) must exceed user_height ({h_u})")
        if not h_b >= h_u:
            raise ValidationError(
                f"building_height ({h_b}) must not be below user_height ({h_u})")

    @property
    def above_rooftop(self) -> bool:
        return self.aap_altitude > self.building_height

    @property
    def omega_h(self) -> float:
        """Shadow-stretch factor (H_a - H_u) / (H_a - H_b); inf when H_a <= H_b."""
        if not self.above_rooftop:
            return math.inf
        return (self.aap_altitude - self.user_height) / (
            self.aap_altitude - self.building_height)

    def clearance_fraction(self) -> float:
        """Smallest ``d_cross / d_user`` at which a link still hits the wall.

        A link crossing the building footprint at fraction ``t`` of its 2D
        length is blocked iff ``t`` lies in ``[clearance_fraction, 1]``.
        """
        return max(0.0, (self.aap_altitude - self.building_height)
                   / (self.aap_altitude - self.user_height))


@dataclass(frozen=True)
class BuildingSegment:
    center: Point
    length: float
    orientation: float

    def __post_init__(self):
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))
        if not (self.length >= 0 and math.isfinite(self.length)):
            raise ValidationError(f"length must be >= 0, got {self.length!r}")
        if not math.isfinite(self.orientation):
            raise ValidationError("orientation must be finite")

    @classmethod
    def at_distance(cls, d_x: float, length: float, orientation: float,
                    bearing: float = 0.0) -> "BuildingSegment":
        """Building whose center sits ``d_x`` from the origin at angle ``bearing``."""
        return cls((d_x * math.cos(bearing), d_x * math.sin(bearing)), length, orientation)

    @property
    def d_x(self) -> float:
        return math.hypot(*self.center)

    def endpoints(self) -> Tuple[Point, Point]:
        """(near, far) endpoints for ``sin(orientation) >= 0``."""
        q, p = segment_endpoints(np.array([self.center]), [self.length], [self.orientation])
        return (float(q[0, 0]), float(q[0, 1])), (float(p[0, 0]), float(p[0, 1]))


@dataclass(frozen=True)
class DiskBuilding:
    """Cylindrical building with a circular footprint of the given diameter."""

    center: Point
    diameter: float

    def __post_init__(self):
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))
        if not self.diameter >= 0:
            raise ValidationError(f"diameter must be >= 0, got {self.diameter!r}")

    @property
    def d_x(self) -> float:
        return math.hypot(*self.center)


@dataclass(frozen=True)
class BlockageAngles:
    """Per-building geometry of the part of the footprint inside the disk.

    ``d_s``/``d_l`` are the near/far endpoint distances capped at the disk
    radius, ``theta`` the angle the in-disk chord subtends at the origin,
    ``beta`` the angle from the near endpoint to the foot of the
    perpendicular (negative when the foot lies towards the far endpoint),
    ``d_min`` the distance from the origin to the nearest point of the chord.
    ``omega_h`` is None when the AAP is not above the rooftop.
    """

    d_x: float
    d_s: float
    d_l: float
    theta: float
    beta: float
    d_min: float
    omega_h: Optional[float]


# -- link budget ------------------------------------------------------------

def max_range(budget: LinkBudget) -> float:
    """Radius of the coverage sphere, (G / (sigma^2 gamma))^(1/alpha)."""
    ratio = budget.beam_gain / (budget.noise * budget.snr_threshold)
    return ratio ** (1.0 / budget.pathloss_exponent)


def effective_radius(r_max: float, heights: ScenarioHeights) -> float:
    """Radius of the efficient coverage disk at user height."""
    dh = heights.aap_altitude - heights.user_height
    if not 0 <= dh < r_max:
        raise EmptyDiskError(
            f"AAP {dh:g} m above users cannot reach them with r_max = {r_max:g} m")
    return math.sqrt(r_max * r_max - dh * dh)


# -- segment kernel -----------------------------------------------------------

def segment_endpoints(centers: ArrayLike, lengths: ArrayLike,
                      orientations: ArrayLike) -> Tuple[NDArray, NDArray]:
    """Vectorized (near, far) endpoints of segments, arrays of shape (N, 2)."""
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    lengths = np.asarray(lengths, dtype=float)
    orientations = np.asarray(orientations, dtype=float)
    d = np.hypot(centers[:, 0], centers[:, 1])
    safe = np.where(d > 0, d, 1.0)
    e_r = np.where((d > 0)[:, None], centers / safe[:, None], np.array([1.0, 0.0]))
    e_t = np.stack([-e_r[:, 1], e_r[:, 0]], axis=1)
    u = np.cos(orientations)[:, None] * e_t - np.sin(orientations)[:, None] * e_r
    half = 0.5 * lengths[:, None] * u
    return centers + half, centers - half


def distance_to_origin(near: ArrayLike, far: ArrayLike) -> NDArray:
    """Distance from the origin to the closest point of each segment."""
    near = np.atleast_2d(np.asarray(near, dtype=float))
    v = np.atleast_2d(np.asarray(far, dtype=float)) - near
    vv = np.einsum("ij,ij->i", v, v)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.clip(-np.einsum("ij,ij->i", near, v) / vv, 0.0, 1.0)
    s = np.where(vv > 0, s, 0.0)
    return np.hypot(near[:, 0] + s * v[:, 0], near[:, 1] + s * v[:, 1])


def _local_endpoints(d_x: float, length: float, omega: float):
    # center on the positive x axis; rotation invariance makes this general
    hs, hc = 0.5 * length * math.sin(omega), 0.5 * length * math.cos(omega)
    return (d_x - hs, hc), (d_x + hs, -hc)


def _distance_to_segment(a, b) -> float:
    wx, wy = b[0] - a[0], b[1] - a[1]
    ww = wx * wx + wy * wy
    if ww == 0.0:
        return math.hypot(*a)
    s = min(1.0, max(0.0, -(a[0] * wx + a[1] * wy) / ww))
    return math.hypot(a[0] + s * wx, a[1] + s * wy)


def _check_not_degenerate(d_x: float, length: float, omega: float) -> None:
    q, p = _local_endpoints(d_x, length, omega)
    if _distance_to_segment(q, p) <= 1e-12 * max(1.0, d_x, length):
        raise DegenerateObstacleError(
            "building footprint passes through the AAP ground projection")


def _clip_to_disk(q, p, lam: float):
    """Sub-segment of q-p inside the closed disk of radius lam, or None."""
    vx, vy = p[0] - q[0], p[1] - q[1]
    a = vx * vx + vy * vy
    if a == 0.0:
        return None
    b = 2.0 * (q[0] * vx + q[1] * vy)
    c = q[0] * q[0] + q[1] * q[1] - lam * lam
    disc = b * b - 4.0 * a * c
    if disc <= 0.0:
        return None
    root = math.sqrt(disc)
    lo = max(0.0, (-b - root) / (2.0 * a))
    hi = min(1.0, (-b + root) / (2.0 * a))
    if hi <= lo:
        return None
    return (q[0] + lo * vx, q[1] + lo * vy), (q[0] + hi * vx, q[1] + hi * vy)


def _chord(d_x: float, length: float, omega: float, lam: float):
    """In-disk chord geometry: (d_s, d_l, theta, d_min, near, far).

    ``near``/``far`` are None when no part of the footprint is inside the disk.
    Caller guarantees the footprint does not contain the origin.
    """
    q, p = _local_endpoints(d_x, length, omega)
    clipped = _clip_to_disk(q, p, lam)
    if clipped is None:
        return lam, lam, 0.0, lam, None, None
    a, b = clipped
    ra, rb = min(lam, math.hypot(*a)), min(lam, math.hypot(*b))
    if ra > rb:
        a, b, ra, rb = b, a, rb, ra
    theta = math.atan2(abs(a[0] * b[1] - a[1] * b[0]), a[0] * b[0] + a[1] * b[1])
    return ra, rb, theta, _distance_to_segment(a, b), a, b


def _nogain_area(d_s: float, d_l: float, theta: float, lam: float) -> float:
    return max(0.0, 0.5 * (theta * lam * lam - d_s * d_l * math.sin(theta)))


def _gain_lower(theta: float, d_l: float, lam: float, omega_h: float) -> float:
    return 0.5 * theta * max(0.0, lam * lam - (omega_h * d_l) ** 2)


def _polar_gain(a, b, lam: float, omega_h: float) -> float:
    """Half the integral of [lam^2 - (omega_h d_line(phi))^2]^+ over the chord's span."""
    wx, wy = b[0] - a[0], b[1] - a[1]
    wn = math.hypot(wx, wy)
    if wn == 0.0:
        return 0.0
    ux, uy = wx / wn, wy / wn
    along = a[0] * ux + a[1] * uy
    fx, fy = a[0] - along * ux, a[1] - along * uy
    foot = math.hypot(fx, fy)
    if foot <= 1e-15 * lam:
        return 0.0
    nx, ny = fx / foot, fy / foot

    def rel_angle(pt):
        return math.atan2(nx * pt[1] - ny * pt[0], nx * pt[0] + ny * pt[1])

    psi_lo, psi_hi = sorted((rel_angle(a), rel_angle(b)))
    reach = omega_h * foot
    if reach >= lam:
        return 0.0
    half_span = math.acos(reach / lam)
    lo, hi = max(psi_lo, -half_span), min(psi_hi, half_span)
    if hi <= lo:
        return 0.0

    def integrand(psi):
        c = math.cos(psi)
        return max(0.0, lam * lam - (reach / c) ** 2)

    value, _ = integrate.quad(integrand, lo, hi, epsabs=1e-12 * lam * lam,
                              epsrel=_QUAD_EPSREL, limit=200)
    return 0.5 * value


# -- public operations ---------------------------------------------------------

def chord_distances(b: BuildingSegment, lam: float) -> Tuple[float, float]:
    """Near and far endpoint distances, both capped at ``lam``.

    Raises DegenerateObstacleError if the footprint passes through the origin.
    """
    d_x, (l, w) = b.d_x, (b.length, b.orientation)
    _check_not_degenerate(d_x, l, w)
    base = 0.25 * l * l + d_x * d_x
    cross = d_x * l * math.sin(w)
    near = math.sqrt(max(0.0, base - cross))
    far = math.sqrt(max(0.0, base + cross))
    near, far = min(near, far), max(near, far)
    return min(lam, near), min(lam, far)


def blockage_angles(b: BuildingSegment, heights: ScenarioHeights,
                    lam: float) -> BlockageAngles:
    d_x = b.d_x
    _check_not_degenerate(d_x, b.length, b.orientation)
    d_s, d_l, theta, d_min, _, _ = _chord(d_x, b.length, b.orientation, lam)
    if theta <= 0.0:
        beta = 0.0
    else:
        beta = math.atan((math.cos(theta) - d_s / d_l) / math.sin(theta))
    omega_h = heights.omega_h if heights.above_rooftop else None
    return BlockageAngles(d_x, d_s, d_l, theta, beta, d_min, omega_h)


def _require_above_rooftop(heights: ScenarioHeights) -> None:
    if not heights.above_rooftop:
        raise ValidationError(
            "coverage gain needs the AAP above the rooftop (H_a > H_b), got "
            f"H_a={heights.aap_altitude}, H_b={heights.building_height}")


def coverage_gain_exact(b: BuildingSegment, heights: ScenarioHeights, lam: float) -> float:
    """Area inside the 2D shadow whose links nonetheless clear the rooftop."""
    _require_above_rooftop(heights)
    d_x = b.d_x
    _check_not_degenerate(d_x, b.length, b.orientation)
    d_s, d_l, theta, _, near, far = _chord(d_x, b.length, b.orientation, lam)
    if near is None or theta <= 0.0:
        return 0.0
    gain = _polar_gain(near, far, lam, heights.omega_h)
    return min(max(gain, 0.0), _nogain_area(d_s, d_l, theta, lam))


def shadow_area_exact(b: BuildingSegment, heights: ScenarioHeights, lam: float) -> float:
    """Area of the efficient coverage disk whose link to the AAP is blocked."""
    d_x = b.d_x
    _check_not_degenerate(d_x, b.length, b.orientation)
    d_s, d_l, theta, _, near, far = _chord(d_x, b.length, b.orientation, lam)
    if near is None or theta <= 0.0:
        return 0.0
    area = _nogain_area(d_s, d_l, theta, lam)
    if heights.above_rooftop:
        area -= min(max(_polar_gain(near, far, lam, heights.omega_h), 0.0), area)
    return area


def coverage_gain_bounds(b: BuildingSegment, heights: ScenarioHeights,
                         lam: float) -> Tuple[float, float]:
    """Lower and upper bounds on the coverage gain.

    Each bound pretends every point of the chord sits at one distance: the
    farthest for the lower bound, the nearest for the upper bound.
    """
    _require_above_rooftop(heights)
    ang = blockage_angles(b, heights, lam)
    lower = _gain_lower(ang.theta, ang.d_l, lam, ang.omega_h)
    upper = _gain_lower(ang.theta, ang.d_min, lam, ang.omega_h)
    return lower, upper


def shadow_area_bounds(b: BuildingSegment, heights: ScenarioHeights,
                       lam: float) -> Tuple[float, float]:
    ang = blockage_angles(b, heights, lam)
    nogain = _nogain_area(ang.d_s, ang.d_l, ang.theta, lam)
    if not heights.above_rooftop:
        return nogain, nogain
    gain_lo = _gain_lower(ang.theta, ang.d_l, lam, ang.omega_h)
    gain_hi = _gain_lower(ang.theta, ang.d_min, lam, ang.omega_h)
    return max(0.0, nogain - gain_hi), max(0.0, nogain - gain_lo)


def optimal_altitude(d_l: float, heights: ScenarioHeights) -> float:
    """Altitude maximizing the coverage-gain lower bound for a chord of far distance ``d_l``.

    Only meaningful when the bound is positive there; checking that is left to
    the caller.
    """
    rise = heights.building_height - heights.user_height
    return (d_l * d_l * rise) ** (1.0 / 3.0) + heights.building_height


def gain_lower_vs_altitude(altitudes: ArrayLike, d_l: float, theta: float,
                           r_max: float, user_height: float,
                           building_height: float) -> NDArray:
    """Coverage-gain lower bound as a function of altitude, chord held fixed.

    Altitudes at or below the rooftop, or outside the coverage sphere, give 0.
    """
    h = np.asarray(altitudes, dtype=float)
    dh = h - user_height
    lam_sq = r_max * r_max - dh * dh
    with np.errstate(divide="ignore", invalid="ignore"):
        omega_h = dh / (h - building_height)
        val = 0.5 * theta * np.maximum(0.0, lam_sq - (omega_h * d_l) ** 2)
    return np.where((h > building_height) & (lam_sq > 0), val, 0.0)


def disk_shadow_area(center: Point, diameter: float, heights: ScenarioHeights,
                     lam: float) -> float:
    """Blocked area (footprint included) behind a cylindrical building.

    Exact when the AAP is at or below the rooftop.  Above it, the coverage
    gain is replaced by its lower bound built from the farthest footprint
    distance ``d_x + diameter/2``, so the result over-estimates the shadow.
    """
    d = math.hypot(center[0], center[1])
    a = 0.5 * diameter
    if not d > a:
        raise DegenerateObstacleError("AAP ground projection lies inside the cylinder")
    if a == 0.0 or d - a >= lam:
        return 0.0
    half = math.asin(a / d)
    theta = 2.0 * half
    if d + a <= lam:
        # sector minus the region in front of the disk: kite less the near cap
        tangent = math.sqrt(d * d - a * a)
        area = 0.5 * theta * lam * lam - a * tangent + 0.5 * a * a * (math.pi - theta)
    else:
        def integrand(phi):
            s = d * math.sin(phi)
            entry = d * math.cos(phi) - math.sqrt(max(0.0, a * a - s * s))
            return max(0.0, lam * lam - entry * entry)

        value, _ = integrate.quad(integrand, -half, half, epsabs=1e-12 * lam * lam,
                                  epsrel=_QUAD_EPSREL, limit=200)
        area = 0.5 * value
    if heights.above_rooftop:
        area -= _gain_lower(theta, d + a, lam, heights.omega_h)
    return max(0.0, area)


# -- line-of-sight predicates ------------------------------------------------

def _cross(ax, ay, bx, by):
    return ax * by - ay * bx


def blocked_by_segments(users: ArrayLike, near: ArrayLike, far: ArrayLike,
                        heights: ScenarioHeights) -> NDArray:
    """Boolean (M, N) matrix: is user m's link blocked by segment n.

    A link grazing an endpoint is not blocked.
    """
    users = np.atleast_2d(np.asarray(users, dtype=float))
    near = np.atleast_2d(np.asarray(near, dtype=float))
    far = np.atleast_2d(np.asarray(far, dtype=float))
    ux, uy = users[:, 0:1], users[:, 1:2]
    qx, qy = near[None, :, 0], near[None, :, 1]
    vx, vy = far[None, :, 0] - qx, far[None, :, 1] - qy
    denom = _cross(ux, uy, vx, vy)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = _cross(qx, qy, vx, vy) / denom
        s = _cross(qx, qy, ux, uy) / denom
    return ((denom != 0) & (s > 0) & (s < 1)
            & (t >= heights.clearance_fraction()) & (t <= 1) & (t > 0))


def crossing_fraction(users: ArrayLike, near: ArrayLike, far: ArrayLike) -> NDArray:
    """``d_cross / d_user`` for each (user, segment) pair; nan where the ray misses."""
    users = np.atleast_2d(np.asarray(users, dtype=float))
    near = np.atleast_2d(np.asarray(near, dtype=float))
    far = np.atleast_2d(np.asarray(far, dtype=float))
    ux, uy = users[:, 0:1], users[:, 1:2]
    qx, qy = near[None, :, 0], near[None, :, 1]
    vx, vy = far[None, :, 0] - qx, far[None, :, 1] - qy
    denom = _cross(ux, uy, vx, vy)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = _cross(qx, qy, vx, vy) / denom
        s = _cross(qx, qy, ux, uy) / denom
    hit = (denom != 0) & (s > 0) & (s < 1) & (t > 0)
    return np.where(hit, t, np.nan)


def blocked_by_disks(users: ArrayLike, centers: ArrayLike, diameters: ArrayLike,
                     heights: ScenarioHeights) -> NDArray:
    """Boolean (M, N) matrix for cylindrical buildings."""
    users = np.atleast_2d(np.asarray(users, dtype=float))
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    radius = 0.5 * np.asarray(diameters, dtype=float)[None, :]
    dist = np.hypot(users[:, 0], users[:, 1])[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        along = (users[:, 0:1] * centers[None, :, 0]
                 + users[:, 1:2] * centers[None, :, 1]) / dist
    perp_sq = (centers[None, :, 0] ** 2 + centers[None, :, 1] ** 2) - along ** 2
    half_chord = np.sqrt(np.maximum(0.0, radius ** 2 - perp_sq))
    entry, exit_ = along - half_chord, along + half_chord
    omega_h = heights.omega_h
    return (perp_sq < radius ** 2) & (exit_ > 0) & (entry <= dist) & (dist <= omega_h * exit_)


def los_test(user: Point, b: BuildingSegment, heights: ScenarioHeights) -> bool:
    """True when the building blocks the link from the AAP to ``user``."""
    q, p = b.endpoints()
    return bool(blocked_by_segments([user], [q], [p], heights)[0, 0])
