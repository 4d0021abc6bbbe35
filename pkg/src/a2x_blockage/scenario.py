"""The experiment record and its ``key = value`` config format."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

from .errors import ConfigError, ValidationError
from .geometry import LinkBudget, ScenarioHeights, effective_radius, max_range
from .process import BuildingProcessParams, PointMass, Uniform


@dataclass(frozen=True)
class QuadratureSpec:
    relative_tolerance: float = 1e-6
    absolute_tolerance: float = 1e-9
    max_subdivisions: int = 200

    def __post_init__(self):
        if not (self.relative_tolerance > 0 and self.absolute_tolerance > 0):
            raise ValidationError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValidationError("max_subdivisions must be >= 1")


@dataclass(frozen=True)
class MonteCarloControls:
    realizations: int = 2000
    users_per_realization: int = 500
    seed: int = 0

    def __post_init__(self):
        if self.realizations < 1 or self.users_per_realization < 1:
            raise ValidationError("realization and user counts must be >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ValidationError("seed must be a non-negative 64-bit integer")


@dataclass(frozen=True)
class Scenario:
    """Complete experiment configuration.

    Exactly one of ``r_max`` and ``link_budget`` is given.  The defaults are
    the evaluation setup: R_max = 100 m, H_b = 30 m, H_u = 2 m,
    lambda_b = 2e-4 per m^2, lengths U(0, 15] m, orientations U(0, pi].
    """

    heights: ScenarioHeights = ScenarioHeights(50.0, 2.0, 30.0)
    process: BuildingProcessParams = BuildingProcessParams(2e-4)
    r_max: Optional[float] = 100.0
    link_budget: Optional[LinkBudget] = None
    mc: MonteCarloControls = field(default_factory=MonteCarloControls)
    quad: QuadratureSpec = field(default_factory=QuadratureSpec)

    def __post_init__(self):
        if (self.r_max is None) == (self.link_budget is None):
            raise ValidationError("give exactly one of r_max and a link budget")
        if self.r_max is not None and not (self.r_max > 0 and math.isfinite(self.r_max)):
            raise ValidationError(f"r_max must be positive, got {self.r_max!r}")
        lam = effective_radius(self.max_range, self.heights)
        self.process.with_padding(lam)

    @property
    def max_range(self) -> float:
        return self.r_max if self.r_max is not None else max_range(self.link_budget)

    @property
    def effective_radius(self) -> float:
        return effective_radius(self.max_range, self.heights)

    def sampling_params(self) -> BuildingProcessParams:
        return self.process.with_padding(self.effective_radius)

    def vary(self, variable: str, value: float) -> "Scenario":
        """Copy with one of ``lambda_b``, ``h_a``, ``h_b`` replaced."""
        if variable == "lambda_b":
            return replace(self, process=replace(self.process, density=value))
        if variable == "h_a":
            return replace(self, heights=replace(self.heights, aap_altitude=value))
        if variable == "h_b":
            return replace(self, heights=replace(self.heights, building_height=value))
        raise ValidationError(f"cannot sweep over {variable!r}")


_NUMBER = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_PI_FORMS = [
    (re.compile(rf"^({_NUMBER})\s*\*\s*pi$"), lambda m: float(m.group(1)) * math.pi),
    (re.compile(rf"^pi\s*/\s*({_NUMBER})$"), lambda m: math.pi / float(m.group(1))),
    (re.compile(r"^pi$"), lambda m: math.pi),
]

_FLOAT_KEYS = {
    "r_max", "beam_gain", "noise", "snr_threshold", "pathloss_exponent",
    "h_a", "h_b", "h_u", "lambda_b", "len_min", "len_max", "len_fixed",
    "omega_min", "omega_max", "omega_fixed", "window_radius", "rel_tol", "abs_tol",
}
_INT_KEYS = {"realizations", "users", "seed", "max_subdivisions"}
_BUDGET_KEYS = ("beam_gain", "noise", "snr_threshold", "pathloss_exponent")


def _parse_value(key: str, text: str, line: int):
    try:
        if key in _INT_KEYS:
            return int(text)
        for pattern, fn in _PI_FORMS:
            m = pattern.match(text)
            if m:
                return fn(m)
        return float(text)
    except ValueError:
        raise ConfigError(f"bad value {text!r} for {key}", line) from None


def parse_config_text(text: str) -> Scenario:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"expected 'key = value', got {body!r}", lineno)
        key, _, val = (part.strip() for part in body.partition("="))
        if key not in _FLOAT_KEYS and key not in _INT_KEYS:
            raise ConfigError(f"unknown key {key!r}", lineno)
        if key in values:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        values[key] = _parse_value(key, val, lineno)
    try:
        return scenario_from_mapping(values)
    except ValidationError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc


def parse_config(path) -> Scenario:
    return parse_config_text(Path(path).read_text(encoding="utf-8"))


def scenario_from_mapping(values: dict) -> Scenario:
    """Build a Scenario from config keys; missing keys take the defaults."""
    budget_given = [k for k in _BUDGET_KEYS if k in values]
    if budget_given:
        missing = [k for k in _BUDGET_KEYS if k not in values]
        if missing:
            raise ValidationError(f"link budget incomplete, missing {', '.join(missing)}")
        if "r_max" in values:
            raise ValidationError("give exactly one of r_max and a link budget")
        budget = LinkBudget(*(values[k] for k in _BUDGET_KEYS))
        r_max = None
    else:
        budget = None
        r_max = values.get("r_max", 100.0)

    heights = ScenarioHeights(values.get("h_a", 50.0), values.get("h_u", 2.0),
                              values.get("h_b", 30.0))
    if "len_fixed" in values:
        if "len_min" in values or "len_max" in values:
            raise ValidationError("len_fixed excludes len_min/len_max")
        length_dist = PointMass(values["len_fixed"])
    else:
        length_dist = Uniform(values.get("len_min", 0.0), values.get("len_max", 15.0))
    if "omega_fixed" in values:
        if "omega_min" in values or "omega_max" in values:
            raise ValidationError("omega_fixed excludes omega_min/omega_max")
        orientation_dist = PointMass(values["omega_fixed"])
    else:
        orientation_dist = Uniform(values.get("omega_min", 0.0),
                                   values.get("omega_max", math.pi))
    process = BuildingProcessParams(values.get("lambda_b", 2e-4), length_dist,
                                    orientation_dist, values.get("window_radius"))
    mc = MonteCarloControls(values.get("realizations", 2000), values.get("users", 500),
                            values.get("seed", 0))
    quad = QuadratureSpec(values.get("rel_tol", 1e-6), values.get("abs_tol", 1e-9),
                          values.get("max_subdivisions", 200))
    return Scenario(heights, process, r_max, budget, mc, quad)
