"""Command-line front end; every command writes CSV to stdout.

Exit codes: 0 success, 1 usage error, 2 validation or geometry error,
3 numerical nonconvergence.
"""

from __future__ import annotations

import argparse
import csv
import logging
import math
import sys
from dataclasses import replace
from typing import List, Optional, Sequence

import numpy as np

from .analytic import connectivity_lower_bound
from .errors import A2XError, DegenerateObstacleError, QuadratureError, ValidationError
from .geometry import (BuildingSegment, blockage_angles, coverage_gain_bounds,
                       coverage_gain_exact, effective_radius, gain_lower_vs_altitude,
                       optimal_altitude, shadow_area_bounds, shadow_area_exact)
from .montecarlo import estimate_connectivity
from .scenario import Scenario, parse_config

log = logging.getLogger("a2x_blockage")

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_NUMERIC = 0, 1, 2, 3

SHADOW_COLUMNS = ["h_a", "d_x", "length", "omega", "d_s", "d_l", "theta",
                  "s_b_exact", "s_b_lower", "s_b_upper",
                  "s_gain_exact", "s_gain_lower", "s_gain_upper"]
SIMULATE_COLUMNS = ["p_c_hat", "standard_error", "n_realizations",
                    "users_per_realization", "seed"]
BOUND_COLUMNS = ["p_c_lower", "raw_value", "mean_blocked_area", "clipped"]
SWEEP_COLUMNS = ["p_c_hat", "stderr", "p_c_lower", "error"]
OPTIMIZE_COLUMNS = ["d_l", "theta", "h_a_closed_form", "gain_lower_closed_form",
                    "h_a_grid", "gain_lower_grid"]


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".9g")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_grid(text: str) -> List[float]:
    """``START:STOP:STEP`` with STOP included, or a single number."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return [float(parts[0])]
        if len(parts) != 3:
            raise ValueError
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must be START:STOP:STEP, got {text!r}")
    if step <= 0 or stop < start:
        raise argparse.ArgumentTypeError("grid needs STEP > 0 and STOP >= START")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [start + i * step for i in range(n)]


def _load_scenario(args) -> Scenario:
    scenario = parse_config(args.config) if args.config else Scenario()
    if args.seed is not None:
        scenario = replace(scenario, mc=replace(scenario.mc, seed=args.seed))
    return scenario


def _writer(out):
    return csv.writer(out, lineterminator="\n")


def shadow_row(scenario: Scenario, h_a: float, d_x: float, length: float,
               omega: float) -> list:
    heights = replace(scenario.heights, aap_altitude=h_a)
    lam = effective_radius(scenario.max_range, heights)
    b = BuildingSegment.at_distance(d_x, length, omega)
    ang = blockage_angles(b, heights, lam)
    s_b = shadow_area_exact(b, heights, lam)
    s_b_lo, s_b_hi = shadow_area_bounds(b, heights, lam)
    if heights.above_rooftop:
        gain = coverage_gain_exact(b, heights, lam)
        gain_lo, gain_hi = coverage_gain_bounds(b, heights, lam)
    else:
        gain = gain_lo = gain_hi = 0.0
    return [h_a, d_x, length, omega, ang.d_s, ang.d_l, ang.theta,
            s_b, s_b_lo, s_b_hi, gain, gain_lo, gain_hi]


def cmd_shadow(args, out) -> int:
    scenario = _load_scenario(args)
    altitudes = args.grid if args.grid else [scenario.heights.aap_altitude]
    w = _writer(out)
    w.writerow(SHADOW_COLUMNS)
    for h_a in altitudes:
        w.writerow(fmt(v) for v in shadow_row(scenario, h_a, args.dx, args.length, args.omega))
    return EXIT_OK


def cmd_simulate(args, out) -> int:
    scenario = _load_scenario(args)
    est = estimate_connectivity(scenario, workers=args.threads)
    w = _writer(out)
    w.writerow(SIMULATE_COLUMNS)
    w.writerow(fmt(v) for v in (est.p_c_hat, est.standard_error, est.n_realizations,
                                est.users_per_realization, est.seed))
    return EXIT_OK


def cmd_bound(args, out) -> int:
    scenario = _load_scenario(args)
    res = connectivity_lower_bound(scenario)
    if res.clipped:
        log.warning("bound clipped to [0, 1] (raw value %.6g)", res.raw_value)
    w = _writer(out)
    w.writerow(BOUND_COLUMNS)
    w.writerow(fmt(v) for v in (res.p_c_lower, res.raw_value, res.mean_blocked_area,
                                res.clipped))
    return EXIT_OK


def cmd_sweep(args, out) -> int:
    scenario = _load_scenario(args)
    if not args.grid:
        raise ValidationError("sweep needs --grid")
    w = _writer(out)
    w.writerow([args.var] + SWEEP_COLUMNS)
    succeeded = 0
    for value in args.grid:
        try:
            point = scenario.vary(args.var, value)
            est = estimate_connectivity(point, workers=args.threads)
            bound = connectivity_lower_bound(point)
        except A2XError as exc:
            log.error("%s = %g failed: %s", args.var, value, exc)
            w.writerow([fmt(value), "", "", "", f"{type(exc).__name__}: {exc}"])
            continue
        succeeded += 1
        w.writerow([fmt(value), fmt(est.p_c_hat), fmt(est.standard_error),
                    fmt(bound.p_c_lower), ""])
    return EXIT_OK if succeeded else EXIT_INVALID


def optimize_row(scenario: Scenario, d_l: float, theta: float, step: float = 0.01) -> list:
    heights = scenario.heights
    h_u, h_b = heights.user_height, heights.building_height
    r_max = scenario.max_range
    closed = optimal_altitude(d_l, heights)
    top = h_u + r_max
    n = int(math.floor((top - h_b) / step))
    grid = h_b + step * np.arange(1, n + 1)
    gains = gain_lower_vs_altitude(grid, d_l, theta, r_max, h_u, h_b)
    best = int(np.argmax(gains)) if len(grid) else None
    closed_gain = float(gain_lower_vs_altitude([closed], d_l, theta, r_max, h_u, h_b)[0])
    if best is None:
        return [d_l, theta, closed, closed_gain, None, None]
    return [d_l, theta, closed, closed_gain, grid[best], gains[best]]


def cmd_optimize_altitude(args, out) -> int:
    scenario = _load_scenario(args)
    w = _writer(out)
    w.writerow(OPTIMIZE_COLUMNS)
    w.writerow(fmt(v) for v in optimize_row(scenario, args.d_l, args.theta, args.step))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="key = value scenario file")
    common.add_argument("--seed", type=int, help="overrides the config seed")
    common.add_argument("--threads", type=int, default=1, help="worker processes")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="a2x-blockage", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("shadow", parents=[common], help="shadow areas for one building")
    p.add_argument("--dx", type=float, required=True, help="center distance (m)")
    p.add_argument("--length", type=float, required=True, help="segment length (m)")
    p.add_argument("--omega", type=float, required=True, help="orientation (rad)")
    p.add_argument("--grid", type=parse_grid, help="AAP altitudes START:STOP:STEP")
    p.set_defaults(func=cmd_shadow)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo connectivity")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bound", parents=[common], help="analytic lower bound")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("sweep", parents=[common], help="paired simulation and bound")
    p.add_argument("--var", choices=["lambda_b", "h_a", "h_b"], required=True)
    p.add_argument("--grid", type=parse_grid, required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("optimize-altitude", parents=[common],
                       help="altitude maximizing the coverage-gain lower bound")
    p.add_argument("--d-l", dest="d_l", type=float, required=True, help="far distance (m)")
    p.add_argument("--theta", type=float, default=1.0,
                   help="subtended angle (rad); scales the gain, not the optimum")
    p.add_argument("--step", type=float, default=0.01, help="grid-search step (m)")
    p.set_defaults(func=cmd_optimize_altitude)
    return parser


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    if args.threads < 1:
        log.error("--threads must be >= 1")
        return EXIT_USAGE
    try:
        return args.func(args, out)
    except QuadratureError as exc:
        log.error("%s", exc)
        return EXIT_NUMERIC
    except (ValidationError, DegenerateObstacleError) as exc:
        log.error("%s", exc)
        return EXIT_INVALID
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
