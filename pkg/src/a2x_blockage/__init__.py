"""Building blockage and connectivity of a single mmWave aerial access point."""

from .analytic import (AltitudeSweep, BoundResult, blocked_area_upper_integrand,
                       connectivity_lower_bound, sweep_altitude)
from .errors import (A2XError, ConfigError, DegenerateObstacleError, EmptyDiskError,
                     QuadratureError, ValidationError)
from .geometry import (BlockageAngles, BuildingSegment, DiskBuilding, LinkBudget,
                       ScenarioHeights, blockage_angles, chord_distances,
                       coverage_gain_bounds, coverage_gain_exact, disk_shadow_area,
                       effective_radius, gain_lower_vs_altitude, los_test, max_range,
                       optimal_altitude, shadow_area_bounds, shadow_area_exact)
from .montecarlo import (AreaEstimate, ConnectivityEstimate, estimate_connectivity,
                         gain_area_oracle, shadow_area_oracle)
from .process import (BuildingProcessParams, BuildingRealization, PointMass, Uniform,
                      make_rng, sample_buildings, sample_users)
from .scenario import (MonteCarloControls, QuadratureSpec, Scenario, parse_config,
                       parse_config_text)

__version__ = "0.1.0"
