"""Optimal 3D placement of a directional-antenna UAV base station serving aerial users."""

from .baselines import min_sum_distance_placement, random_placement
from .geometry import RegionDescriptor, UserDisk, admissible_radius_m, disks_at_altitude, region_descriptor
from .harness import ExperimentConfig, SweepResult, emit_csv, emit_svg, load_config, run_experiment
from .rf import (
    Airspace,
    InfeasibleError,
    NossPowerBounds,
    Policy,
    Position3D,
    RadioConfig,
    SharingPolicy,
    antenna_gain_db,
    is_covered,
    max_link_distance_m,
    min_altitude_noss_m,
    noss_power_bounds,
    pathloss_db,
    transmit_power_dbm,
)
from .scenarios import McppParams, Scenario, gen_hppp, gen_mcpp, load_scenario, save_scenario
from .solver import Placement, SweepConfig, brute_force_2d, max_coverage_2d, solve_noss, solve_oss

__version__ = "0.1.0"
