"""Link budget, antenna and spectrum-sharing arithmetic.

All powers are in dBm, gains and losses in dB, distances in meters and
angles in degrees unless a name says otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import NamedTuple

SPEED_OF_LIGHT = 3e8  # m/s, rounded


class Position3D(NamedTuple):
    x: float
    y: float
    z: float


class Policy(str, Enum):
    OSS = "oss"
    NOSS = "noss"


@dataclass(frozen=True)
class RadioConfig:
    """Transmitter/receiver parameters of the aerial link."""

    eirp_dbm: float = 30.0
    carrier_hz: float = 2e9
    pathloss_exp: float = 2.0
    sensitivity_dbm: float = -70.0
    beamwidth_deg: float = 60.0
    # stored for completeness; coverage uses the main lobe only
    sidelobe_gain_db: float = -10.0

    def __post_init__(self):
        _check_beamwidth(self.beamwidth_deg)
        if not self.pathloss_exp >= 1:
            raise ValueError(f"pathloss_exp must be >= 1, got {self.pathloss_exp}")
        if not self.carrier_hz > 0:
            raise ValueError(f"carrier_hz must be positive, got {self.carrier_hz}")
        if not self.eirp_dbm > self.sensitivity_dbm:
            raise ValueError(
                f"eirp_dbm ({self.eirp_dbm}) must exceed sensitivity_dbm ({self.sensitivity_dbm})"
            )

    @property
    def threshold_db(self) -> float:
        """Maximal tolerated pathloss, P_T - P_min."""
        return self.eirp_dbm - self.sensitivity_dbm

    def with_eirp(self, eirp_dbm: float) -> RadioConfig:
        return replace(self, eirp_dbm=eirp_dbm)


@dataclass(frozen=True)
class SharingPolicy:
    variant: Policy = Policy.OSS
    guard_alt_m: float = 50.0
    interference_dbm: float = -73.0

    def __post_init__(self):
        object.__setattr__(self, "variant", Policy(self.variant))
        if self.variant is Policy.NOSS:
            if not (math.isfinite(self.guard_alt_m) and self.guard_alt_m >= 0):
                raise ValueError(f"guard_alt_m must be finite and >= 0, got {self.guard_alt_m}")
            if not math.isfinite(self.interference_dbm):
                raise ValueError("interference_dbm must be finite")

    @classmethod
    def oss(cls) -> SharingPolicy:
        return cls(Policy.OSS)

    @classmethod
    def noss(cls, guard_alt_m: float = 50.0, interference_dbm: float = -73.0) -> SharingPolicy:
        return cls(Policy.NOSS, guard_alt_m, interference_dbm)

    @property
    def is_noss(self) -> bool:
        return self.variant is Policy.NOSS


@dataclass(frozen=True)
class Airspace:
    """Horizontal box and altitude corridor where users fly."""

    x_range_m: tuple[float, float] = (0.0, 3000.0)
    y_range_m: tuple[float, float] = (0.0, 3000.0)
    h_min_m: float = 100.0
    h_max_m: float = 300.0

    def __post_init__(self):
        object.__setattr__(self, "x_range_m", tuple(float(v) for v in self.x_range_m))
        object.__setattr__(self, "y_range_m", tuple(float(v) for v in self.y_range_m))
        if not 0 <= self.h_min_m < self.h_max_m:
            raise ValueError(f"need 0 <= h_min < h_max, got {self.h_min_m}, {self.h_max_m}")
        for lo, hi in (self.x_range_m, self.y_range_m):
            if not lo < hi:
                raise ValueError(f"empty horizontal range ({lo}, {hi})")

    @property
    def volume_km3(self) -> float:
        dx = self.x_range_m[1] - self.x_range_m[0]
        dy = self.y_range_m[1] - self.y_range_m[0]
        return dx * dy * (self.h_max_m - self.h_min_m) * 1e-9

    @property
    def center_xy(self) -> tuple[float, float]:
        return (sum(self.x_range_m) / 2, sum(self.y_range_m) / 2)


@dataclass(frozen=True)
class NossPowerBounds:
    p_low_dbm: float
    p_high_dbm: float
    omega: float
    feasible: bool

    @property
    def unbounded_below(self) -> bool:
        return self.p_low_dbm == -math.inf


class InfeasibleError(ValueError):
    """No placement satisfies the spectrum-sharing constraints."""


def _check_beamwidth(beamwidth_deg: float) -> None:
    if not 0 < beamwidth_deg < 180:
        raise ValueError(f"beamwidth must lie in (0, 180) degrees, got {beamwidth_deg}")


def main_lobe_gain_db(beamwidth_deg: float) -> float:
    _check_beamwidth(beamwidth_deg)
    return 10 * math.log10(29000.0 / beamwidth_deg**2)


def antenna_gain_db(beamwidth_deg: float, sector_angle_deg: float, sidelobe_gain_db: float) -> float:
    """Main-lobe gain inside the half beamwidth (inclusive), side-lobe gain outside."""
    g3db = main_lobe_gain_db(beamwidth_deg)
    if abs(sector_angle_deg) <= beamwidth_deg / 2:
        return g3db
    return sidelobe_gain_db


def transmit_power_dbm(eirp_dbm: float, beamwidth_deg: float) -> float:
    """Radio output power needed to reach ``eirp_dbm`` through the main lobe."""
    return eirp_dbm - main_lobe_gain_db(beamwidth_deg)


def _wavelength_factor(carrier_hz: float) -> float:
    # c / (4 pi f_c): the distance at which free-space loss is 0 dB
    return SPEED_OF_LIGHT / (4 * math.pi * carrier_hz)


def pathloss_db(distance_m: float, carrier_hz: float, pathloss_exp: float) -> float:
    if not distance_m > 0:
        raise ValueError(f"distance must be positive, got {distance_m}")
    return 10 * pathloss_exp * math.log10(distance_m / _wavelength_factor(carrier_hz))


def distance_for_loss_m(loss_db: float, carrier_hz: float, pathloss_exp: float) -> float:
    """Inverse of :func:`pathloss_db`."""
    return _wavelength_factor(carrier_hz) * 10 ** (loss_db / (10 * pathloss_exp))


def max_link_distance_m(cfg: RadioConfig) -> float:
    return distance_for_loss_m(cfg.threshold_db, cfg.carrier_hz, cfg.pathloss_exp)


def min_altitude_noss_m(cfg: RadioConfig, policy: SharingPolicy) -> float:
    """Lowest UAV-BS altitude keeping interference at h_guard below the ceiling."""
    if not policy.is_noss:
        raise ValueError("minimum interference altitude is only defined under NOSS")
    separation = distance_for_loss_m(
        cfg.eirp_dbm - policy.interference_dbm, cfg.carrier_hz, cfg.pathloss_exp
    )
    return separation + policy.guard_alt_m


def feasible_altitude_range(
    cfg: RadioConfig, policy: SharingPolicy, airspace: Airspace
) -> tuple[float, float]:
    """Altitudes [lo, hi] the solvers search. ``lo > hi`` means empty."""
    lo = airspace.h_max_m
    if policy.is_noss:
        lo = max(lo, min_altitude_noss_m(cfg, policy))
    return lo, airspace.h_max_m + max_link_distance_m(cfg)


def noss_power_bounds(cfg: RadioConfig, policy: SharingPolicy, airspace: Airspace) -> NossPowerBounds:
    """EIRP interval keeping the UAV-BS within [h_max, h_max + d_max] under NOSS.

    ``cfg.eirp_dbm`` is ignored. Infeasibility is reported through the
    ``feasible`` flag rather than raised.
    """
    if not policy.is_noss:
        raise ValueError("power bounds are only defined under NOSS")
    n = cfg.pathloss_exp
    delta = policy.interference_dbm
    omega = 10 ** (-delta / (10 * n)) - 10 ** (-cfg.sensitivity_dbm / (10 * n))
    separation = airspace.h_max_m - policy.guard_alt_m
    lam = _wavelength_factor(cfg.carrier_hz)
    if separation > 0:
        p_low = 10 * n * math.log10(separation / lam) + delta
    elif separation == 0:
        p_low = -math.inf
    else:
        # guard above the corridor ceiling: no EIRP can keep z_BS = h_max legal
        return NossPowerBounds(math.nan, math.nan, omega, False)
    if omega <= 0 or separation == 0:
        p_high = math.nan if omega <= 0 else -math.inf
        return NossPowerBounds(p_low, p_high, omega, False)
    p_high = 10 * n * math.log10(separation / (lam * omega))
    return NossPowerBounds(p_low, p_high, omega, p_low <= p_high)


def is_covered(bs: Position3D, ue: Position3D, d_max_m: float, beamwidth_deg: float) -> bool:
    """Exact main-lobe coverage test: within range and inside the down-tilted cone.

    Users at or above the UAV-BS altitude are never covered.
    """
    dz = bs[2] - ue[2]
    if dz <= 0:
        return False
    dist = math.sqrt((ue[0] - bs[0]) ** 2 + (ue[1] - bs[1]) ** 2 + dz * dz)
    return dist <= d_max_m and math.cos(math.radians(beamwidth_deg / 2)) * dist <= dz
