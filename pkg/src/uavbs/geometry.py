"""Coverage-region descriptors and the fixed-altitude reduction to 2D disks.

At a fixed UAV-BS altitude the two coverage conditions (distance at most
d_max, elevation inside the half beamwidth) collapse, for a user at depth
dz below the UAV-BS, into a horizontal disk of radius
``min(dz * tan(bw/2), sqrt(d_max**2 - dz**2))`` centred on the user.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .rf import Position3D, _check_beamwidth


@dataclass(frozen=True)
class RegionDescriptor:
    d_max_m: float
    h_cone_m: float
    r_base_m: float
    cap_semi_axis_m: float
    ellipsoid_center: Position3D

    def ellipsoid_radius_m(self, dz: float) -> float:
        """Horizontal radius of the half-ellipsoid illustration at depth ``dz``.

        Only meaningful for ``h_cone <= dz <= d_max``; coverage decisions
        never use it.
        """
        t = (dz - self.h_cone_m) / self.cap_semi_axis_m
        return self.r_base_m * math.sqrt(max(0.0, 1.0 - t * t))


@dataclass(frozen=True)
class UserDisk:
    center_xy: tuple[float, float]
    radius_m: float
    user_index: int


def region_descriptor(d_max_m: float, beamwidth_deg: float, bs: Position3D) -> RegionDescriptor:
    _check_beamwidth(beamwidth_deg)
    half = math.radians(beamwidth_deg / 2)
    h_cone = d_max_m * math.cos(half)
    r_base = d_max_m * math.sin(half)
    return RegionDescriptor(
        d_max_m=d_max_m,
        h_cone_m=h_cone,
        r_base_m=r_base,
        cap_semi_axis_m=d_max_m - h_cone,
        ellipsoid_center=Position3D(bs[0], bs[1], bs[2] - h_cone),
    )


def admissible_radius_m(
    bs_alt_m: float, ue_alt_m: float, d_max_m: float, beamwidth_deg: float
) -> float | None:
    """Largest horizontal offset at which the user is still covered, or None."""
    dz = bs_alt_m - ue_alt_m
    if dz <= 0 or dz > d_max_m:
        return None
    cone = dz * math.tan(math.radians(beamwidth_deg / 2))
    cap = math.sqrt(max(0.0, d_max_m * d_max_m - dz * dz))
    return min(cone, cap)


def admissible_radii(
    bs_alt_m: float, ue_alt: np.ndarray, d_max_m: float, beamwidth_deg: float
) -> np.ndarray:
    """Vectorised :func:`admissible_radius_m`; NaN marks uncoverable users."""
    dz = bs_alt_m - np.asarray(ue_alt, dtype=float)
    cone = dz * math.tan(math.radians(beamwidth_deg / 2))
    with np.errstate(invalid="ignore"):
        cap = np.sqrt(np.maximum(0.0, d_max_m * d_max_m - dz * dz))
    r = np.minimum(cone, cap)
    r[(dz <= 0) | (dz > d_max_m)] = np.nan
    return r


def disks_at_altitude(
    users: np.ndarray, bs_alt_m: float, d_max_m: float, beamwidth_deg: float
) -> list[UserDisk]:
    """One closed disk per user coverable from altitude ``bs_alt_m``.

    ``users`` is an (n, 3) array or anything with a ``positions`` attribute
    (e.g. a Scenario).
    """
    pts = _positions(users)
    if len(pts) == 0:
        return []
    r = admissible_radii(bs_alt_m, pts[:, 2], d_max_m, beamwidth_deg)
    return [
        UserDisk((float(pts[i, 0]), float(pts[i, 1])), float(r[i]), i)
        for i in np.flatnonzero(~np.isnan(r))
    ]


def coverage_mask(
    bs: Position3D, users: np.ndarray, d_max_m: float, beamwidth_deg: float
) -> np.ndarray:
    """Vectorised form of :func:`uavbs.rf.is_covered` over an (n, 3) array."""
    pts = _positions(users)
    if len(pts) == 0:
        return np.zeros(0, dtype=bool)
    dz = bs[2] - pts[:, 2]
    dist = np.sqrt((pts[:, 0] - bs[0]) ** 2 + (pts[:, 1] - bs[1]) ** 2 + dz * dz)
    return (dz > 0) & (dist <= d_max_m) & (math.cos(math.radians(beamwidth_deg / 2)) * dist <= dz)


def _positions(users) -> np.ndarray:
    pts = getattr(users, "positions", users)
    return np.asarray(pts, dtype=float).reshape(-1, 3)
