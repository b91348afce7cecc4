"""Exact coverage maximisation for a single UAV-BS.

At a fixed altitude the problem is to find a horizontal point lying in the
largest number of user disks (maximum depth of a disk arrangement). Every
depth maximum of closed disks is attained either on some disk boundary or
at a disk centre, so for each disk we sweep its boundary angularly over the
arcs cut out by all other disks. The altitude (and, under NOSS, the EIRP)
is then searched exhaustively on a grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import rf
from .geometry import UserDisk, admissible_radii, coverage_mask
from .rf import Airspace, InfeasibleError, Position3D, RadioConfig, SharingPolicy

REL_TOL = 1e-9
# boundary candidates are pulled this fraction of the radius into their disk
_INWARD = 1e-7
TIE_BREAK_RULES = ("low-alt-low-eirp-lex",)


@dataclass(frozen=True)
class SweepConfig:
    altitude_step_m: float = 5.0
    power_step_db: float = 0.5
    tie_break: str = "low-alt-low-eirp-lex"

    def __post_init__(self):
        if not (self.altitude_step_m > 0 and self.power_step_db > 0):
            raise ValueError("sweep steps must be positive")
        if self.tie_break not in TIE_BREAK_RULES:
            raise ValueError(f"unknown tie-break rule {self.tie_break!r}")


@dataclass
class Placement:
    bs_position: Position3D
    eirp_dbm: float
    covered: np.ndarray = field(repr=False)
    count: int

    def covered_indices(self) -> list[int]:
        return [int(i) for i in np.flatnonzero(self.covered)]


@dataclass(frozen=True)
class DepthResult:
    point: tuple[float, float]
    members: np.ndarray  # indices into the input disk arrays
    count: int


def _max_depth(cx: np.ndarray, cy: np.ndarray, r: np.ndarray, floor: int = -1) -> DepthResult | None:
    """Deepest point of the closed-disk arrangement.

    Returns None without searching when no point can reach more than
    ``floor`` disks.
    """
    n = len(r)
    if n == 0:
        return None if floor >= 0 else DepthResult((0.0, 0.0), np.zeros(0, dtype=int), 0)

    dx = cx[None, :] - cx[:, None]
    dy = cy[None, :] - cy[:, None]
    d2 = dx * dx + dy * dy
    ri = r[:, None]
    rj = r[None, :]
    touching = d2 <= (ri + rj) ** 2 * (1 + REL_TOL)
    if touching.sum(axis=1).max() <= floor:
        return None

    # row i, column j: how disk j meets the boundary circle of disk i
    full = (rj >= ri) & (d2 <= (rj - ri) ** 2 * (1 + REL_TOL))
    inside = (ri > rj) & (d2 < (ri - rj) ** 2 * (1 - REL_TOL))
    crossing = touching & ~full & ~inside & (ri > 0) & (d2 > 0)

    d = np.sqrt(d2)
    with np.errstate(divide="ignore", invalid="ignore"):
        cos_half = (ri * ri + d2 - rj * rj) / (2 * ri * d)
    half = np.arccos(np.clip(np.where(crossing, cos_half, 1.0), -1.0, 1.0))
    toward = np.arctan2(dy, dx)
    start = np.mod(toward - half, 2 * math.pi)
    end = start + 2 * half
    wrap = crossing & (end >= 2 * math.pi)
    end = np.where(wrap, end - 2 * math.pi, end)

    angles = np.concatenate([np.where(crossing, start, np.inf), np.where(crossing, end, np.inf)], axis=1)
    deltas = np.concatenate([crossing.astype(np.int64), -crossing.astype(np.int64)], axis=1)
    # closed arcs: at equal angles openings are processed before closings
    order = np.lexsort((-deltas, angles), axis=1)
    angles = np.take_along_axis(angles, order, axis=1)
    deltas = np.take_along_axis(deltas, order, axis=1)

    init = full.sum(axis=1) + wrap.sum(axis=1)
    depth = init[:, None] + np.cumsum(deltas, axis=1)
    valid = np.isfinite(angles)
    m = valid.sum(axis=1)
    rows = np.flatnonzero(m > 0)

    cand_x = [cx]
    cand_y = [cy]
    cand_rank = [np.zeros(n, dtype=int)]
    if len(rows):
        nxt = np.empty_like(angles)
        nxt[:, :-1] = angles[:, 1:]
        nxt[:, -1] = np.inf
        nxt[rows, m[rows] - 1] = angles[rows, 0] + 2 * math.pi
        with np.errstate(invalid="ignore"):
            length = nxt - angles
        positive = valid & (length > 1e-12)
        score = np.where(valid, 2 * depth + positive, -1)
        k = np.argmax(score, axis=1)[rows]
        a = angles[rows, k]
        pos = positive[rows, k]
        theta = np.where(pos, 0.5 * (a + nxt[rows, k]), a)
        rad = r[rows]
        ux, uy = np.cos(theta), np.sin(theta)
        # nudged interior point for open arcs, exact boundary point as fallback
        scale = np.where(pos, 1 - _INWARD, 1.0)
        cand_x += [cx[rows] + rad * scale * ux, cx[rows] + rad * ux]
        cand_y += [cy[rows] + rad * scale * uy, cy[rows] + rad * uy]
        cand_rank += [np.where(pos, 0, 1), np.ones(len(rows), dtype=int)]

    px = np.concatenate(cand_x)
    py = np.concatenate(cand_y)
    rank = np.concatenate(cand_rank)
    member = _membership(px, py, cx, cy, r)
    counts = member.sum(axis=1)
    best = np.lexsort((py, px, rank, -counts))[0]
    return DepthResult((float(px[best]), float(py[best])), np.flatnonzero(member[best]), int(counts[best]))


def _membership(px, py, cx, cy, r) -> np.ndarray:
    d2 = (px[:, None] - cx[None, :]) ** 2 + (py[:, None] - cy[None, :]) ** 2
    return d2 <= (r * r)[None, :] * (1 + REL_TOL)


def _disk_arrays(disks: Sequence[UserDisk]):
    cx = np.array([dk.center_xy[0] for dk in disks], dtype=float)
    cy = np.array([dk.center_xy[1] for dk in disks], dtype=float)
    r = np.array([dk.radius_m for dk in disks], dtype=float)
    return cx, cy, r


def max_coverage_2d(
    disks: Sequence[UserDisk], tie_break: str = TIE_BREAK_RULES[0]
) -> tuple[tuple[float, float], frozenset[int], int]:
    """Point covered by the most disks, the user indices it covers, and their count.

    Ties are broken towards interior points, then the lexicographically
    smallest candidate ``(x, y)``.
    """
    if tie_break not in TIE_BREAK_RULES:
        raise ValueError(f"unknown tie-break rule {tie_break!r}")
    if not disks:
        return (0.0, 0.0), frozenset(), 0
    res = _max_depth(*_disk_arrays(disks))
    return res.point, frozenset(disks[i].user_index for i in res.members), res.count


def brute_force_2d(disks: Sequence[UserDisk], resolution_m: float) -> tuple[tuple[float, float], int]:
    """Exhaustive depth evaluation over a grid, all centres and all pairwise
    circle intersection points. Used as an independent oracle."""
    if not resolution_m > 0:
        raise ValueError("resolution must be positive")
    if not disks:
        return (0.0, 0.0), 0
    cx, cy, r = _disk_arrays(disks)
    xs, ys = [cx], [cy]

    n = len(r)
    for i in range(n):
        for j in range(i + 1, n):
            for p in _circle_intersections(cx[i], cy[i], r[i], cx[j], cy[j], r[j]):
                xs.append(np.array([p[0]]))
                ys.append(np.array([p[1]]))

    gx = np.arange(np.min(cx - r), np.max(cx + r) + resolution_m, resolution_m)
    gy = np.arange(np.min(cy - r), np.max(cy + r) + resolution_m, resolution_m)
    best_pt, best = (0.0, 0.0), -1
    px = np.concatenate(xs)
    py = np.concatenate(ys)
    chunks = [(px, py)]
    for row in gy:
        chunks.append((gx, np.full_like(gx, row)))
    for qx, qy in chunks:
        counts = _membership(qx, qy, cx, cy, r).sum(axis=1)
        k = int(np.argmax(counts))
        if counts[k] > best:
            best, best_pt = int(counts[k]), (float(qx[k]), float(qy[k]))
    return best_pt, best


def _circle_intersections(x0, y0, r0, x1, y1, r1) -> list[tuple[float, float]]:
    d = math.hypot(x1 - x0, y1 - y0)
    if d == 0 or d > r0 + r1 or d < abs(r0 - r1):
        return []
    a = (r0 * r0 - r1 * r1 + d * d) / (2 * d)
    h = math.sqrt(max(0.0, r0 * r0 - a * a))
    mx = x0 + a * (x1 - x0) / d
    my = y0 + a * (y1 - y0) / d
    ox = h * (y1 - y0) / d
    oy = h * (x1 - x0) / d
    return [(mx + ox, my - oy), (mx - ox, my + oy)]


def value_grid(lo: float, hi: float, step: float) -> np.ndarray:
    """``lo, lo + step, ...`` up to ``hi``, both endpoints included."""
    if hi < lo:
        return np.zeros(0)
    k = int(math.floor((hi - lo) / step + 1e-9))
    grid = lo + step * np.arange(k + 1)
    if hi - grid[-1] > 1e-9 * max(1.0, abs(hi)):
        grid = np.append(grid, hi)
    return grid


def _search(users: np.ndarray, cells: Iterable[tuple[float, float]], cfg: RadioConfig) -> tuple | None:
    """Best (z, eirp, depth result) over (eirp, altitude) cells, or None
    when no cell covers anyone.

    Order of preference: count, then lower altitude, lower EIRP, and the
    2D tie-break.
    """
    best = None  # (count, z, p, DepthResult, mask of disk users)
    d_max_cache: dict[float, float] = {}
    for p, z in cells:
        if p not in d_max_cache:
            d_max_cache[p] = rf.max_link_distance_m(cfg.with_eirp(p))
        radii = admissible_radii(z, users[:, 2], d_max_cache[p], cfg.beamwidth_deg)
        ok = ~np.isnan(radii)
        if best is None:
            floor = 0
        else:
            floor = best[0] if (z, p) > (best[1], best[2]) else best[0] - 1
        if ok.sum() <= floor:
            continue
        idx = np.flatnonzero(ok)
        res = _max_depth(users[idx, 0], users[idx, 1], radii[idx], floor)
        if res is None or res.count <= floor:
            continue
        if best is None or (-res.count, z, p) < (-best[0], best[1], best[2]):
            best = (res.count, z, p, res, idx)
    return best


def _placement(users: np.ndarray, point, z: float, eirp: float, cfg: RadioConfig) -> Placement:
    bs = Position3D(float(point[0]), float(point[1]), float(z))
    mask = coverage_mask(bs, users, rf.max_link_distance_m(cfg.with_eirp(eirp)), cfg.beamwidth_deg)
    return Placement(bs, float(eirp), mask, int(mask.sum()))


def _users(scenario) -> np.ndarray:
    return np.asarray(getattr(scenario, "positions", scenario), dtype=float).reshape(-1, 3)


def _airspace(scenario, airspace: Airspace | None) -> Airspace:
    if airspace is not None:
        return airspace
    if getattr(scenario, "airspace", None) is None:
        raise ValueError("an airspace is required when the scenario does not carry one")
    return scenario.airspace


def solve_at_altitude(scenario, cfg: RadioConfig, altitude_m: float) -> Placement:
    """Optimal horizontal position at a fixed altitude and EIRP."""
    users = _users(scenario)
    best = _search(users, [(cfg.eirp_dbm, altitude_m)], cfg)
    if best is None:
        return _placement(users, (0.0, 0.0), altitude_m, cfg.eirp_dbm, cfg)
    return _placement(users, best[3].point, altitude_m, cfg.eirp_dbm, cfg)


def solve_oss(
    scenario, cfg: RadioConfig, airspace: Airspace | None = None, sweep: SweepConfig = SweepConfig()
) -> Placement:
    """Exhaustive altitude search over [h_max, h_max + d_max] at fixed EIRP."""
    airspace = _airspace(scenario, airspace)
    users = _users(scenario)
    lo, hi = rf.feasible_altitude_range(cfg, SharingPolicy.oss(), airspace)
    grid = value_grid(lo, hi, sweep.altitude_step_m)
    best = _search(users, ((cfg.eirp_dbm, float(z)) for z in grid), cfg)
    if best is None:
        return _placement(users, airspace.center_xy, lo, cfg.eirp_dbm, cfg)
    return _placement(users, best[3].point, best[1], best[2], cfg)


def solve_noss(
    scenario,
    cfg: RadioConfig,
    policy: SharingPolicy,
    airspace: Airspace | None = None,
    sweep: SweepConfig = SweepConfig(),
    fast_altitude: bool = False,
    eirp_dbm: float | None = None,
) -> Placement:
    """Joint EIRP and altitude search under the interference constraint.

    ``cfg.eirp_dbm`` is ignored; the EIRP is swept over the feasible bounds
    unless ``eirp_dbm`` pins it. Altitudes start at the interference floor
    max(h_max, z_min(P_T)); with ``fast_altitude`` only that floor is tried.
    """
    if not policy.is_noss:
        raise ValueError("solve_noss requires a NOSS policy")
    airspace = _airspace(scenario, airspace)
    users = _users(scenario)
    if eirp_dbm is None:
        bounds = rf.noss_power_bounds(cfg, policy, airspace)
        if not bounds.feasible:
            raise InfeasibleError(f"no feasible EIRP under {policy}: {bounds}")
        powers = value_grid(bounds.p_low_dbm, bounds.p_high_dbm, sweep.power_step_db)
    else:
        powers = np.array([eirp_dbm], dtype=float)

    cells = []
    for p in powers:
        lo, hi = rf.feasible_altitude_range(cfg.with_eirp(float(p)), policy, airspace)
        if lo > hi + 1e-9:
            continue
        zs = [lo] if fast_altitude else value_grid(lo, max(lo, hi), sweep.altitude_step_m)
        cells.extend((float(p), float(z)) for z in zs)

    best = _search(users, cells, cfg)
    if best is None:
        p0 = float(powers[0])
        if cells:
            p0, z0 = cells[0]
        else:
            z0 = rf.feasible_altitude_range(cfg.with_eirp(p0), policy, airspace)[0]
        return _placement(users, airspace.center_xy, z0, p0, cfg)
    return _placement(users, best[3].point, best[1], best[2], cfg)


def audit_placement(
    placement: Placement, scenario, cfg: RadioConfig, policy: SharingPolicy | None = None,
    airspace: Airspace | None = None,
) -> None:
    """Re-check a placement against the scalar coverage predicate and the
    altitude constraints. Raises AssertionError on any violation."""
    users = _users(scenario)
    cfg_p = cfg.with_eirp(placement.eirp_dbm)
    d_max = rf.max_link_distance_m(cfg_p)
    assert len(placement.covered) == len(users), "indicator length mismatch"
    assert placement.count == int(np.count_nonzero(placement.covered)), "count mismatch"
    for i, q in enumerate(users):
        ok = rf.is_covered(placement.bs_position, Position3D(*q), d_max, cfg.beamwidth_deg)
        assert ok == bool(placement.covered[i]), f"user {i}: indicator {placement.covered[i]} but predicate {ok}"
    if airspace is None:
        airspace = getattr(scenario, "airspace", None)
    if airspace is not None:
        assert placement.bs_position.z >= airspace.h_max_m - 1e-6, "UAV-BS below the corridor ceiling"
    if policy is not None and policy.is_noss:
        z_min = rf.min_altitude_noss_m(cfg_p, policy)
        assert placement.bs_position.z >= z_min - 1e-6, "interference constraint violated"
