"""Comparison placements: geometric-median and uniformly random."""

from __future__ import annotations

import numpy as np

from . import rf
from .rf import Airspace, InfeasibleError, RadioConfig, SharingPolicy
from .solver import Placement, _airspace, _placement, _users


def sum_distance(q: np.ndarray, users: np.ndarray) -> float:
    return float(np.linalg.norm(users - q, axis=1).sum())


def _altitude_floor(cfg: RadioConfig, policy: SharingPolicy, airspace: Airspace) -> float:
    return rf.feasible_altitude_range(cfg, policy, airspace)[0]


def geometric_median_above(
    users: np.ndarray, z_floor: float, tol: float = 1e-6, max_iter: int = 10_000
) -> np.ndarray:
    """Minimise the summed Euclidean distance subject to ``z >= z_floor``.

    Weiszfeld iterations; each weighted mean is projected onto the
    half-space, which is the exact minimiser of the isotropic quadratic
    majoriser, so the objective never increases.
    """
    q = users.mean(axis=0)
    q[2] = max(q[2], z_floor)
    obj = sum_distance(q, users)
    for _ in range(max_iter):
        dist = np.linalg.norm(users - q, axis=1)
        if np.any(dist == 0):
            # gradient undefined on a data point
            q = q + 1e-9
            dist = np.linalg.norm(users - q, axis=1)
        w = 1.0 / dist
        nxt = (w[:, None] * users).sum(axis=0) / w.sum()
        nxt[2] = max(nxt[2], z_floor)
        new_obj = sum_distance(nxt, users)
        assert new_obj <= obj + 1e-9 * max(1.0, obj), "Weiszfeld objective increased"
        step = float(np.linalg.norm(nxt - q))
        q, obj = nxt, new_obj
        if step < tol:
            break
    return q


def min_sum_distance_placement(
    scenario, cfg: RadioConfig, policy: SharingPolicy = SharingPolicy.oss(), airspace: Airspace | None = None
) -> Placement:
    """UAV-BS at the point of minimum total distance (hence minimum total
    pathloss) to the users, above the feasible altitude floor."""
    users = _users(scenario)
    if len(users) == 0:
        raise ValueError("minimum sum distance placement needs at least one user")
    airspace = _airspace(scenario, airspace)
    q = geometric_median_above(users, _altitude_floor(cfg, policy, airspace))
    return _placement(users, q[:2], q[2], cfg.eirp_dbm, cfg)


def random_placement(
    scenario, cfg: RadioConfig, policy: SharingPolicy = SharingPolicy.oss(),
    airspace: Airspace | None = None, seed: int = 0, randomize_eirp: bool = True,
) -> Placement:
    """Uniform position in the box and altitude in the solver's search range.

    Under NOSS the EIRP is also drawn uniformly from its feasible bounds
    unless ``randomize_eirp`` is false.
    """
    airspace = _airspace(scenario, airspace)
    users = _users(scenario)
    rng = np.random.default_rng(seed)
    if policy.is_noss and randomize_eirp:
        bounds = rf.noss_power_bounds(cfg, policy, airspace)
        if not bounds.feasible:
            raise InfeasibleError(f"no feasible EIRP under {policy}")
        cfg = cfg.with_eirp(float(rng.uniform(bounds.p_low_dbm, bounds.p_high_dbm)))
    lo, hi = rf.feasible_altitude_range(cfg, policy, airspace)
    x = rng.uniform(*airspace.x_range_m)
    y = rng.uniform(*airspace.y_range_m)
    z = rng.uniform(lo, max(lo, hi))
    return _placement(users, (x, y), z, cfg.eirp_dbm, cfg)

