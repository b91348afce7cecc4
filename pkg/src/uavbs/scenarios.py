"""Seeded UAV-UE point patterns inside the air corridor, and their files.

Scenario files are JSON Lines: the first line is a header object, then
one object per user::

    {"format": "uavbs-scenario", "version": 1, "unit": "meters", "seed": 7,
     "generator": {"kind": "hppp", "density_per_km3": 30.0},
     "airspace": {"x_range_m": [0, 3000], "y_range_m": [0, 3000],
                  "h_min_m": 100, "h_max_m": 300}}
    {"index": 0, "x": 812.25, "y": 40.5, "z": 233.0}
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .rf import Airspace

FORMAT = "uavbs-scenario"
VERSION = 1


class ScenarioFileError(ValueError):
    pass


@dataclass
class Scenario:
    positions: np.ndarray  # (n, 3), meters
    airspace: Airspace
    seed: int | None = None
    generator: dict = field(default_factory=dict)

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=float).reshape(-1, 3)
        bad = _outside(self.positions, self.airspace)
        if bad.any():
            i = int(np.flatnonzero(bad)[0])
            raise ValueError(f"user {i} at {self.positions[i].tolist()} lies outside the corridor")

    def __len__(self):
        return len(self.positions)

    @property
    def users(self) -> np.ndarray:
        return self.positions


@dataclass(frozen=True)
class McppParams:
    parent_density_per_km3: float
    daughter_density_per_km3: float
    daughter_radius_m: float = 150.0

    def __post_init__(self):
        if not (self.parent_density_per_km3 > 0 and self.daughter_density_per_km3 > 0
                and self.daughter_radius_m > 0):
            raise ValueError(f"cluster parameters must be positive: {self}")

    @property
    def mean_daughters(self) -> float:
        return self.daughter_density_per_km3 * 4 / 3 * math.pi * (self.daughter_radius_m * 1e-3) ** 3


def _outside(pts: np.ndarray, a: Airspace) -> np.ndarray:
    return (
        (pts[:, 0] < a.x_range_m[0]) | (pts[:, 0] > a.x_range_m[1])
        | (pts[:, 1] < a.y_range_m[0]) | (pts[:, 1] > a.y_range_m[1])
        | (pts[:, 2] < a.h_min_m) | (pts[:, 2] > a.h_max_m)
    )


def _uniform_box(rng: np.random.Generator, a: Airspace, n: int) -> np.ndarray:
    lo = np.array([a.x_range_m[0], a.y_range_m[0], a.h_min_m])
    hi = np.array([a.x_range_m[1], a.y_range_m[1], a.h_max_m])
    return rng.uniform(lo, hi, size=(n, 3))


def gen_hppp(airspace: Airspace, density_per_km3: float, seed: int) -> Scenario:
    if density_per_km3 < 0:
        raise ValueError("density must be non-negative")
    rng = np.random.default_rng(seed)
    n = rng.poisson(density_per_km3 * airspace.volume_km3)
    return Scenario(
        _uniform_box(rng, airspace, n), airspace, seed,
        {"kind": "hppp", "density_per_km3": float(density_per_km3)},
    )


def gen_mcpp(
    airspace: Airspace, params: McppParams, seed: int, parents: np.ndarray | None = None
) -> Scenario:
    """Matérn cluster process; only daughters inside the corridor box are kept.

    ``parents`` overrides the parent HPPP draw (cluster heads are never users).
    """
    rng = np.random.default_rng(seed)
    if parents is None:
        parents = _uniform_box(rng, airspace, rng.poisson(params.parent_density_per_km3 * airspace.volume_km3))
    parents = np.asarray(parents, dtype=float).reshape(-1, 3)
    counts = rng.poisson(params.mean_daughters, size=len(parents))
    total = int(counts.sum())
    # uniform in the ball: isotropic direction, radius ~ r_D * U^(1/3)
    direction = rng.normal(size=(total, 3))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    radius = params.daughter_radius_m * rng.uniform(size=total) ** (1 / 3)
    pts = np.repeat(parents, counts, axis=0) + direction * radius[:, None]
    pts = pts[~_outside(pts, airspace)]
    return Scenario(pts, airspace, seed, {"kind": "mcpp", **asdict(params)})


def trial_seed(master_seed: int, *key: int) -> int:
    """64-bit seed that depends only on the master seed and the index key."""
    ss = np.random.SeedSequence(master_seed, spawn_key=tuple(int(k) for k in key))
    hi, lo = ss.generate_state(2, dtype=np.uint32)
    return (int(hi) << 32) | int(lo)


def save_scenario(s: Scenario, path) -> None:
    header = {
        "format": FORMAT,
        "version": VERSION,
        "unit": "meters",
        "seed": s.seed,
        "generator": s.generator,
        "airspace": asdict(s.airspace),
    }
    lines = [json.dumps(header)]
    lines += [json.dumps({"index": i, "x": float(x), "y": float(y), "z": float(z)})
              for i, (x, y, z) in enumerate(s.positions)]
    Path(path).write_text("\n".join(lines) + "\n")


def load_scenario(path) -> Scenario:
    text = Path(path).read_text()
    lines = [(n, ln) for n, ln in enumerate(text.splitlines(), 1) if ln.strip()]
    if not lines:
        raise ScenarioFileError(f"{path}: empty file, expected a header line")
    header = _parse(path, *lines[0])
    if header.get("format") != FORMAT:
        raise ScenarioFileError(f"{path}:1: field 'format' must be {FORMAT!r}")
    try:
        airspace = Airspace(**header["airspace"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioFileError(f"{path}:{lines[0][0]}: bad field 'airspace': {exc}") from None

    pts = []
    for k, (lineno, line) in enumerate(lines[1:]):
        rec = _parse(path, lineno, line)
        for name in ("index", "x", "y", "z"):
            if name not in rec:
                raise ScenarioFileError(f"{path}:{lineno}: missing field {name!r}")
        if rec["index"] != k:
            raise ScenarioFileError(f"{path}:{lineno}: field 'index' is {rec['index']}, expected {k}")
        try:
            q = [float(rec[c]) for c in "xyz"]
        except (TypeError, ValueError):
            raise ScenarioFileError(f"{path}:{lineno}: non-numeric coordinate") from None
        if _outside(np.array([q]), airspace)[0]:
            raise ScenarioFileError(f"{path}:{lineno}: user {k} at {q} lies outside the corridor")
        pts.append(q)
    return Scenario(np.array(pts).reshape(-1, 3), airspace, header.get("seed"), header.get("generator", {}))


def _parse(path, lineno: int, line: str) -> dict:
    try:
        rec = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ScenarioFileError(f"{path}:{lineno}: {exc.msg}") from None
    if not isinstance(rec, dict):
        raise ScenarioFileError(f"{path}:{lineno}: expected a JSON object")
    return rec
