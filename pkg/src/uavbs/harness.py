"""Monte-Carlo coverage sweeps and their CSV/SVG output."""

from __future__ import annotations

import configparser
import csv
import dataclasses
import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import rf
from .baselines import min_sum_distance_placement, random_placement
from .rf import Airspace, InfeasibleError, RadioConfig, SharingPolicy
from .scenarios import McppParams, Scenario, gen_hppp, gen_mcpp, trial_seed
from .solver import SweepConfig, solve_at_altitude, solve_noss, solve_oss, value_grid

log = logging.getLogger(__name__)

SWEEP_UNITS = {
    "altitude": "altitude_m",
    "beamwidth": "beamwidth_deg",
    "daughter_density": "daughter_density_per_km3",
    "eirp": "eirp_dbm",
    "guard_altitude": "guard_altitude_m",
}
METHODS = ("optimal", "min_sum_distance", "random")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    sweep: str
    values: list[float] | None = None
    name: str = "experiment"
    policy: str = "oss"
    methods: list[str] = field(default_factory=lambda: ["optimal"])
    trials: int = 50
    master_seed: int = 0
    workers: int = 1
    # series: every list below that is not the swept variable spans one curve per entry
    beamwidths_deg: list[float] = field(default_factory=lambda: [60.0])
    eirps_dbm: list[float] = field(default_factory=lambda: [30.0])
    lth_db: list[float] | None = None
    guard_alts_m: list[float] = field(default_factory=lambda: [50.0])
    process: str = "hppp"
    densities_per_km3: list[float] = field(default_factory=lambda: [30.0])
    parent_densities_per_km3: list[float] = field(default_factory=lambda: [2.0])
    daughter_densities_per_km3: list[float] = field(default_factory=lambda: [1000.0])
    daughter_radius_m: float = 150.0
    carrier_hz: float = 2e9
    pathloss_exp: float = 2.0
    sensitivity_dbm: float = -70.0
    interference_dbm: float = -73.0
    area_x_m: float = 3000.0
    area_y_m: float = 3000.0
    h_min_m: float = 100.0
    h_max_m: float = 300.0
    altitude_step_m: float = 5.0
    power_step_db: float = 0.5
    fast_altitude: bool = False
    # label carried into plot titles; "qualitative" when densities are our own choice
    provenance: str = "qualitative"
    csv_path: str | None = None
    svg_path: str | None = None

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        sweeps = [s.strip() for s in str(self.sweep).split(",") if s.strip()]
        if len(sweeps) != 1:
            raise ConfigError(f"exactly one sweep variable is required, got {self.sweep!r}")
        self.sweep = sweeps[0]
        if self.sweep not in SWEEP_UNITS:
            raise ConfigError(f"unknown sweep variable {self.sweep!r}; choose from {sorted(SWEEP_UNITS)}")
        if self.policy not in ("oss", "noss"):
            raise ConfigError(f"policy must be 'oss' or 'noss', got {self.policy!r}")
        if self.process not in ("hppp", "mcpp"):
            raise ConfigError(f"process must be 'hppp' or 'mcpp', got {self.process!r}")
        if self.trials < 1 or self.workers < 1:
            raise ConfigError("trials and workers must be >= 1")
        bad = set(self.methods) - set(METHODS)
        if bad or not self.methods:
            raise ConfigError(f"unknown methods {sorted(bad)}; choose from {METHODS}")
        if self.sweep == "altitude" and list(self.methods) != ["optimal"]:
            raise ConfigError("the fixed-altitude sweep only evaluates the 'optimal' method")
        if self.sweep == "guard_altitude" and self.policy != "noss":
            raise ConfigError("guard_altitude sweeps require policy = noss")
        if self.sweep == "daughter_density" and self.process != "mcpp":
            raise ConfigError("daughter_density sweeps require process = mcpp")
        if self.values is None and self.sweep not in ("altitude", "eirp"):
            raise ConfigError(f"sweep {self.sweep!r} needs explicit values")
        if self.values is None and self.sweep == "eirp" and self.policy != "noss":
            raise ConfigError("eirp values may only be omitted under noss (taken from the power bounds)")
        try:
            self.airspace()
            list(self._radio_grid())
            SweepConfig(self.altitude_step_m, self.power_step_db)
            if self.process == "mcpp":
                for lp, ld in itertools.product(self.parent_densities_per_km3, self.daughter_densities_per_km3):
                    McppParams(lp, ld, self.daughter_radius_m)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def check_feasible(self) -> None:
        if self.policy != "noss" or self.sweep in ("eirp", "altitude"):
            return
        cfg = self.radio(self.beamwidths_deg[0], max(self._eirps()))
        for h in self._series_values("guard_altitude"):
            b = rf.noss_power_bounds(cfg, self.sharing(h), self.airspace())
            if not b.feasible:
                raise InfeasibleError(f"no feasible EIRP for guard altitude {h} m: {b}")

    def airspace(self) -> Airspace:
        return Airspace((0.0, self.area_x_m), (0.0, self.area_y_m), self.h_min_m, self.h_max_m)

    def sharing(self, guard_alt_m: float) -> SharingPolicy:
        if self.policy == "noss":
            return SharingPolicy.noss(guard_alt_m, self.interference_dbm)
        return SharingPolicy.oss()

    def radio(self, beamwidth_deg: float, eirp_dbm: float) -> RadioConfig:
        return RadioConfig(eirp_dbm, self.carrier_hz, self.pathloss_exp, self.sensitivity_dbm, beamwidth_deg)

    def _eirps(self) -> list[float]:
        if self.lth_db is not None:
            return [self.sensitivity_dbm + t for t in self.lth_db]
        return list(self.eirps_dbm)

    def _radio_grid(self):
        for bw in self.beamwidths_deg:
            for p in self._eirps():
                yield self.radio(bw, p)

    def _series_values(self, name: str) -> list[float]:
        return {
            "beamwidth": self.beamwidths_deg,
            "eirp": self._eirps(),
            "guard_altitude": self.guard_alts_m,
            "daughter_density": self.daughter_densities_per_km3,
        }[name]


@dataclass
class SweepResult:
    sweep: str
    columns: list[str]
    rows: list[dict]
    methods: list[str]
    series_columns: list[str]
    title: str = ""


@dataclass(frozen=True)
class _Row:
    """One output row: parameter values plus the scenario group it draws from."""

    params: dict
    scenario_key: tuple
    eirp_pinned: bool


def _param_columns(cfg: ExperimentConfig) -> list[str]:
    cols = ["beamwidth_deg"]
    if cfg.policy == "oss" or cfg.sweep in ("eirp", "altitude"):
        cols.append("eirp_dbm")
    if cfg.policy == "noss":
        cols.append("guard_altitude_m")
    if cfg.process == "hppp":
        cols.append("density_per_km3")
    else:
        cols += ["parent_density_per_km3", "daughter_density_per_km3"]
    return cols


def _plan(cfg: ExperimentConfig) -> list[_Row]:
    """Every (series, sweep value) combination, in output order."""
    if cfg.process == "hppp":
        groups = [{"density_per_km3": d} for d in cfg.densities_per_km3]
    else:
        daughters = cfg.values if cfg.sweep == "daughter_density" else cfg.daughter_densities_per_km3
        groups = [
            {"parent_density_per_km3": lp, "daughter_density_per_km3": ld}
            for lp, ld in itertools.product(cfg.parent_densities_per_km3, daughters)
        ]

    radio = {
        "beamwidth_deg": cfg.values if cfg.sweep == "beamwidth" else cfg.beamwidths_deg,
        "guard_altitude_m": (cfg.values if cfg.sweep == "guard_altitude" else cfg.guard_alts_m)
        if cfg.policy == "noss" else [None],
    }
    eirps = cfg._eirps()
    airspace = cfg.airspace()
    rows = []
    for gi, group in enumerate(groups):
        for bw, guard in itertools.product(radio["beamwidth_deg"], radio["guard_altitude_m"]):
            policy = cfg.sharing(guard if guard is not None else 50.0)
            if cfg.sweep == "eirp":
                if cfg.values is not None:
                    eirp_list = cfg.values
                else:
                    b = rf.noss_power_bounds(cfg.radio(bw, eirps[0]), policy, airspace)
                    if not b.feasible:
                        raise InfeasibleError(f"no feasible EIRP under {policy}")
                    eirp_list = value_grid(b.p_low_dbm, b.p_high_dbm, cfg.power_step_db).tolist()
            elif cfg.policy == "oss" or cfg.sweep == "altitude":
                eirp_list = eirps
            else:
                eirp_list = [None]
            for p in eirp_list:
                if cfg.sweep == "altitude":
                    radio_cfg = cfg.radio(bw, p)
                    lo, hi = rf.feasible_altitude_range(radio_cfg, policy, airspace)
                    if cfg.values is None:
                        zs = value_grid(lo, hi, cfg.altitude_step_m).tolist()
                    else:
                        zs = [z for z in cfg.values if z >= lo - 1e-9]
                        skipped = len(cfg.values) - len(zs)
                        if skipped:
                            log.info("skipping %d altitudes below the feasible floor %.2f m", skipped, lo)
                else:
                    zs = [None]
                for z in zs:
                    params = dict(group, beamwidth_deg=bw)
                    if guard is not None:
                        params["guard_altitude_m"] = guard
                    if p is not None:
                        params["eirp_dbm"] = p
                    if z is not None:
                        params["altitude_m"] = z
                    rows.append(_Row(params, (gi,), cfg.sweep == "eirp" and cfg.policy == "noss"))
    return rows


def _scenario(cfg: ExperimentConfig, row: _Row, trial: int) -> Scenario:
    seed = trial_seed(cfg.master_seed, *row.scenario_key, trial)
    airspace = cfg.airspace()
    if cfg.process == "hppp":
        return gen_hppp(airspace, row.params["density_per_km3"], seed)
    return gen_mcpp(
        airspace,
        McppParams(row.params["parent_density_per_km3"], row.params["daughter_density_per_km3"],
                   cfg.daughter_radius_m),
        seed,
    )


def _run_trial(task) -> list[tuple[float, float, float]]:
    """(count, altitude, eirp) per method for one row and trial."""
    cfg, row, trial = task
    sc = _scenario(cfg, row, trial)
    p = row.params
    policy = cfg.sharing(p.get("guard_altitude_m", 50.0))
    radio = cfg.radio(p["beamwidth_deg"], p.get("eirp_dbm", cfg._eirps()[0]))
    sweep = SweepConfig(cfg.altitude_step_m, cfg.power_step_db)
    out = []
    for method in cfg.methods:
        if cfg.sweep == "altitude":
            pl = solve_at_altitude(sc, radio, p["altitude_m"])
        elif method == "optimal":
            if policy.is_noss:
                pinned = p["eirp_dbm"] if row.eirp_pinned else None
                pl = solve_noss(sc, radio, policy, None, sweep, cfg.fast_altitude, eirp_dbm=pinned)
            else:
                pl = solve_oss(sc, radio, None, sweep)
        elif method == "min_sum_distance":
            if len(sc) == 0:
                out.append((0.0, math.nan, math.nan))
                continue
            pl = min_sum_distance_placement(sc, radio, policy)
        else:
            rseed = trial_seed(cfg.master_seed, *row.scenario_key, trial, 1)
            pl = random_placement(sc, radio, policy, None, rseed, randomize_eirp=not row.eirp_pinned)
        out.append((float(pl.count), pl.bs_position.z, pl.eirp_dbm))
    return out


def run_experiment(config: ExperimentConfig) -> SweepResult:
    config.validate()
    config.check_feasible()
    plan = _plan(config)
    tasks = [(config, row, t) for row in plan for t in range(config.trials)]
    if config.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(config.workers) as pool:
            results = list(pool.map(_run_trial, tasks, chunksize=max(1, len(tasks) // (8 * config.workers))))
    else:
        results = [_run_trial(t) for t in tasks]

    sweep_col = SWEEP_UNITS[config.sweep]
    params = [c for c in _param_columns(config) if c != sweep_col]
    stats = []
    for m in config.methods:
        stats += [f"{m}_mean_count", f"{m}_std_count"]
    columns = [sweep_col, *params, "trials", *stats,
               "optimal_mean_altitude_m", "optimal_mean_eirp_dbm", "transmit_power_dbm"]

    arr = np.array(results, dtype=float).reshape(len(plan), config.trials, len(config.methods), 3)
    rows = []
    for k, row in enumerate(plan):
        rec = {c: row.params.get(c, math.nan) for c in [sweep_col, *params]}
        rec["trials"] = config.trials
        for j, m in enumerate(config.methods):
            counts = arr[k, :, j, 0]
            rec[f"{m}_mean_count"] = float(np.mean(counts))
            rec[f"{m}_std_count"] = float(np.std(counts, ddof=1)) if config.trials > 1 else 0.0
        if "optimal" in config.methods:
            j = config.methods.index("optimal")
            rec["optimal_mean_altitude_m"] = float(np.mean(arr[k, :, j, 1]))
            rec["optimal_mean_eirp_dbm"] = float(np.mean(arr[k, :, j, 2]))
        else:
            rec["optimal_mean_altitude_m"] = rec["optimal_mean_eirp_dbm"] = math.nan
        eirp = row.params.get("eirp_dbm", rec["optimal_mean_eirp_dbm"])
        rec["transmit_power_dbm"] = rf.transmit_power_dbm(eirp, row.params["beamwidth_deg"]) \
            if math.isfinite(eirp) else math.nan
        rows.append(rec)
    # stable: series order is kept within a sweep value
    rows.sort(key=lambda r: r[sweep_col])
    title = f"{config.name} ({config.policy.upper()}, {config.process.upper()}, {config.provenance})"
    return SweepResult(config.sweep, columns, rows, list(config.methods), params, title)


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def emit_csv(result: SweepResult, path) -> None:
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(result.columns)
            for rec in result.rows:
                w.writerow([_fmt(rec[c]) for c in result.columns])
    except OSError as exc:
        raise OSError(f"cannot write CSV {path}: {exc.strerror or exc}") from exc


def read_csv(path) -> list[dict]:
    with Path(path).open(newline="") as fh:
        return [{k: float(v) for k, v in rec.items()} for rec in csv.DictReader(fh)]


def emit_svg(result: SweepResult, path) -> None:
    """Line chart, one series per method and parameter combination."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    sweep_col = SWEEP_UNITS[result.sweep]
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    series: dict[tuple, list[dict]] = {}
    for rec in result.rows:
        key = tuple((c, rec[c]) for c in result.series_columns if not _isnan(rec[c]))
        series.setdefault(key, []).append(rec)
    for key, recs in series.items():
        label = ", ".join(f"{c}={v:g}" for c, v in key)
        xs = [r[sweep_col] for r in recs]
        for m in result.methods:
            ax.plot(xs, [r[f"{m}_mean_count"] for r in recs], marker="o", ms=3,
                    label=f"{m}: {label}" if label else m)
    ax.set_xlabel(_axis_label(sweep_col))
    ax.set_ylabel("avg. max. number of covered UAV-UEs (users)")
    ax.set_title(result.title, fontsize=9)
    if series:
        ax.legend(fontsize=6)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    path = Path(path)
    try:
        fig.savefig(path, format="svg", metadata={"Date": None})
    except OSError as exc:
        raise OSError(f"cannot write SVG {path}: {exc.strerror or exc}") from exc
    finally:
        plt.close(fig)


def _axis_label(col: str) -> str:
    name, unit = col.rsplit("_", 1) if not col.endswith("per_km3") else (col[:-8], "per km^3")
    unit = {"m": "m", "deg": "degrees", "dbm": "dBm"}.get(unit, unit)
    return f"{name.replace('_', ' ')} ({unit})"


def _isnan(v) -> bool:
    return isinstance(v, float) and math.isnan(v)


def load_config(path) -> ExperimentConfig:
    """Read a flat ``key = value`` file with a single ``[experiment]`` section.

    Lists are comma separated; ``none`` clears optional fields.
    """
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with Path(path).open() as fh:
            parser.read_file(fh)
    except configparser.DuplicateOptionError as exc:
        raise ConfigError(f"{path}: key {exc.option!r} given twice") from None
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    if not parser.has_section("experiment"):
        raise ConfigError(f"{path}: missing [experiment] section")
    fields = {f.name: f for f in dataclasses.fields(ExperimentConfig)}
    kwargs = {}
    for key, raw in parser.items("experiment"):
        if key not in fields:
            raise ConfigError(f"{path}: unknown key {key!r}")
        kwargs[key] = _coerce(path, key, raw, fields[key].type)
    if "sweep" not in kwargs:
        raise ConfigError(f"{path}: missing key 'sweep'")
    return ExperimentConfig(**kwargs)


def _coerce(path, key: str, raw: str, typ: str):
    raw = raw.strip()
    try:
        if raw.lower() == "none" and "None" in typ:
            return None
        if typ.startswith("list[float]"):
            return [float(v) for v in raw.split(",") if v.strip()]
        if typ.startswith("list[str]"):
            return [v.strip() for v in raw.split(",") if v.strip()]
        if typ == "int":
            return int(raw)
        if typ == "float":
            return float(raw)
        if typ == "bool":
            if raw.lower() not in ("true", "false", "yes", "no", "1", "0"):
                raise ValueError(raw)
            return raw.lower() in ("true", "yes", "1")
        return raw
    except ValueError:
        raise ConfigError(f"{path}: bad value for {key!r}: {raw!r}") from None
