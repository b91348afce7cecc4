"""Command-line entry point: ``uavbs {gen,solve,sweep,bench}``.

Exit codes: 0 success, 1 usage error, 2 infeasible configuration, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time

import numpy as np

from . import rf
from .geometry import disks_at_altitude
from .harness import ConfigError, emit_csv, emit_svg, load_config, run_experiment
from .rf import Airspace, InfeasibleError, RadioConfig, SharingPolicy
from .scenarios import McppParams, ScenarioFileError, gen_hppp, gen_mcpp, load_scenario, save_scenario
from .solver import SweepConfig, audit_placement, brute_force_2d, max_coverage_2d, solve_noss, solve_oss

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _common() -> argparse.ArgumentParser:
    p = _Parser(add_help=False)
    g = p.add_argument_group("radio and airspace")
    g.add_argument("--eirp", type=float, default=30.0, help="EIRP in dBm (default 30)")
    g.add_argument("--carrier", type=float, default=2e9, help="carrier frequency in Hz (default 2e9)")
    g.add_argument("--sensitivity", type=float, default=-70.0, help="receiver sensitivity in dBm")
    g.add_argument("--beamwidth", type=float, default=60.0, help="antenna beamwidth in degrees")
    g.add_argument("--exponent", type=float, default=2.0, help="pathloss exponent")
    g.add_argument("--h-min", type=float, default=100.0, help="corridor floor in m")
    g.add_argument("--h-max", type=float, default=300.0, help="corridor ceiling in m")
    g.add_argument("--h-guard", type=float, default=50.0, help="NOSS guard altitude in m")
    g.add_argument("--interference", type=float, default=-73.0, help="NOSS interference ceiling in dBm")
    g.add_argument("--area", type=float, nargs=2, default=[3000.0, 3000.0], metavar=("X", "Y"),
                   help="horizontal extent in m")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="uavbs", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", parents=[common], help="generate a scenario file")
    g.add_argument("--process", choices=["hppp", "mcpp"], default="hppp")
    g.add_argument("--density", type=float, default=30.0, help="HPPP density per km^3")
    g.add_argument("--parent-density", type=float, default=2.0, help="MCPP parent density per km^3")
    g.add_argument("--daughter-density", type=float, default=1000.0, help="MCPP daughter density per km^3")
    g.add_argument("--daughter-radius", type=float, default=150.0, help="MCPP cluster radius in m")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--out", required=True)

    s = sub.add_parser("solve", parents=[common], help="optimal placement for one scenario")
    s.add_argument("scenario")
    s.add_argument("--policy", choices=["oss", "noss"], default="oss")
    s.add_argument("--altitude-step", type=float, default=5.0, help="m")
    s.add_argument("--power-step", type=float, default=0.5, help="dB")
    s.add_argument("--fast-altitude", action="store_true", help="NOSS: only try the lowest feasible altitude")
    s.add_argument("--json", action="store_true", help="print the report as JSON")

    w = sub.add_parser("sweep", help="run a Monte-Carlo sweep from a config file")
    w.add_argument("config")
    w.add_argument("--workers", type=int, default=None)
    w.add_argument("--trials", type=int, default=None)
    w.add_argument("--csv", default=None, help="override csv_path")
    w.add_argument("--svg", default=None, help="override svg_path")

    b = sub.add_parser("bench", parents=[common], help="max-depth solver vs brute-force oracle")
    b.add_argument("--users", type=int, default=20)
    b.add_argument("--instances", type=int, default=200)
    b.add_argument("--seed", type=int, default=0)
    return parser


def _radio(args) -> RadioConfig:
    return RadioConfig(args.eirp, args.carrier, args.exponent, args.sensitivity, args.beamwidth)


def _airspace(args) -> Airspace:
    return Airspace((0.0, args.area[0]), (0.0, args.area[1]), args.h_min, args.h_max)


def cmd_gen(args) -> int:
    airspace = _airspace(args)
    if args.process == "hppp":
        sc = gen_hppp(airspace, args.density, args.seed)
    else:
        sc = gen_mcpp(airspace, McppParams(args.parent_density, args.daughter_density, args.daughter_radius), args.seed)
    save_scenario(sc, args.out)
    print(f"wrote {len(sc)} users to {args.out}")
    return EXIT_OK


def cmd_solve(args) -> int:
    sc = load_scenario(args.scenario)
    cfg = _radio(args)
    sweep = SweepConfig(args.altitude_step, args.power_step)
    if args.policy == "noss":
        policy = SharingPolicy.noss(args.h_guard, args.interference)
        pl = solve_noss(sc, cfg, policy, sc.airspace, sweep, args.fast_altitude)
    else:
        policy = SharingPolicy.oss()
        pl = solve_oss(sc, cfg, sc.airspace, sweep)
    audit_placement(pl, sc, cfg, policy)
    report = {
        "policy": args.policy,
        "users": len(sc),
        "count": pl.count,
        "bs_position_m": list(pl.bs_position),
        "eirp_dbm": pl.eirp_dbm,
        "transmit_power_dbm": rf.transmit_power_dbm(pl.eirp_dbm, cfg.beamwidth_deg),
        "d_max_m": rf.max_link_distance_m(cfg.with_eirp(pl.eirp_dbm)),
        "covered": pl.covered_indices(),
    }
    if args.json:
        print(json.dumps(report, indent=2))
    else:
        x, y, z = pl.bs_position
        print(f"policy      {args.policy.upper()}")
        print(f"users       {len(sc)}")
        print(f"count       {pl.count}")
        print(f"position    x={x:.2f} m  y={y:.2f} m  z={z:.2f} m")
        print(f"eirp        {pl.eirp_dbm:.2f} dBm (transmit {report['transmit_power_dbm']:.2f} dBm)")
        print(f"d_max       {report['d_max_m']:.2f} m")
        print(f"covered     {report['covered']}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    if args.workers is not None:
        cfg.workers = args.workers
    if args.trials is not None:
        cfg.trials = args.trials
    cfg.validate()
    csv_path = args.csv or cfg.csv_path
    svg_path = args.svg or cfg.svg_path
    result = run_experiment(cfg)
    if csv_path:
        emit_csv(result, csv_path)
        print(f"wrote {csv_path}")
    if svg_path:
        emit_svg(result, svg_path)
        print(f"wrote {svg_path}")
    if not csv_path:
        emit_csv(result, "/dev/stdout")
    return EXIT_OK


def cmd_bench(args) -> int:
    """Random fixed-altitude instances drawn from the default corridor."""
    if args.users < 0 or args.instances < 1:
        raise UsageError("bench: --users must be >= 0 and --instances >= 1")
    cfg = _radio(args)
    airspace = _airspace(args)
    d_max = rf.max_link_distance_m(cfg)
    rng = np.random.default_rng(args.seed)
    agree = 0
    t_fast = t_slow = 0.0
    for _ in range(args.instances):
        lo = np.array([airspace.x_range_m[0], airspace.y_range_m[0], airspace.h_min_m])
        hi = np.array([airspace.x_range_m[1], airspace.y_range_m[1], airspace.h_max_m])
        users = rng.uniform(lo, hi, size=(args.users, 3))
        z = rng.uniform(airspace.h_max_m, airspace.h_max_m + d_max)
        disks = disks_at_altitude(users, z, d_max, cfg.beamwidth_deg)
        t0 = time.perf_counter()
        _, _, count = max_coverage_2d(disks)
        t1 = time.perf_counter()
        _, oracle = brute_force_2d(disks, resolution_m=25.0)
        t2 = time.perf_counter()
        t_fast += t1 - t0
        t_slow += t2 - t1
        agree += count == oracle
    print(f"agreement {agree}/{args.instances}")
    print(f"max-depth sweep {1e3 * t_fast / args.instances:.2f} ms/instance, "
          f"oracle {1e3 * t_slow / args.instances:.2f} ms/instance")
    return EXIT_OK if agree == args.instances else EXIT_INFEASIBLE


COMMANDS = {"gen": cmd_gen, "solve": cmd_solve, "sweep": cmd_sweep, "bench": cmd_bench}


def cli_main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (OSError, ScenarioFileError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
