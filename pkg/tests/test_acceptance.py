"""Exit criteria: analytic constants, oracle agreement, and the coverage trends
of the OSS and NOSS experiments. Each test prints one PASS/FAIL line."""

import math
import time

import numpy as np
import pytest

from uavbs import rf
from uavbs.baselines import min_sum_distance_placement, random_placement
from uavbs.geometry import disks_at_altitude
from uavbs.harness import ExperimentConfig, emit_csv, run_experiment
from uavbs.rf import Airspace, RadioConfig, SharingPolicy
from uavbs.scenarios import gen_hppp, trial_seed
from uavbs.solver import brute_force_2d, max_coverage_2d, solve_noss, solve_oss

AIRSPACE = Airspace()
NOSS = SharingPolicy.noss(50.0, -73.0)


def hppp(master, t, lam=30.0):
    return gen_hppp(AIRSPACE, lam, trial_seed(master, 0, t))


def test_ac1_analytic_constants(acceptance):
    d_max = rf.max_link_distance_m(RadioConfig(eirp_dbm=30))
    z_min = rf.min_altitude_noss_m(RadioConfig(eirp_dbm=19), NOSS)
    b = rf.noss_power_bounds(RadioConfig(), NOSS, AIRSPACE)
    ok = (
        abs(d_max - 1193.7) <= 0.5
        and abs(z_min - 525.2) <= 0.5
        and b.feasible
        and abs(b.p_low_dbm - 13.42) <= 0.05
        and abs(b.p_high_dbm - 24.11) <= 0.05
    )
    assert acceptance(
        "AC1", ok,
        f"d_max={d_max:.2f} m, z_min(19 dBm)={z_min:.2f} m, bounds=({b.p_low_dbm:.3f}, {b.p_high_dbm:.3f}) dBm",
    )


def test_ac2_oracle_equivalence(acceptance):
    rng = np.random.default_rng(2024)
    cfg = RadioConfig()
    d_max = rf.max_link_distance_m(cfg)
    t0 = time.perf_counter()
    agree = 0
    for _ in range(200):
        n = int(rng.integers(1, 26))
        users = rng.uniform([0, 0, 100], [3000, 3000, 300], size=(n, 3))
        z = rng.uniform(300, 300 + d_max)
        disks = disks_at_altitude(users, z, d_max, cfg.beamwidth_deg)
        agree += max_coverage_2d(disks)[2] == brute_force_2d(disks, 25.0)[1]
    elapsed = time.perf_counter() - t0
    assert acceptance("AC2", agree == 200 and elapsed < 60, f"agreement {agree}/200 in {elapsed:.1f} s")


def test_ac3_optimality_dominance(acceptance):
    cfg = RadioConfig()
    t0 = time.perf_counter()
    wins, gaps = 0, []
    for t in range(100):
        sc = hppp(3, t)
        best = solve_oss(sc, cfg).count
        msd = min_sum_distance_placement(sc, cfg).count if len(sc) else 0
        rnd = random_placement(sc, cfg, seed=trial_seed(3, 1, t)).count
        wins += best >= msd and best >= rnd
        gaps.append(best - max(msd, rnd))
    elapsed = time.perf_counter() - t0
    assert acceptance(
        "AC3", wins == 100 and elapsed < 300,
        f"optimal >= both baselines on {wins}/100, mean margin {np.mean(gaps):.2f} users, {elapsed:.1f} s",
    )


def test_ac4_beamwidth_monotonicity(acceptance):
    beams = (30, 45, 60, 75, 90)
    mono = 0
    means = np.zeros(len(beams))
    for t in range(50):
        sc = hppp(4, t)
        counts = [solve_oss(sc, RadioConfig(beamwidth_deg=bw)).count for bw in beams]
        means += np.array(counts) / 50
        mono += all(a <= b for a, b in zip(counts, counts[1:]))
    assert acceptance("AC4", mono == 50, f"non-decreasing on {mono}/50; means {np.round(means, 2).tolist()}")


def test_ac5_noss_lowest_altitude(acceptance):
    cfg = ExperimentConfig(sweep="altitude", policy="noss", eirps_dbm=[19.0], trials=50, master_seed=5)
    res = run_experiment(cfg)
    means = [r["optimal_mean_count"] for r in res.rows]
    z0 = res.rows[0]["altitude_m"]
    lowest_is_max = int(np.argmax(means)) == 0 and abs(z0 - rf.min_altitude_noss_m(RadioConfig(eirp_dbm=19), NOSS)) < 1e-9

    radio = RadioConfig()
    match = 0
    for t in range(50):
        sc = gen_hppp(AIRSPACE, 30.0, trial_seed(5, 0, t))
        match += solve_noss(sc, radio, NOSS).count == solve_noss(sc, radio, NOSS, fast_altitude=True).count
    ok = lowest_is_max and match >= 0.95 * 50
    assert acceptance(
        "AC5", ok,
        f"curve max {max(means):.2f} at z={res.rows[int(np.argmax(means))]['altitude_m']:.1f} m "
        f"(floor {z0:.1f} m); fast == full on {match}/50",
    )


def test_ac6_interior_power_optimum(acceptance):
    cfg = ExperimentConfig(sweep="eirp", policy="noss", trials=50, master_seed=6, power_step_db=0.5)
    res = run_experiment(cfg)
    ps = [r["eirp_dbm"] for r in res.rows]
    means = np.array([r["optimal_mean_count"] for r in res.rows])
    k = int(np.argmax(means))
    diffs = np.diff(means)
    monotone = (diffs >= 0).all() or (diffs <= 0).all()
    ok = 0 < k < len(ps) - 1 and not monotone
    assert acceptance(
        "AC6", ok,
        f"argmax P_T={ps[k]:.2f} dBm (mean {means[k]:.2f}) inside [{ps[0]:.2f}, {ps[-1]:.2f}]; "
        f"endpoints {means[0]:.2f}/{means[-1]:.2f}",
    )


def test_ac7_guard_altitude_trend(acceptance):
    cfg = ExperimentConfig(sweep="guard_altitude", policy="noss", values=[25.0, 100.0], trials=200, master_seed=7)
    res = run_experiment(cfg)
    low, high = (r["optimal_mean_count"] for r in res.rows)
    assert acceptance("AC7", low >= high, f"mean count h_guard=25 m: {low:.3f}, h_guard=100 m: {high:.3f}")


def test_ac8_clustering_trend(acceptance):
    cfg = ExperimentConfig(
        sweep="daughter_density", process="mcpp", values=[500.0, 2000.0], parent_densities_per_km3=[2.0],
        trials=200, master_seed=8, methods=["optimal", "min_sum_distance", "random"],
    )
    res = run_experiment(cfg)
    lo, hi = res.rows
    ok = hi["optimal_mean_count"] > lo["optimal_mean_count"]
    detail = ", ".join(
        f"{m} {lo[f'{m}_mean_count']:.2f} -> {hi[f'{m}_mean_count']:.2f}" for m in cfg.methods
    )
    assert acceptance("AC8", ok, f"lambda_D 500 -> 2000 /km^3: {detail}")


def test_ac9_generator_statistics_and_determinism(acceptance, tmp_path):
    lam_v = 30 * AIRSPACE.volume_km3
    counts = [len(hppp(9, t)) for t in range(500)]
    sigma = math.sqrt(lam_v / 500)
    mean_ok = abs(np.mean(counts) - lam_v) <= 3 * sigma

    kw = dict(sweep="beamwidth", values=[45.0, 60.0, 90.0], trials=6, master_seed=9,
              methods=["optimal", "min_sum_distance", "random"])
    a, b = tmp_path / "one.csv", tmp_path / "many.csv"
    emit_csv(run_experiment(ExperimentConfig(**kw, workers=1)), a)
    emit_csv(run_experiment(ExperimentConfig(**kw, workers=4)), b)
    same = a.read_bytes() == b.read_bytes()
    assert acceptance(
        "AC9", mean_ok and same,
        f"HPPP mean {np.mean(counts):.2f} vs lambda*V={lam_v:.1f} (3 sigma = {3 * sigma:.2f}); "
        f"CSV 1 vs 4 workers identical: {same}",
    )
