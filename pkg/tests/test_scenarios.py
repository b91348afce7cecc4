import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from uavbs.rf import Airspace
from uavbs.scenarios import (
    McppParams,
    Scenario,
    ScenarioFileError,
    gen_hppp,
    gen_mcpp,
    load_scenario,
    save_scenario,
    trial_seed,
)


def test_hppp_mean_count(airspace):
    lam_v = 30 * airspace.volume_km3
    assert lam_v == pytest.approx(54.0)
    counts = [len(gen_hppp(airspace, 30, trial_seed(11, 0, t))) for t in range(500)]
    assert abs(np.mean(counts) - lam_v) <= 3 * math.sqrt(lam_v / 500)


def test_hppp_zero_density_and_determinism(airspace):
    assert len(gen_hppp(airspace, 0, 5)) == 0
    a, b = gen_hppp(airspace, 30, 5), gen_hppp(airspace, 30, 5)
    assert np.array_equal(a.positions, b.positions)
    with pytest.raises(ValueError):
        gen_hppp(airspace, -1, 0)


def test_mcpp_forced_parent_mean(airspace):
    params = McppParams(1.0, 20000.0, 50.0)
    parent = np.array([[1500.0, 1500.0, 200.0]])
    counts = [len(gen_mcpp(airspace, params, s, parents=parent)) for s in range(1000)]
    mean = params.mean_daughters
    assert mean == pytest.approx(20000 * 4 / 3 * math.pi * 0.05**3)
    assert abs(np.mean(counts) - mean) <= 3 * math.sqrt(mean / 1000)


def test_mcpp_vanishing_parents_and_determinism(airspace):
    assert len(gen_mcpp(airspace, McppParams(1e-9, 1000.0), 3)) == 0
    p = McppParams(2.0, 2000.0)
    assert np.array_equal(gen_mcpp(airspace, p, 9).positions, gen_mcpp(airspace, p, 9).positions)
    with pytest.raises(ValueError):
        McppParams(0, 1, 1)


@given(st.integers(0, 2**63 - 1), st.floats(0, 80), st.floats(0.1, 5), st.floats(100, 5000), st.floats(10, 400))
def test_generated_points_respect_corridor(seed, lam, lam_p, lam_d, r_d):
    airspace = Airspace((0, 1000), (-500, 500), 150, 300)
    for sc in (gen_hppp(airspace, lam, seed), gen_mcpp(airspace, McppParams(lam_p, lam_d, r_d), seed)):
        p = sc.positions
        assert ((p[:, 0] >= 0) & (p[:, 0] <= 1000) & (p[:, 1] >= -500) & (p[:, 1] <= 500)).all()
        assert ((p[:, 2] >= 150) & (p[:, 2] <= 300)).all()


def test_trial_seed_pure_and_distinct():
    assert trial_seed(1, 2, 3) == trial_seed(1, 2, 3)
    seeds = {trial_seed(1, g, t) for g in range(5) for t in range(100)}
    assert len(seeds) == 500
    assert 0 <= trial_seed(2**40, 7) < 2**64


def test_round_trip(tmp_path, airspace):
    sc = gen_hppp(airspace, 30, trial_seed(0, 0, 0))
    path = tmp_path / "s.jsonl"
    save_scenario(sc, path)
    back = load_scenario(path)
    assert np.array_equal(back.positions, sc.positions)
    assert back.seed == sc.seed and back.generator == sc.generator and back.airspace == sc.airspace
    mc = gen_mcpp(airspace, McppParams(2.0, 2000.0), 4)
    save_scenario(mc, path)
    assert load_scenario(path).generator == mc.generator


def test_load_rejects_user_above_corridor(tmp_path, airspace):
    sc = Scenario(np.array([[10.0, 10.0, 200.0]]), airspace, 1, {"kind": "manual"})
    path = tmp_path / "s.jsonl"
    save_scenario(sc, path)
    lines = path.read_text().splitlines()
    lines[1] = json.dumps({"index": 0, "x": 10.0, "y": 10.0, "z": 350.0})
    path.write_text("\n".join(lines))
    with pytest.raises(ScenarioFileError, match=r":2: user 0"):
        load_scenario(path)


def test_load_empty_user_list(tmp_path, airspace):
    path = tmp_path / "s.jsonl"
    save_scenario(Scenario(np.zeros((0, 3)), airspace, 3, {"kind": "hppp"}), path)
    assert len(load_scenario(path)) == 0


@pytest.mark.parametrize(
    "line, match",
    [
        ('{"index": 0, "x": 1.0, "y": 2.0}', r":2: missing field 'z'"),
        ('{"index": 0, "x": "a", "y": 2.0, "z": 200}', r":2: non-numeric"),
        ('{"index": 3, "x": 1.0, "y": 2.0, "z": 200}', r":2: field 'index'"),
        ("not json", r":2: "),
    ],
)
def test_malformed_records_name_line_and_field(tmp_path, airspace, line, match):
    path = tmp_path / "s.jsonl"
    save_scenario(Scenario(np.zeros((0, 3)), airspace), path)
    path.write_text(path.read_text() + line + "\n")
    with pytest.raises(ScenarioFileError, match=match):
        load_scenario(path)


def test_malformed_header(tmp_path):
    path = tmp_path / "s.jsonl"
    path.write_text('{"format": "other"}\n')
    with pytest.raises(ScenarioFileError, match="format"):
        load_scenario(path)
    path.write_text("")
    with pytest.raises(ScenarioFileError):
        load_scenario(path)


def test_scenario_invariant(airspace):
    with pytest.raises(ValueError):
        Scenario(np.array([[10.0, 10.0, 50.0]]), airspace)
