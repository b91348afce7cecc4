import json

import numpy as np
import pytest

from uavbs.cli import cli_main
from uavbs.rf import Airspace
from uavbs.scenarios import Scenario, load_scenario, save_scenario


@pytest.fixture
def single_user(tmp_path):
    path = tmp_path / "one.jsonl"
    save_scenario(Scenario(np.array([[100.0, 200.0, 250.0]]), Airspace(), 0, {"kind": "manual"}), path)
    return path


def test_solve_single_user(single_user, capsys):
    assert cli_main(["solve", str(single_user)]) == 0
    out = capsys.readouterr().out
    assert "count       1" in out


def test_solve_json_noss(single_user, capsys):
    assert cli_main(["solve", str(single_user), "--policy", "noss", "--json"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["policy"] == "noss" and rep["users"] == 1
    assert 13.4 <= rep["eirp_dbm"] <= 24.2


def test_gen_then_solve(tmp_path, capsys):
    path = tmp_path / "s.jsonl"
    assert cli_main(["gen", "--seed", "4", "-o", str(path)]) == 0
    assert len(load_scenario(path)) > 0
    assert cli_main(["gen", "--process", "mcpp", "--seed", "4", "-o", str(path)]) == 0
    assert load_scenario(path).generator["kind"] == "mcpp"
    assert cli_main(["solve", str(path), "--eirp", "28", "--beamwidth", "75"]) == 0


def test_sweep_two_variables_is_usage_error(tmp_path, capsys):
    cfg = tmp_path / "bad.ini"
    cfg.write_text("[experiment]\nsweep = altitude, beamwidth\n")
    assert cli_main(["sweep", str(cfg)]) == 1
    assert "exactly one sweep variable" in capsys.readouterr().err


def test_sweep_writes_outputs(tmp_path):
    cfg = tmp_path / "c.ini"
    cfg.write_text("[experiment]\nsweep = beamwidth\nvalues = 30, 60\ntrials = 2\n")
    csv, svg = tmp_path / "o.csv", tmp_path / "o.svg"
    assert cli_main(["sweep", str(cfg), "--csv", str(csv), "--svg", str(svg)]) == 0
    assert len(csv.read_text().splitlines()) == 3
    assert svg.exists()


def test_infeasible_exit_code(tmp_path, single_user):
    assert cli_main(["solve", str(single_user), "--policy", "noss", "--interference", "-60"]) == 2
    cfg = tmp_path / "c.ini"
    cfg.write_text("[experiment]\nsweep = guard_altitude\npolicy = noss\nvalues = 50\ninterference_dbm = -60\n")
    assert cli_main(["sweep", str(cfg)]) == 2


def test_io_error_exit_code(tmp_path):
    assert cli_main(["solve", str(tmp_path / "nope.jsonl")]) == 3
    bad = tmp_path / "bad.jsonl"
    bad.write_text("{not json\n")
    assert cli_main(["solve", str(bad)]) == 3
    assert cli_main(["sweep", str(tmp_path / "nope.ini")]) == 3


def test_usage_errors():
    assert cli_main([]) == 1
    assert cli_main(["frobnicate"]) == 1
    assert cli_main(["solve"]) == 1
    assert cli_main(["bench", "--users", "x"]) == 1


def test_bench_agreement(capsys):
    assert cli_main(["bench", "--users", "20", "--instances", "200"]) == 0
    assert "agreement 200/200" in capsys.readouterr().out
