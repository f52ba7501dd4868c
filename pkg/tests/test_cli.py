import json
import subprocess
import sys

import numpy as np
import pytest

from srfgame.cli import main
from srfgame.gaussian import GaussianGame, solve_gaussian
from srfgame.model import DemandModel
from srfgame.strategy import load_profile, save_strategy

CASE_A = {"capacity": 2.0, "rates": [1.0, 2.0], "cost": {"kind": "zero"}}
GAUSS = {"capacity": 120.0, "n": 100, "demand": {"family": "exponential", "rate": 1.0}}


def write(tmp_path, doc, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def report(out):
    return json.loads((out / "report.json").read_text())


def test_solve2p(tmp_path):
    out = tmp_path / "a"
    assert main(["solve2p", "--config", write(tmp_path, CASE_A), "--out", str(out)]) == 0
    rep = report(out)
    assert rep["solution"]["classification"] == "AIF1/AIF1"
    for s in load_profile(out / "strategy.json"):
        assert s.switch_points[0] == pytest.approx(1.17062, abs=1e-4)
    lines = (out / "curves.csv").read_text().splitlines()
    assert lines[0] == "# srfgame-curves v1 kind=two_player"


def test_gaussian_report_embeds_resolved_config(tmp_path):
    out = tmp_path / "g"
    assert main(["gaussian", "--config", write(tmp_path, GAUSS), "--out", str(out), "--tol", "1e-11"]) == 0
    rep = report(out)
    assert rep["trace"]["switch_points"][0] == pytest.approx(17.2763, abs=1e-3)
    tol = rep["config"]["tolerances"]
    assert tol["root_abs"] == 1e-11 and tol["payoff_abs"] == 1e-8 and tol["grid_step"] == 1e-4
    assert rep["config"]["n"] == 100 and rep["diagnostics"]["w_nonincreasing"]


def test_fluid(tmp_path):
    out = tmp_path / "f"
    assert main(["fluid", "--config", write(tmp_path, {"capacity": 50.0, "n": 100}), "--out", str(out)]) == 0
    assert report(out)["solution"]["xi_hat"] == pytest.approx(np.log(2), abs=1e-9)


def test_seed_required(tmp_path, capsys):
    assert main(["simulate", "--config", write(tmp_path, CASE_A), "--out", str(tmp_path)]) == 2
    assert "seed" in capsys.readouterr().err


@pytest.mark.parametrize("doc", [
    {"rates": [1, 2]},
    {"capacity": -1, "rates": [1, 2]},
    {"capacity": 2, "rates": [1, 2], "colour": "red"},
    {"capacity": 2, "rates": [1]},
    {"capacity": 120, "n": 1},
    {"capacity": 2, "rates": [1, 2], "tolerances": {"root_abs": -1}},
    {"capacity": 2, "rates": [1, 2], "cost": {"kind": "cubic"}},
])
def test_config_errors(tmp_path, doc):
    assert main(["solve2p" if "rates" in doc else "gaussian", "--config", write(tmp_path, doc),
                 "--out", str(tmp_path)]) == 2


def test_solver_error_exit_code(tmp_path):
    doc = {"capacity": 90.0, "n": 100}
    assert main(["gaussian", "--config", write(tmp_path, doc), "--out", str(tmp_path)]) == 3


def test_certify_cap_mismatch(tmp_path):
    game = GaussianGame(100, 120.0, DemandModel.exponential(1.0))
    s, _ = solve_gaussian(game)
    save_strategy(s, tmp_path / "s.json")
    doc = {**GAUSS, "capacity": 100.0, "strategy_file": str(tmp_path / "s.json")}
    assert main(["certify", "--config", write(tmp_path, doc), "--seed", "1", "--out", str(tmp_path)]) == 2


def test_round_trip_through_certify(tmp_path):
    out = tmp_path / "g"
    assert main(["gaussian", "--config", write(tmp_path, GAUSS), "--out", str(out)]) == 0
    solved, _ = solve_gaussian(GaussianGame(100, 120.0, DemandModel.exponential(1.0)))
    (loaded,) = load_profile(out / "strategy.json")
    v = np.linspace(0, 120, 1000)
    assert np.array_equal(loaded.eval(v), solved.eval(v))
    doc = {**GAUSS, "strategy_file": str(out / "strategy.json"), "grid": 4}
    cert_out = tmp_path / "c"
    assert main(["certify", "--config", write(tmp_path, doc), "--seed", "3", "--reps", "500",
                 "--out", str(cert_out)]) == 0
    rep = report(cert_out)
    assert rep["config"]["seed"] == 3 and len(rep["certificate"]["points"]) == 4


def test_simulate_two_player(tmp_path):
    doc = {**CASE_A, "actions": [0.5, 1.0, 1.5]}
    assert main(["simulate", "--config", write(tmp_path, doc), "--seed", "4", "--reps", "4000",
                 "--out", str(tmp_path)]) == 0
    rows = (tmp_path / "curves.csv").read_text().splitlines()
    assert rows[0] == "# srfgame-curves v1 kind=empirical_success"
    assert rows[1] == "x,success,std_error,analytic"
    x, p, se, exact = map(float, rows[4].split(","))
    assert abs(p - exact) <= 5 * se


def test_curves_gaussian(tmp_path):
    doc = {**GAUSS, "points": 51}
    assert main(["curves", "--config", write(tmp_path, doc), "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "curves.csv").read_text().splitlines()
    assert lines[1] == "v,s,w,Phi,p_I,p_F,p_eta" and len(lines) == 53


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "srfgame", "solve2p", "--config", write(tmp_path, CASE_A),
                           "--out", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
