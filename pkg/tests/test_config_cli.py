import json
from pathlib import Path

import pytest

from barrier_hosm import Variant, load_hong_params, load_scenario
from barrier_hosm import cli
from barrier_hosm.config import ConfigError

SCEN = Path(__file__).resolve().parent.parent / "scenarios"

SHORT = """\
[hong]
r = 3
kappa = "-1/3"
gains = [1, 2, 5]

[mode]
variant = "BarrierTimeVarying"
k = 1
g = { kind = "Constant", c0 = 1 }

[schedule]
epsilon = 1
M = 0.2

[uncertainty]
phi = [["sgn_cos", 5, 1], ["sin", -20, 2]]
gamma = [["const", 3, 0], ["sgn_sin", -2, 3]]
bounds = { phi_bar = 25, gamma_m = 1, gamma_M = 5 }

[sim]
z0 = [4, 4, -4]
tau = 1e-3
horizon = 12
record_stride = 4
"""


@pytest.fixture
def short(tmp_path):
    p = tmp_path / "short.toml"
    p.write_text(SHORT)
    return p


def test_load_bundled_scenarios():
    sc = load_scenario(SCEN / "barrier_gain.toml")
    assert sc.mode.variant is Variant.BARRIER_TIME_VARYING
    assert sc.schedule.epsilon == 1.0 and sc.schedule.M == 0.2
    assert sc.hong.profile.is_boundary
    assert sc.z0 == (4.0, 4.0, -4.0)
    assert sc.uncertainty.bounds.phi_bar == 25.0
    sc = load_scenario(SCEN / "known_bounds.toml")
    assert sc.mode.variant is Variant.FIXED_GAIN_ROBUST and sc.schedule is None
    assert load_hong_params(SCEN / "hong_r3.toml").gains == (1.0, 2.0, 5.0)


def test_unknown_key_has_line(tmp_path):
    p = tmp_path / "bad.toml"
    p.write_text(SHORT.replace("M = 0.2", "M = 0.2\nbogus = 3"))
    with pytest.raises(ConfigError) as exc:
        load_scenario(p)
    line = SHORT[: SHORT.index("M = 0.2")].count("\n") + 2
    assert exc.value.line == line
    assert f":{line}:" in str(exc.value)


def test_unknown_section(tmp_path):
    p = tmp_path / "bad.toml"
    p.write_text(SHORT + "\n[extra]\nx = 1\n")
    with pytest.raises(ConfigError) as exc:
        load_scenario(p)
    assert exc.value.line == (SHORT + "\n[extra]").count("\n") + 1


def test_syntax_error_has_line(tmp_path):
    p = tmp_path / "bad.toml"
    p.write_text(SHORT.replace("tau = 1e-3", "tau = = 1e-3"))
    with pytest.raises(ConfigError) as exc:
        load_scenario(p)
    assert exc.value.line == SHORT[: SHORT.index("tau = ")].count("\n") + 1


def test_bad_value(tmp_path):
    p = tmp_path / "bad.toml"
    p.write_text(SHORT.replace('kappa = "-1/3"', "kappa = 0.5"))
    with pytest.raises(ConfigError) as exc:
        load_scenario(p)
    assert exc.value.line == 3


def test_cli_simulate_and_report(short, tmp_path):
    trace, metrics = tmp_path / "t.csv", tmp_path / "m.json"
    code = cli.run_cli(["simulate", str(short), "--out-trace", str(trace), "--out-metrics", str(metrics)])
    assert code == 0
    m = json.loads(metrics.read_text())
    assert m["trap_violations"] == 0 and "latch_time" in m and m["failures"] == []
    again = tmp_path / "m2.json"
    assert cli.run_cli(["report", str(trace), str(short), "--out-metrics", str(again)]) == 0
    assert json.loads(again.read_text()) == m


def test_cli_simulate_failure_exit(short, tmp_path):
    # too short to latch
    p = tmp_path / "s.toml"
    p.write_text(SHORT.replace("horizon = 12", "horizon = 2"))
    out = tmp_path / "m.json"
    assert cli.run_cli(["simulate", str(p), "--out-metrics", str(out)]) == 1
    assert "no_latch" in json.loads(out.read_text())["failures"]


def test_cli_verify(tmp_path, capsys):
    assert cli.run_cli(["verify", str(SCEN / "hong_r3.toml"), "--samples", "200", "--seed", "7"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["ok"] and rep["failures"] == [] and rep["samples"] == 200


def test_cli_verify_failure(monkeypatch, capsys):
    fake = {"ok": False, "checks": {"geometric": {"passed": 0, "failed": 1, "worst": 1.0, "tol": 1e-9}}}
    monkeypatch.setattr(cli, "verify_assumptions", lambda *a: dict(fake))
    assert cli.run_cli(["verify", str(SCEN / "hong_r3.toml")]) == 1
    assert json.loads(capsys.readouterr().out)["failures"] == ["geometric"]


def test_cli_accuracy(tmp_path, capsys):
    p = tmp_path / "a.toml"
    p.write_text((SCEN / "known_bounds.toml").read_text().replace("horizon = 15", "horizon = 9"))
    code = cli.run_cli(["accuracy", str(p), "--taus", "5e-4,2.5e-4", "--window", "8:9", "--json"])
    out = json.loads(capsys.readouterr().out)
    assert code == 0
    assert [row["tau"] for row in out["rows"]] == [5e-4, 2.5e-4]
    assert all(len(row["accuracy_lambdas"]) == 3 for row in out["rows"])
    assert cli.run_cli(["accuracy", str(p), "--taus", "5e-4", "--window", "8:9", "--bounds", "1,1,1"]) == 1
    assert "lambda1" in capsys.readouterr().out


def test_cli_usage_and_config_errors(tmp_path, capsys):
    assert cli.run_cli(["frobnicate"]) == 2
    assert cli.run_cli(["simulate"]) == 2
    bad = tmp_path / "bad.toml"
    bad.write_text("[hong]\nr = 3\nwat = 1\n")
    assert cli.run_cli(["simulate", str(bad)]) == 2
    assert "bad.toml:3" in capsys.readouterr().err
    assert cli.run_cli(["report", str(tmp_path / "missing.csv"), str(SCEN / "barrier_gain.toml")]) == 2
