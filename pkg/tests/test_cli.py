import csv
import io
import json
import math
import subprocess
import sys

import pytest

from lgsim.cli import main

E18 = 0.16529888822158653


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_table_csv(capsys):
    code, out, _ = run(capsys, "table", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 8
    assert {"Q1", "Q2", "inequality", "implication"} == set(rows[0])


def test_sweep_rows(capsys):
    code, out, _ = run(capsys, "sweep", "--theta1", "0:90:90", "--theta2=-90:90:90", "--T2", "10ns")
    assert code == 0
    reader = csv.reader(io.StringIO(out))
    header = next(reader)
    assert header == ["theta1_deg", "theta2_deg", "q3_pulse", "q3_nopulse", "q3_nopulse_infT2", "d"]
    rows = {(float(r[0]), float(r[1])): [float(v) for v in r[2:]] for r in reader}
    assert len(rows) == 6
    assert rows[(0.0, 0.0)] == [-1.0, -1.0, -1.0, 0.0]
    q3p, q3n, q3inf, d = rows[(90.0, 90.0)]
    assert q3p == pytest.approx(0, abs=1e-12)
    assert q3n == pytest.approx(E18, abs=1e-6)
    assert q3inf == pytest.approx(1, abs=1e-12)
    assert d == pytest.approx(E18, abs=1e-6)
    assert rows[(90.0, -90.0)][2] == pytest.approx(-1, abs=1e-12)


def test_sweep_grid_order(capsys):
    _, out, _ = run(capsys, "sweep", "--theta1", "0:30:10", "--theta2", "0:20:10")
    keys = [(float(r[0]), float(r[1])) for r in list(csv.reader(io.StringIO(out)))[1:]]
    assert keys == [(a, b) for a in (0.0, 10.0, 20.0, 30.0) for b in (0.0, 10.0, 20.0)]


def test_sweep_empty_range(capsys):
    code, _, err = run(capsys, "sweep", "--theta1", "10:0:1")
    assert code == 2
    assert len(err.strip().splitlines()) == 1


def test_lg_violation_exit_code(capsys):
    code, out, _ = run(capsys, "lg", "--q1", "1", "--q2", "-1", "--theta1", "90", "--theta2", "90", "--T2", "inf")
    assert code == 3
    rep = json.loads(out)
    assert rep["outputs"]["lg"]["LG2'"] == pytest.approx(-2, abs=1e-12)
    assert rep["inputs"]["T2"] == "inf"


def test_lg_no_violation(capsys):
    code, out, _ = run(capsys, "lg", "--theta1", "0", "--theta2", "0")
    assert code == 0
    assert json.loads(out)["outputs"]["violated"] == []


def test_macro_defaults(capsys):
    code, out, _ = run(capsys, "macro")
    assert code == 0
    rep = json.loads(out)
    assert rep["outputs"]["delta_m_bohr"] == pytest.approx(2.566e5, rel=1e-3)
    assert rep["outputs"]["delta_n"] == pytest.approx(8.3, abs=0.05)
    assert rep["provenance"]["constants"]["source"] == "CODATA 2018"


def test_macro_suffixes_match_si(capsys):
    _, a, _ = run(capsys, "macro", "--ip", "170nA", "--area", "7um2")
    _, b, _ = run(capsys, "macro", "--ip", "1.7e-7", "--area", "7e-12")
    assert json.loads(a)["outputs"] == json.loads(b)["outputs"]


def test_ndc_report(capsys):
    code, out, _ = run(capsys, "ndc", "--seed", "5")
    rep = json.loads(out)
    assert code == 0
    assert rep["outputs"]["d_exact"] == pytest.approx(E18)
    assert rep["outputs"]["p_value"] < 0.01
    assert rep["provenance"]["seed"] == 5


def test_seed_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("LG_SEED", "77")
    _, out, _ = run(capsys, "sample", "--shots", "100")
    assert json.loads(out)["inputs"]["seed"] == 77


def test_full_and_mr(capsys):
    code, out, _ = run(capsys, "full", "--theta1", "90", "--theta2", "90", "--T2", "inf", "--t", "0")
    rep = json.loads(out)["outputs"]
    assert code == 0 and rep["dcIII"] == pytest.approx(0, abs=1e-12)
    assert rep["correlators"]["no_t2"]["13"] == pytest.approx(-1, abs=1e-12)
    code, out, _ = run(capsys, "mr", "--p-init", "1", "--invasive", "1")
    assert json.loads(out)["outputs"]["exact"]["d"] == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["lg", "--bogus", "1"],
        ["lg", "--q1", "3"],
        ["lg", "--T2", "-1ns"],
        ["macro", "--ip", "0"],
        ["mr", "--invasive", "1.5"],
        ["ndc", "--format", "csv"],
        ["sample", "--shots", "0"],
    ],
)
def test_validation_errors_exit_2(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        raise SystemExit(main(argv))
    assert exc.value.code == 2
    err = capsys.readouterr().err
    assert len(err.strip().splitlines()) == 1


def test_key_value_config_and_flag_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# protocol\ntheta1 = 90\ntheta2=90\nT2 = inf\nq1 = 1\nq2 = -1\n")
    code, out, _ = run(capsys, "lg", "--config", str(cfg))
    assert code == 3
    code, out, _ = run(capsys, "lg", "--config", str(cfg), "--theta1", "0")
    assert code == 0
    assert json.loads(out)["inputs"]["theta1"] == 0.0


def test_malformed_config(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("theta1 90\n")
    assert run(capsys, "lg", "--config", str(bad))[0] == 2
    bad.write_text("nonsense = 1\n")
    assert run(capsys, "lg", "--config", str(bad))[0] == 2
    bad.write_text("{not json")
    assert run(capsys, "lg", "--config", str(bad))[0] == 2


ROUND_TRIP = [
    ["sweep", "--theta1", "0:90:45", "--theta2", "0:90:45", "--format", "json"],
    ["ndc", "--seed", "3", "--shots", "500"],
    ["lg", "--q1", "1", "--q2", "-1"],
    ["table"],
    ["sample", "--seed", "11", "--T2", "inf"],
    ["full", "--theta-a", "20", "--theta1", "70", "--theta2", "40"],
    ["mr", "--p-init", "0.3", "--p-flip-12", "0.1", "--shots", "400", "--seed", "8"],
    ["macro", "--ip", "170nA", "--overlap", "0.7"],
]


@pytest.mark.parametrize("argv", ROUND_TRIP, ids=lambda a: a[0])
def test_json_round_trip(tmp_path, argv):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    code = main(argv + ["--out", str(first)])
    assert main([argv[0], "--config", str(first), "--out", str(second)]) == code
    assert first.read_bytes() == second.read_bytes()


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "lgsim.cli", "table", "--format", "csv"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert len(proc.stdout.strip().splitlines()) == 9
