import json
import os
import subprocess
import sys

import pytest

from oscperiod import __version__
from oscperiod.cli import main

SCHEMA = {"claim", "p_grid", "t_or_e_grid", "worst_violation", "pass", "tolerances", "version"}


def run(argv, capsys):
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    out, err = capsys.readouterr()
    return code, out, err


def test_period_scan_passes(capsys, tmp_path):
    out_file = tmp_path / "scan.csv"
    code, out, _ = run(["period-scan", "--p", "3", "--steps", "50", "--out", str(out_file)], capsys)
    assert code == 0
    report = json.loads(out)
    assert SCHEMA <= report.keys() and report["pass"] is True
    assert report["version"] == __version__
    text = out_file.read_bytes()
    assert b"\r" not in text
    lines = text.decode().splitlines()
    assert lines[0] == "p,E,T,est_error,order" and len(lines) == 51


def test_usage_errors(capsys):
    for argv in (["period-scan", "--p", "0.5"],
                 ["period-scan", "--p", "abc"],
                 ["period-scan", "--p-grid", "2,x"],
                 ["period-scan", "--p", "3", "--p-grid", "default"],
                 ["period-scan", "--p", "3", "--e-max", "0.3"],
                 ["period-scan", "--p", "3", "--e-min", "0.5x", "--e-max", "0.1x"],
                 ["period-scan", "--steps", "0"],
                 ["simulate", "--p", "3"],
                 ["lemmas", "--claim", "X1"],
                 ["nosuch"]):
        code, out, err = run(argv, capsys)
        assert code == 64, argv
        assert json.loads(err.strip().splitlines()[-1])["exit_code"] == 64


def test_fraction_of_well_depth(capsys):
    code, out, _ = run(["period-scan", "--p", "5", "--e-max", "0.99x"], capsys)
    assert code == 0
    grid = json.loads(out)["t_or_e_grid"]
    assert grid[-1] == pytest.approx(0.99 * 4 / 12, rel=1e-14)


def test_lemmas_claim(capsys):
    code, out, _ = run(["lemmas", "--claim", "L2", "--p-grid", "default"], capsys)
    assert code == 0
    report = json.loads(out)
    assert report["claim"] == "L2" and len(report["p_grid"]) == 14 and len(report["t_or_e_grid"]) == 200


def test_chicone_reports_closed_form(capsys):
    code, out, _ = run(["chicone", "--p", "3"], capsys)
    assert code == 0
    checks = json.loads(out)["checks"]
    assert checks["closed_form_p3"]["pass"] and checks["f3_identically_one"]["pass"]


def test_simulate_outputs(capsys, tmp_path):
    out_file = tmp_path / "traj.csv"
    code, out, _ = run(["simulate", "--p", "3", "--e", "0.09", "--cycles", "8", "--out", str(out_file)], capsys)
    assert code == 0
    report = json.loads(out)
    assert report["T_measured"] == pytest.approx(report["T_quadrature"], rel=1e-8)
    header = out_file.read_text().splitlines()[0]
    assert header == "t,u,u_prime,energy_drift"


def test_bifurcate_csv(capsys, tmp_path):
    out_file = tmp_path / "bif.csv"
    code, _, _ = run(["bifurcate", "--p", "3", "--steps", "10", "--n-max", "2", "--out", str(out_file)], capsys)
    assert code == 0
    lines = out_file.read_text().splitlines()
    assert lines[0] == "mode,E,T,lambda" and len(lines) == 31
    # 17 significant digits round-trip the stored floats
    assert all(len(v.replace("-", "").replace(".", "").split("e")[0]) <= 17 for v in lines[1].split(",")[1:])


def test_verification_failure_exit_1(capsys):
    code, out, err = run(["simulate", "--p", "3", "--e", "0.09", "--tol", "1e-30"], capsys)
    assert code == 1
    assert json.loads(out)["pass"] is False
    assert json.loads(err.strip())["error"] == "VerificationFailed"


def test_runtime_failure_exit_2(capsys):
    # an unreachable quadrature tolerance makes every sample fail
    code, _, err = run(["period-scan", "--p", "3", "--steps", "3", "--tol", "1e-30"], capsys)
    assert code == 2
    assert json.loads(err.strip())["exit_code"] == 2
    code, _, err = run(["simulate", "--p", "3", "--e", "1e-20"], capsys)
    assert code == 2
    assert json.loads(err.strip())["error"] == "DegenerateOrbit"


def test_outputs_are_deterministic(capsys, tmp_path):
    files = []
    for name in ("a", "b"):
        for fmt in ("csv", "json"):
            path = tmp_path / f"{name}.{fmt}"
            code, _, _ = run(["bifurcate", "--p", "2.5", "--steps", "12", "--format", fmt, "--out", str(path)], capsys)
            assert code == 0
            files.append(path.read_bytes())
    assert files[0] == files[2] and files[1] == files[3]
    assert sorted(os.listdir(tmp_path)) == ["a.csv", "a.json", "b.csv", "b.json"]


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "oscperiod", "period-scan", "--p", "0.5"],
                         capture_output=True, text=True)
    assert res.returncode == 64
    assert json.loads(res.stderr)["error"] == "UsageError"
