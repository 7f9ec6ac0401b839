import csv
import io
import json
import math
import subprocess
import sys

import pytest

from ltlab.cli import EXIT_ERROR, EXIT_FAILED, EXIT_OK, EXIT_USAGE, run
from ltlab.constants import classical_L_value


def call(*argv):
    buf = io.StringIO()
    code = run(list(argv), stdout=buf)
    return code, buf.getvalue()


def test_constants_json():
    code, out = call("constants", "--gamma", "1", "--dim", "3", "--format", "json")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["command"] == "constants"
    names = [r["name"] for r in doc["rows"]]
    assert names[0] == "L_cl" and "bound" in names
    assert doc["rows"][0]["value"] == pytest.approx(classical_L_value(1, 3), rel=1e-14)
    assert all("K_dual" in r and r["provenance"] for r in doc["rows"])


def test_rumin_published_trial():
    code, out = call("rumin", "--published-trial", "--dim", "1", "--format", "json")
    assert code == EXIT_OK
    extra = json.loads(out)["extra"]
    assert extra["I_d"] <= 0.747112
    assert extra["quadrature_error"] < 1e-6
    assert extra["below_published_bound"] is True


def test_spectrum_csv():
    code, out = call("spectrum", "--potential", "poschl_teller nu=2", "--format", "csv", "--step", "0.02")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0] == "# ltlab spectrum" and lines[1].startswith("# config: ")
    rows = list(csv.DictReader(lines[2:]))
    assert [round(float(r["energy"]), 4) for r in rows] == [-4.0, -1.0]


def test_spectrum_ratios_table():
    code, out = call("spectrum", "--potential", "gaussian depth=4", "--gammas", "0.5", "1", "--conjecture")
    assert code == EXIT_OK
    assert "lt_ratios" in out and "status: PASS" in out


def test_sphere_and_stability():
    code, out = call("sphere", "--dim", "7", "--L-max", "3", "--format", "json")
    assert code == EXIT_OK
    assert json.loads(out)["extra"]["argmax_L"] >= 1
    code, out = call("stability", "--z", "2", "--nuclei", "3", "--electrons", "5", "--format", "json")
    assert code == EXIT_OK
    assert json.loads(out)["extra"]["energy_lower_bound"] < 0


def test_monotonicity_and_ground_state(tmp_path):
    code, out = call("monotonicity", "--gamma", "2", "--format", "json")
    assert code == EXIT_OK and json.loads(out)["extra"]["increases"] == 0
    prof = tmp_path / "q.csv"
    code, out = call("ground-state", "--dim", "1", "--p", "3", "--profile", str(prof), "--format", "json")
    assert code == EXIT_OK
    assert json.loads(out)["extra"]["mass"] == pytest.approx(math.sqrt(3) * math.pi / 2, rel=1e-8)
    assert prof.read_text().startswith("r,Q\n")


@pytest.mark.parametrize("argv", [
    ["bogus"], ["constants", "--gamma", "1"], ["constants", "--gamma", "x", "--dim", "1"],
    ["spectrum"], ["verify-all", "--tol", "nope=1"], ["verify-all", "--tol", "rumin_abs"],
    ["verify-all", "--criteria", "a,b"], ["rumin", "--published-trial", "--params", "1", "1", "1", "1"],
])
def test_usage_errors(argv, capsys):
    code, _ = call(*argv)
    assert code == EXIT_USAGE
    assert "usage:" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    ["constants", "--gamma", "0.25", "--dim", "1"],
    ["spectrum", "--potential", "gaussian height=2"],
    ["spectrum", "--potential", "gaussian", "--gammas", "0.1"],
    ["ground-state", "--dim", "3", "--p", "6"],
    ["rumin", "--trial-json", "/nonexistent/trial.json"],
])
def test_domain_errors(argv, capsys):
    code, _ = call(*argv)
    assert code == EXIT_ERROR
    assert "Error" in capsys.readouterr().err


def test_verify_all_injected_failure():
    code, out = call("verify-all", "--criteria", "3,4,7", "--tol", "poschl_teller_abs=1e-15")
    assert code == EXIT_FAILED
    line = next(x for x in out.splitlines() if x.startswith("[FAIL] criterion 4"))
    assert "failed:" in line
    detail = [x for x in out.splitlines() if x.strip().startswith("FAIL")]
    assert detail and " vs " in detail[0]
    assert "[PASS] criterion 3" in out and "[PASS] criterion 7" in out


def test_verify_all_json_deterministic():
    a = call("verify-all", "--criteria", "3,7,10", "--format", "json")
    b = call("verify-all", "--criteria", "3,7,10", "--format", "json")
    assert a[0] == EXIT_OK and a == b
    doc = json.loads(a[1])
    assert doc["failures"] == 0 and doc["passed"] is True
    assert [c["criterion"] for c in doc["criteria"]] == [3, 7, 10]
    check = doc["criteria"][0]["checks"][0]
    assert {"name", "value", "reference", "tolerance", "passed", "provenance"} <= set(check)


def test_verify_all_csv():
    code, out = call("verify-all", "--criteria", "3", "--format", "csv")
    assert code == EXIT_OK
    rows = list(csv.DictReader(out.splitlines()[2:]))
    assert rows and all(r["criterion"] == "3" for r in rows)


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ltlab.cli", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("ltlab ")
