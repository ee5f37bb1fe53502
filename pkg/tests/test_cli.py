import csv
import json
import subprocess
import sys

import pytest

from axired import catalog as K
from axired import cli
from axired.numerics import StepUnderflow
from axired.report import SCHEMA, Report, validate


def run(tmp_path, *argv):
    out = tmp_path / "report.json"
    code = cli.main(list(argv) + ["--out", str(out)])
    doc = json.loads(out.read_text()) if out.exists() else None
    if doc is not None:
        validate(doc)
    return code, doc


def results(doc):
    return {r["name"]: r for r in doc["results"]}


def test_reduce_kerr(tmp_path):
    code, doc = run(tmp_path, "reduce", "--metric", "kerr", "--M", "1", "--a", "0.5", "--conformal")
    assert code == 0
    assert doc["command"] == "reduce" and doc["inputs"]["params"] == {"M": 1.0, "a": 0.5}
    assert doc["provenance"]["conventions"]["signature"] == "(-,+,+,+)"


@pytest.mark.parametrize("check", ["vacuum", "reduced", "ewm", "conformal"])
def test_verify_schwarzschild(tmp_path, check):
    code, doc = run(tmp_path, "verify", "--metric", "schwarzschild", "--check", check)
    assert code == 0 and all(r["passed"] is not False for r in doc["results"])


def test_verify_kerr_ewm(tmp_path):
    code, doc = run(tmp_path, "verify", "--metric", "kerr", "--check", "ewm")
    assert code == 0


def test_impossible_tolerance_fails(tmp_path):
    code, doc = run(tmp_path, "verify", "--metric", "kerr", "--check", "vacuum", "--tol", "1e-20")
    assert code == cli.EXIT_CHECK


def test_metric_file_input(tmp_path):
    path = tmp_path / "s.metric"
    K.save(K.schwarzschild(2.0).metric, path)
    code, doc = run(tmp_path, "verify", "--metric-file", str(path), "--check", "vacuum")
    assert code == 0 and doc["inputs"]["params"] == {"m": 2.0}


def test_energy_minkowski_csv(tmp_path):
    csv_path = tmp_path / "e.csv"
    code, doc = run(tmp_path, "energy", "--metric", "minkowski", "--rmax-list", "10,100,1000,10000",
                    "--csv", str(csv_path), "--expect", "log-divergent")
    assert code == 0
    res = results(doc)
    assert res["verdict"]["value"] == "log-divergent"
    with open(csv_path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["R", "E"] and len(rows) >= 6


def test_energy_gaussian_field_converges(tmp_path):
    code, doc = run(tmp_path, "energy", "--metric", "minkowski", "--field", "gaussian",
                    "--expect", "convergent")
    assert code == 0


def test_energy_too_few_radii(tmp_path):
    code, _ = run(tmp_path, "energy", "--metric", "minkowski", "--rmax-list", "10,20")
    assert code == cli.EXIT_INPUT


def test_constraint_subcritical(tmp_path):
    csv_path = tmp_path / "c.csv"
    code, doc = run(tmp_path, "constraint", "--amp", "0.1", "--csv", str(csv_path))
    assert code == 0
    res = results(doc)
    assert res["status"]["value"] == "subcritical"
    assert res["m_AV"]["value"] == pytest.approx(0.00374785278354417, rel=1e-8)
    header = csv_path.read_text().splitlines()[0]
    assert header == "r,chi,gamma,energy_density"


def test_constraint_supercritical(tmp_path):
    code, doc = run(tmp_path, "constraint", "--amp", "3")
    assert code == 0
    assert results(doc)["r_star"]["value"] == pytest.approx(1.0793, abs=1e-4)


def test_adm(tmp_path):
    code, doc = run(tmp_path, "adm", "--metric", "schwarzschild-spatial", "--m", "1")
    assert code == 0
    assert results(doc)["m_ADM"]["value"] == pytest.approx(1.0, rel=1e-6)


@pytest.mark.parametrize("argv", [
    ["verify", "--metric", "de-sitter"],
    ["reduce", "--metric", "kerr", "--a", "2"],
    ["verify", "--metric-file", "/nonexistent/file.metric"],
    ["adm", "--m", "-1"],
    ["energy", "--eps", "not-a-number"],
    ["constraint", "--profile", "triangle"],
])
def test_input_errors(tmp_path, argv):
    with pytest.raises(SystemExit) as info:
        raise SystemExit(cli.main(argv))
    assert info.value.code == cli.EXIT_INPUT


def test_bad_metric_file(tmp_path):
    path = tmp_path / "bad.metric"
    path.write_text("dim 4 coords t r theta phi signature lorentzian\n0 0 := -(1 - \n")
    assert cli.main(["verify", "--metric-file", str(path)]) == cli.EXIT_INPUT


def test_numeric_failure_code(tmp_path, monkeypatch):
    def boom(*a, **k):
        raise StepUnderflow(0.5)
    monkeypatch.setattr(cli.EN, "solve_constraint", boom)
    assert cli.main(["constraint"]) == cli.EXIT_NUMERIC


def test_paper_suite_subset(tmp_path, capsys):
    code, doc = run(tmp_path, "paper-suite", "--only", "1,3")
    out = capsys.readouterr().out
    assert code == 0
    assert "[PASS] 1." in out and "[PASS] 3." in out


def test_report_schema_rejects_missing_tolerance():
    rep = Report("x")
    rep.add("residual", 1e-3, None, True)
    with pytest.raises(Exception):
        rep.to_dict()
    assert SCHEMA["type"] == "object"


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "axired.cli", "reduce", "--metric", "minkowski"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "PASS" in proc.stdout
