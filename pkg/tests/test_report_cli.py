from __future__ import annotations

import json
import math

import numpy as np
import pytest

import steercert
from steercert import cli
from steercert.boxworld import box_to_json, prbox_assemblage
from steercert.errors import InputError, InternalCheckError
from steercert.report import RunReport, write_csv
from steercert.scenario import matrix_to_json, pauli_povm


def quantum_doc(p=0.75, with_bob=True, bob_eta=None):
    from steercert.scenario import noisy_pauli_povm

    def povm_json(povm):
        return [matrix_to_json(e) for e in povm.effects]

    alice = [povm_json(pauli_povm("x")), povm_json(pauli_povm("z"))]
    doc = {"dimA": 2, "dimB": 2, "state": {"kind": "werner", "p": p}, "alice_povms": alice}
    if with_bob:
        if bob_eta is None:
            doc["bob_povms"] = alice
        else:
            doc["bob_povms"] = [
                povm_json(noisy_pauli_povm("x", bob_eta)),
                povm_json(noisy_pauli_povm("z", bob_eta)),
            ]
    return doc


def test_run_report_round_trip():
    report = cli.cmd_prbox()
    assert report.version == steercert.__version__
    clone = RunReport.from_json(report.to_json())
    assert clone == report
    assert clone.to_json() == report.to_json()
    with pytest.raises(InputError):
        RunReport.from_dict({"command": "x"})


def test_write_csv_formats_booleans(tmp_path):
    path = tmp_path / "t.csv"
    write_csv(path, ["a", "flag"], [[1.5, True], [2.5, False]])
    lines = path.read_text().strip().splitlines()
    assert lines == ["a,flag", "1.5,true", "2.5,false"]


def test_cmd_singlet_cjwr_values():
    report = cli.cmd_singlet_cjwr(settings=2)
    assert abs(report.witness_values["F"] - math.sqrt(2.0)) < 1e-12
    statuses = {v["name"]: v["status"] for v in report.verdicts}
    assert statuses["lhs"] == "infeasible"
    assert statuses["pv[all tests]"] == "infeasible"
    assert len(report.details["certain_contexts"]) == 4

    report = cli.cmd_singlet_cjwr(settings=3)
    assert abs(report.witness_values["F"] - math.sqrt(3.0)) < 1e-12
    assert {v["name"]: v["status"] for v in report.verdicts}["lhs"] == "infeasible"


def test_cmd_singlet_cjwr_werner_override():
    report = cli.cmd_singlet_cjwr(settings=2, werner_p=0.0)
    assert abs(report.witness_values["F"]) < 1e-12
    statuses = {v["name"]: v["status"] for v in report.verdicts}
    assert statuses["lhs"] == "feasible"
    assert statuses["pv[test 0]"] == "feasible"
    assert statuses["pv[test 1]"] == "feasible"
    assert report.details["certain_contexts"] == []


def test_cmd_werner_scan_grid_and_bracket():
    report = cli.cmd_werner_scan(settings=2, grid=(0.5, 0.9, 0.1), bracket_tol=0.02)
    rows = report.details["csv_rows"]
    assert [row[0] for row in rows] == [0.5, 0.6, 0.7, 0.8, 0.9]
    for p, f, status in rows:
        assert abs(f - p * math.sqrt(2.0)) < 1e-12
    assert rows[-1][2] == "infeasible"
    lo = report.witness_values["p_feasible_max"]
    hi = report.witness_values["p_infeasible_min"]
    assert lo < 1.0 / math.sqrt(2.0) < hi


def test_cmd_werner_scan_witness_only():
    report = cli.cmd_werner_scan(settings=3, witness_only=True, grid=(0.4, 0.8, 0.2))
    assert abs(report.witness_values["crossing_p"] - 1.0 / math.sqrt(3.0)) < 1e-15
    assert "bracket" not in report.details


def test_cmd_werner_scan_validation():
    with pytest.raises(InputError):
        cli.cmd_werner_scan(settings=4)
    with pytest.raises(InputError):
        cli.cmd_werner_scan(grid=(0.9, 0.5, 0.1))


def test_cmd_prbox_report():
    report = cli.cmd_prbox()
    assert report.witness_values["chsh"] == 4.0
    assert report.details["chsh_exact"] == "4"
    assert report.witness_values["chsh"] > report.witness_values["quantum_bound"]
    assert report.details["no_signalling"]["passed"] is True
    statuses = {v["name"]: v["status"] for v in report.verdicts}
    assert statuses == {"lhs": "infeasible", "pv": "infeasible"}


def test_cmd_reid_point_and_sweep():
    report = cli.cmd_reid(0.69)
    assert abs(report.witness_values["product"] - 0.23660349919558887) < 1e-12
    assert report.details["steering"] is True
    report = cli.cmd_reid(0.0, sweep=(0.0, 1.0, 0.25))
    rows = report.details["csv_rows"]
    assert len(rows) == 5
    products = [row[3] for row in rows]
    assert all(b < a for a, b in zip(products, products[1:]))


def test_main_prbox_writes_report(tmp_path, capsys):
    out = tmp_path / "report.json"
    assert cli.main(["prbox", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["witness_values"]["chsh"] == 4.0
    captured = capsys.readouterr()
    assert "lhs: infeasible" in captured.out


def test_main_reid_csv(tmp_path):
    csv_path = tmp_path / "sweep.csv"
    code = cli.main(["reid", "--r", "0", "--sweep", "0:1:0.5", "--csv", str(csv_path)])
    assert code == 0
    lines = csv_path.read_text().strip().splitlines()
    assert lines[0] == "r,var_x_inf,var_p_inf,product,steering_flag"
    assert len(lines) == 4


def test_main_check_quantum(tmp_path, capsys):
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(quantum_doc(p=0.75)))
    assert cli.main(["check", str(path)]) == 0
    out = capsys.readouterr().out
    assert "lhs: infeasible" in out and "F = 1.060660" in out


def test_main_check_quantum_witness_skipped_for_unsharp_bob(tmp_path):
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(quantum_doc(p=0.3, bob_eta=0.7)))
    report = cli.cmd_check(path)
    assert report.details["witness_skipped"]
    assert "F" not in report.witness_values


def test_main_check_box(tmp_path, capsys):
    path = tmp_path / "box.json"
    path.write_text(json.dumps(box_to_json(prbox_assemblage())))
    assert cli.main(["check", str(path)]) == 0
    out = capsys.readouterr().out
    assert "chsh = 4.0" in out and "lhs: infeasible" in out


def test_main_input_error_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["check", str(bad)]) == 1
    assert cli.main(["check", str(tmp_path / "missing.json")]) == 1
    weird = tmp_path / "weird.json"
    weird.write_text(json.dumps({"hello": 1}))
    assert cli.main(["check", str(weird)]) == 1
    q = tmp_path / "q.json"
    q.write_text(json.dumps(quantum_doc()))
    assert cli.main(["check", str(q), "--mode", "exact"]) == 1
    assert cli.main(["reid", "--r", "-2"]) == 1
    assert cli.main(["singlet-cjwr", "--csv", "x.csv"]) == 1  # unknown flag for this command
    assert cli.main(["--help"]) == 0
    capsys.readouterr()


def test_main_internal_error_exit_code(monkeypatch, capsys):
    def boom():
        raise InternalCheckError("substitution failed")

    monkeypatch.setattr(cli, "cmd_prbox", boom)
    assert cli.main(["prbox"]) == 2
    assert "internal check failed" in capsys.readouterr().err


def test_verdict_content_does_not_affect_exit_code(tmp_path, capsys):
    # a steerable scenario is not an error
    path = tmp_path / "steer.json"
    path.write_text(json.dumps(quantum_doc(p=0.9)))
    assert cli.main(["check", str(path)]) == 0
    capsys.readouterr()
