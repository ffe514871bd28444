import json

import pytest

from blinecox.cli import CHECKS, RunConfig, main, run_checks
from blinecox.curves import CurveTable

FAST_CHECKS = [
    "band_area_plp_constant",
    "plp_intersection_density",
    "pgfl_unit_functional",
    "success_closed_form_alpha2",
    "void_blp_vs_mc",
]


def run(tmp_path, *argv):
    out = tmp_path / "out"
    rc = main([*argv, "--out", str(out)])
    assert rc == 0
    return out.read_text()


def test_sample_output(tmp_path):
    text = run(tmp_path, "sample", "--seed", "4")
    table = CurveTable.from_csv(text)
    assert set(table.series_names()) <= {"line", "point"}
    assert len(table.select("line")[0]) == 10
    assert table.metadata["seed"] == 4


def test_density_with_overlay(tmp_path):
    text = run(tmp_path, "density", "--kind", "line_length", "--r-max", "40",
               "--n-grid", "11", "--mc", "--trials", "2000", "--format", "json")
    table = CurveTable.from_json(text)
    names = table.series_names()
    assert any(n.startswith("mc") for n in names)
    x, y = table.select(names[0])
    assert len(x) == 11


def test_nearest_targets(tmp_path):
    for target in ("line", "blcp_point", "intersection"):
        n_grid = "21" if target != "intersection" else "9"
        text = run(tmp_path, "nearest", "--target", target,
                   "--t-max", "20", "--n-grid", n_grid)
        table = CurveTable.from_csv(text)
        _, y = table.select(table.series_names()[0])
        assert (y >= -1e-12).all() and (y <= 1 + 1e-12).all()
        assert (y[1:] - y[:-1] >= -1e-9).all()


def test_coverage_sweep(tmp_path):
    text = run(tmp_path, "coverage", "--sweep", "r0", "--lo", "0", "--hi", "50",
               "--n-grid", "6", "--xi0", "2.9858e8")
    table = CurveTable.from_csv(text)
    _, y = table.select(table.series_names()[0])
    assert (y >= 0).all() and (y <= 1).all()


def test_delay_output(tmp_path):
    text = run(tmp_path, "delay", "--n-p", "6", "--xi0", "10", "--nb", "2",
               "--radius", "20", "--lambda", "0.05", "--gamma", "0.01")
    table = CurveTable.from_csv(text)
    _, y = table.select(table.series_names()[0])
    assert (y[~_isinf(y)] >= 1).all()


def _isinf(y):
    import numpy as np
    return np.isinf(y)


def test_seeded_rerun_is_byte_identical(tmp_path):
    a = run(tmp_path, "sample", "--seed", "12")
    b = run(tmp_path, "sample", "--seed", "12")
    assert a == b


def test_env_var_output_dir(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("BLINECOX_OUT", str(tmp_path))
    rc = main(["sample", "--seed", "1"])
    assert rc == 0
    printed = capsys.readouterr().out.strip()
    assert printed == str(tmp_path / "sample.csv")
    CurveTable.from_csv((tmp_path / "sample.csv").read_text())


def test_stdout_output(capsys):
    rc = main(["sample", "--seed", "2", "--out", "-"])
    assert rc == 0
    CurveTable.from_csv(capsys.readouterr().out)


def test_csv_json_same_table(tmp_path):
    csv_text = run(tmp_path, "nearest", "--target", "line", "--n-grid", "11")
    json_text = run(tmp_path, "nearest", "--target", "line", "--n-grid", "11",
                    "--format", "json")
    a = CurveTable.from_csv(csv_text)
    b = CurveTable.from_json(json_text)
    b.metadata["fmt"] = a.metadata["fmt"] = "x"  # only the format field differs
    assert a == b


def test_validate_fast_subset(tmp_path, capsys):
    rc = main(["validate", "--checks", *FAST_CHECKS, "--trials", "4000",
               "--seed", "5", "--out", str(tmp_path / "report.json")])
    captured = capsys.readouterr()
    assert rc == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["passed"] is True
    assert {c["check"] for c in report["checks"]} == set(FAST_CHECKS)
    for check in report["checks"]:
        assert check["passed"] is True
        assert f"PASS {check['check']}" in captured.err


def test_validate_inject_fault(tmp_path, capsys):
    rc = main(["validate", "--checks", *FAST_CHECKS, "--trials", "4000",
               "--seed", "5", "--inject-fault", "pgfl_unit_functional",
               "--out", str(tmp_path / "report.json")])
    assert rc == 1
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["passed"] is False
    failed = [c["check"] for c in report["checks"] if not c["passed"]]
    assert failed == ["pgfl_unit_functional"]


def test_run_checks_report_shape():
    cfg = RunConfig(trials=2000, seed=5)
    report = run_checks(cfg, ["band_area_plp_constant"])
    assert report["schema_version"] >= 1
    assert report["config"]["trials"] == 2000
    check = report["checks"][0]
    assert {"check", "passed", "observed", "expected", "tolerance"} <= set(check)


def test_unknown_check_rejected():
    cfg = RunConfig(trials=100, seed=0)
    with pytest.raises((KeyError, SystemExit, ValueError)):
        run_checks(cfg, ["no_such_check"])


def test_registry_has_ten_checks():
    assert len(CHECKS) == 10
