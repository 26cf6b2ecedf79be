import csv
import json
import os
import subprocess
import sys

import pytest

from mfdirac import cli_report
from mfdirac.cli_report import CSV_COLUMNS, ConfigError, RunConfig, main, parse_n_list


def _run(tmp_path, *argv):
    code = main([*argv, "--out", str(tmp_path), "--quiet"])
    report = None
    if (tmp_path / "report.json").exists():
        report = json.loads((tmp_path / "report.json").read_text())
    return code, report


def test_params_suite_passes(tmp_path):
    code, report = _run(tmp_path, "params", "--n", "3", "--trials", "5")
    assert code == 0 and report["passed"]
    assert report["schema_version"] == cli_report.SCHEMA_VERSION
    assert report["summary"]["failed"] == 0
    for c in report["checks"]:
        assert {"suite", "id", "n", "passed", "anchor"} <= set(c)
        assert c["anchor"]


def test_failing_check_exits_one(tmp_path):
    code, report = _run(tmp_path, "verify-identities", "--n", "9", "--trials", "1")
    assert code == 1
    assert set(report["summary"]["failed_ids"]) == {"identities:FI-HOR+", "identities:FI-HOR-"}


@pytest.mark.parametrize("argv", [
    ["params", "--bogus"],
    ["nonsense"],
    ["params", "--n", "1"],
    ["params", "--n", "x"],
    ["params", "--trials", "0"],
    ["params", "--format", "xml"],
    ["torus-spectrum", "--tol", "-1"],
])
def test_usage_errors_exit_two(tmp_path, argv, capsys):
    assert main([*argv, "--out", str(tmp_path)]) == 2


def test_config_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nn = 2\nradius = 1\ntrials = 3\nformat = json\n")
    out = tmp_path / "o"
    code = main(["torus-spectrum", "--config", str(cfg), "--radius", "2", "--out", str(out), "--quiet"])
    report = json.loads((out / "report.json").read_text())
    assert code == 0
    assert report["config"]["radius"] == 2  # flag wins
    assert report["config"]["n_list"] == [2] and report["config"]["trials"] == 3
    assert not (out / "spectra.csv").exists()


def test_bad_config_exits_two(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("colour = blue\n")
    assert main(["params", "--config", str(cfg), "--out", str(tmp_path)]) == 2
    cfg.write_text("just words\n")
    assert main(["params", "--config", str(cfg), "--out", str(tmp_path)]) == 2
    assert main(["params", "--config", str(tmp_path / "missing"), "--out", str(tmp_path)]) == 2


def test_unwritable_output_exits_two(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["torus-spectrum", "--n", "2", "--radius", "1", "--out", str(blocker / "sub"), "--quiet"]) == 2


def test_env_var_sets_default_output(tmp_path, monkeypatch):
    monkeypatch.setenv(cli_report.ENV_OUT, str(tmp_path / "env"))
    assert main(["torus-spectrum", "--n", "2", "--radius", "1", "--quiet"]) == 0
    assert (tmp_path / "env" / "report.json").exists()


def test_csv_layout_and_row_count(tmp_path):
    R = 1
    code, report = _run(tmp_path, "torus-spectrum", "--n", "2", "--radius", str(R))
    assert code == 0
    with open(tmp_path / "spectra.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert report["csv_columns"] == list(CSV_COLUMNS)
    per_case = {}
    for r in rows[1:]:
        per_case[r[0]] = per_case.get(r[0], 0) + 1
    # proposition and anti-self-adjoint companion, (2R+1)^n modes, spinor dimension 2
    assert per_case["prop1"] + per_case["prop1-anti-self-adjoint"] == 2 * (2 * R + 1) ** 2 * 2
    for r in rows[1:]:
        float(r[2]), float(r[3])
        assert (r[4] == "") == (r[5] == "")  # companion spectra carry no bound
        assert int(r[1]) == 2


def test_deterministic_modulo_timestamps(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    main(["params", "--n", "3", "--trials", "4", "--seed", "7", "--out", str(a), "--quiet"])
    main(["params", "--n", "3", "--trials", "4", "--seed", "7", "--out", str(b), "--quiet"])
    ra, rb = (json.loads((d / "report.json").read_text()) for d in (a, b))
    for r in (ra, rb):
        r.pop("timestamp"), r.pop("timing"), r["config"].pop("out")
    assert ra == rb


def test_empty_run_is_valid_json(tmp_path):
    report = cli_report.make_report(RunConfig(suites=()), [], {})
    paths = cli_report.emit(report, [], str(tmp_path), "both")
    assert json.loads((tmp_path / "report.json").read_text())["summary"]["checks"] == 0
    assert len(paths) == 2
    assert (tmp_path / "spectra.csv").read_text().strip() == ",".join(CSV_COLUMNS)


def test_parse_n_list():
    assert parse_n_list("2-4,7") == (2, 3, 4, 7)
    assert parse_n_list("3, 3") == (3,)
    with pytest.raises(ConfigError):
        parse_n_list("")


def test_console_entry_point(tmp_path):
    env = dict(os.environ, **{cli_report.ENV_OUT: str(tmp_path)})
    res = subprocess.run([sys.executable, "-m", "mfdirac.cli_report", "sphere-checks", "--n", "2"],
                         capture_output=True, text=True, env=env)
    assert res.returncode == 0, res.stderr
    assert "report.json" in res.stdout
