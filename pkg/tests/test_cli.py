import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from lossymzi import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, out


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_qfi_example(capsys):
    code, out = run(capsys, "qfi", "--n", "2", "--eta1", "0.8", "--eta2", "0.8")
    assert code == 0
    (row,) = rows_of(out)
    assert float(row["f_q"]) == pytest.approx(3.8788, abs=1e-4)
    assert list(row) == list(cli.COLUMNS)


def test_squeeze_flag(capsys):
    _, out = run(capsys, "qfi", "--r", str(np.arcsinh(1.0)))
    (row,) = rows_of(out)
    assert float(row["n"]) == pytest.approx(2.0)
    assert float(row["f_q"]) == pytest.approx(8.0)


def test_eta_shorthand(capsys):
    _, out = run(capsys, "parity", "--n", "1", "--eta", "0.7", "--model", "one-arm", "--phi", "0.5")
    (row,) = rows_of(out)
    assert (row["eta1"], row["eta2"], row["model"]) == ("0.7", "1.0", "one_arm")
    _, out = run(capsys, "parity", "--n", "1", "--eta", "0.7", "--phi", "0.5")
    (row,) = rows_of(out)
    assert (row["eta1"], row["eta2"]) == ("0.7", "0.7")


def test_divergence_written_as_inf(capsys):
    _, out = run(capsys, "parity", "--n", "1", "--eta1", "0.9", "--phi", "0")
    (row,) = rows_of(out)
    assert row["delta_phi"] == "inf"
    assert "nan" not in out.lower()
    _, out = run(capsys, "parity", "--n", "1", "--eta1", "0.9", "--phi", "0", "--format", "json")
    assert json.loads(out)["delta_phi"] == "inf"


def test_optimize_budget(capsys):
    _, out = run(capsys, "optimize", "--N", "200", "--eta", "0.99", "--model", "one-arm")
    (row,) = rows_of(out)
    assert 10 < float(row["n"]) < 200
    assert float(row["phi"]) == float(row["phi_opt"])


def test_figure_four_has_interior_minimum(capsys):
    code, out = run(capsys, "figure", "fig4", "--eta", "0.99", "--N", "200")
    assert code == 0
    rows = rows_of(out)
    values = np.array([float(r["delta_phi_repeated"]) for r in rows])
    i = int(np.argmin(values))
    assert 0 < i < len(values) - 1


@pytest.mark.parametrize("fig", sorted(cli.FIGURES))
def test_figures_complete(capsys, fig):
    code, out = run(capsys, "figure", fig, "--points", "4")
    assert code == 0
    rows = rows_of(out)
    assert rows
    for row in rows:
        assert all(v != "" and v.lower() != "nan" for v in row.values())


def test_output_is_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert cli.main(["figure", "fig3_left", "--points", "5", "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_json_lines(capsys):
    _, out = run(capsys, "figure", "fig2_right", "--points", "3", "--format", "json")
    lines = [json.loads(line) for line in out.splitlines()]
    assert len(lines) == 6
    assert set(lines[0]) == set(cli.COLUMNS)


@pytest.mark.parametrize(
    "argv",
    [
        ["qfi", "--n", "1", "--r", "1"],
        ["qfi", "--n", "1", "--eta", "0.5", "--eta1", "0.4"],
        ["qfi", "--n", "1", "--eta", "0.5", "--model", "general"],
        ["qfi", "--n", "1", "--eta1", "1.5"],
        ["qfi", "--n", "-1"],
        ["qfi"],
        ["qfi", "--n", "4", "--N", "2"],
        ["figure", "fig9"],
        ["validate", "--grid", "0"],
    ],
)
def test_usage_errors_exit_2(argv):
    with pytest.raises(SystemExit) as info:
        cli.main(argv)
    assert info.value.code == 2


def test_validate_passes(capsys):
    code, out = run(capsys, "validate", "--grid", "100", "--seed", "7")
    assert code == 0
    assert all(r["passed"] == "true" for r in rows_of(out))


def test_validate_reports_failure(capsys, monkeypatch):
    bad = [{"check": "x", "points": 1, "max_error": 1.0, "tolerance": 0.1, "passed": False}]
    monkeypatch.setattr(cli, "validation_checks", lambda grid, seed: bad)
    code, out = run(capsys, "validate", "--grid", "1")
    assert code == 1
    assert "false" in out


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "lossymzi.cli", "qfi", "--n", "1"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert math.isclose(float(rows_of(proc.stdout)[0]["f_q"]), 3.0)
