import csv
import os
import subprocess
import sys

import pytest

from darboux import cli
from darboux.specfun import NonConvergence


def run(*args, cwd=None, env=None):
    return subprocess.run([sys.executable, "-m", "darboux", *args], capture_output=True, text=True, cwd=cwd,
                          env=env)


def test_curvature_command_writes_csv(tmp_path):
    out = tmp_path / "out"
    res = run("curvature", "--space", "dII", "--a", "-1", "--b", "1", "--output-dir", str(out))
    assert res.returncode == 0, res.stderr
    rows = list(csv.reader((out / "curvature.csv").open()))
    assert tuple(rows[0]) == cli.HEADER
    assert len(rows) == 101
    assert all(r[5] == "true" for r in rows[1:])
    # reals carry 17 significant digits
    assert float(rows[1][2]) == float(format(float(rows[1][2]), ".17g"))


def test_identity_output_is_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run("identity", "--id", "eq3_17", "--output-dir", str(a)).returncode == 0
    assert run("identity", "--id", "eq3_17", "--output-dir", str(b)).returncode == 0
    assert (a / "identity.csv").read_bytes() == (b / "identity.csv").read_bytes()
    assert len((a / "identity.csv").read_text().splitlines()) == 4


def test_unknown_space_exits_2_with_one_line(tmp_path):
    res = run("curvature", "--space", "dV", "--output-dir", str(tmp_path))
    assert res.returncode == 2
    assert len(res.stderr.strip().splitlines()) == 1


def test_not_a_limit_point_exits_2(tmp_path):
    res = run("limits", "--space", "dII", "--a", "-1", "--b", "1", "--output-dir", str(tmp_path))
    assert res.returncode == 2


def test_inadmissible_parameters_exit_2(tmp_path):
    assert run("curvature", "--space", "dIV", "--a", "1", "--b", "1", "--output-dir", str(tmp_path)).returncode == 2


def test_failing_row_exits_1(tmp_path):
    res = run("limits", "--space", "dIII", "--a", "1", "--b", "0", "--tol", "plane_wave=0",
              "--output-dir", str(tmp_path))
    assert res.returncode == 1
    assert "false" in (tmp_path / "limits.csv").read_text()


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# run settings\ncommand = limits\nspace = dII\na = -1\nb = 0\nhbar = 2.0\ntol.plane_wave = 1e-6\n")
    c = cli.parse_config(["--config", str(cfg)])
    assert (c.command, c.a, c.b, c.hbar) == ("limits", -1.0, 0.0, 2.0)
    assert c.tol("plane_wave") == 1e-6
    c = cli.parse_config(["--config", str(cfg), "--hbar", "3", "--tol", "plane_wave=1e-4"])
    assert c.hbar == 3.0 and c.tol("plane_wave") == 1e-4
    assert cli.parse_config([]).hbar == 1.0


def test_config_file_runs_through_cli(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("command = limits\nspace = dII\na = -1\nb = 0\n")
    res = run("--config", str(cfg), "--output-dir", str(tmp_path / "o"))
    assert res.returncode == 0, res.stderr
    assert (tmp_path / "o" / "limits.csv").exists()


@pytest.mark.parametrize("text,line", [("space dII\n", 1), ("a = 1\nb = = 2\n", 2), ("# c\nfoo = 1\n", 2),
                                       ("hbar = x\n", 1)])
def test_bad_config_lines(tmp_path, text, line):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text(text)
    with pytest.raises(cli.ParseError) as err:
        cli.parse_config(["--config", str(cfg)])
    assert err.value.line == line
    res = run("curvature", "--config", str(cfg), "--output-dir", str(tmp_path))
    assert res.returncode == 2
    assert f"line {line}" in res.stderr


def test_output_dir_from_environment(tmp_path):
    env = dict(os.environ, DARBOUX_OUTPUT_DIR=str(tmp_path / "env"))
    assert run("identity", "--id", "eq5_33", env=env, cwd=tmp_path).returncode == 0
    assert (tmp_path / "env" / "identity.csv").exists()


def test_numerical_failure_exits_3(tmp_path, monkeypatch):
    def boom(cfg):
        raise NonConvergence("series did not converge")
    monkeypatch.setitem(cli.SUITES, "identity", boom)
    assert cli.main(["identity", "--output-dir", str(tmp_path)]) == 3


def test_skipped_rows_marked(tmp_path):
    res = run("residual", "--space", "dI", "--output-dir", str(tmp_path))
    assert res.returncode == 0
    rows = list(csv.reader((tmp_path / "residual.csv").open()))[1:]
    assert rows and all(r[5] == "SKIPPED" for r in rows)


def test_rows_to_csv_format():
    rows = [cli.ReportRow("x", "a=1", 0.1, 0.0, 1e-8, False), cli.ReportRow("y", "", None, None, 0.0, None)]
    text = cli.rows_to_csv(rows)
    assert text.splitlines()[1] == "x,a=1,0.10000000000000001,0,1e-08,false"
    assert text.splitlines()[2].endswith(",SKIPPED")
    assert "\r" not in text
