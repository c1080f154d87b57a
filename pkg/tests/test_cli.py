import json
import subprocess
import sys

import numpy as np
import pytest

from airykit.cli import (EXIT_COVERAGE, EXIT_FAIL, EXIT_IO, EXIT_OK, EXIT_USAGE, RunConfig,
                         UsageError, main, make_grid, resolve_config)


def read_csv(path):
    lines = open(path).read().splitlines()
    head = [l for l in lines if l.startswith("#")]
    body = [l for l in lines if not l.startswith("#")]
    cols = body[0].split(",")
    rows = np.array([[float(v) for v in l.split(",")] for l in body[1:]])
    return head, cols, rows


def test_make_grid_includes_endpoint():
    g = make_grid(-1.0, 1.0, 0.5, "s")
    assert np.allclose(g, [-1, -0.5, 0, 0.5, 1])
    with pytest.raises(UsageError):
        make_grid(1.0, 0.0, 0.1, "s")
    with pytest.raises(UsageError):
        make_grid(0.0, 1.0, 0.0, "s")


def test_config_precedence(tmp_path):
    cfgfile = tmp_path / "c.json"
    cfgfile.write_text(json.dumps({"grid_min": -1.0, "grid_step": 0.25, "order": 30}))
    cfg = resolve_config("tw-table", {"order": 40, "grid_min": None}, str(cfgfile))
    assert cfg.order == 40          # flag beats file
    assert cfg.grid_min == -1.0     # file beats default
    assert cfg.grid_step == 0.25
    assert cfg.grid_max == 4.0      # default
    cfgfile.write_text(json.dumps({"bogus": 1}))
    with pytest.raises(UsageError):
        resolve_config("tw-table", {}, str(cfgfile))


def test_run_config_validation():
    with pytest.raises(UsageError):
        RunConfig("tw-table", 0, 1, 0.1, order=7, out="x").validate()
    with pytest.raises(UsageError):
        RunConfig("tw-table", 0, 1, 0.1, mesh=2, out="x").validate()


def test_tw_table_rows_and_reproducible(tmp_path):
    out = tmp_path / "tw.csv"
    args = ["tw-table", "--grid-min", "-3", "--grid-max", "2", "--grid-step", "0.5", "--out", str(out)]
    assert main(args) == EXIT_OK
    head, cols, rows = read_csv(out)
    assert cols == ["s", "F_GUE", "F_GOE", "F_GUE_painleve", "F_GOE_painleve", "max_route_discrepancy"]
    assert len(rows) == 11
    assert np.all(rows[:, 5] <= 1e-5)
    assert np.all(np.diff(rows[:, 1]) > 0) and np.all(rows[:, 2] < rows[:, 1])
    assert any(h.startswith("# order=") for h in head)
    first = out.read_bytes()
    assert b"\r\n" not in first
    assert main(args) == EXIT_OK
    assert out.read_bytes() == first


def test_tw_table_json(tmp_path):
    out = tmp_path / "tw.json"
    assert main(["tw-table", "--grid-min", "0", "--grid-max", "1", "--grid-step", "0.5",
                 "--format", "json", "--out", str(out)]) == EXIT_OK
    doc = json.load(open(out))
    assert len(doc["rows"]) == 3 and doc["columns"][0] == "s"


def test_usage_errors(tmp_path):
    out = str(tmp_path / "x.csv")
    assert main(["tw-table", "--grid-min", "1", "--grid-max", "0", "--out", out]) == EXIT_USAGE
    assert main(["tw-table", "--grid-min", "-12", "--grid-max", "0", "--out", out]) == EXIT_USAGE
    assert main(["tw-table", "--order", "7", "--out", out]) == EXIT_USAGE
    assert main(["persistence", "--grid-min", "1", "--grid-max", "1", "--grid-step", "0.5",
                 "--out", out]) == EXIT_USAGE
    assert main(["tw-table", "--config", str(tmp_path / "missing.json"), "--out", out]) == EXIT_USAGE


def test_endpoint_coverage_error(tmp_path):
    out = str(tmp_path / "e.csv")
    assert main(["endpoint", "--grid-min", "-3", "--grid-max", "3", "--out", out]) == EXIT_COVERAGE
    assert main(["endpoint", "--m-max", "3", "--out", out]) == EXIT_COVERAGE


def test_unwritable_output(tmp_path):
    out = str(tmp_path / "no" / "such" / "dir" / "x.csv")
    assert main(["tw-table", "--grid-min", "0", "--grid-max", "1", "--grid-step", "0.5",
                 "--out", out]) == EXIT_IO


def test_endpoint_outputs(tmp_path):
    out = tmp_path / "e.csv"
    assert main(["endpoint", "--out", str(out)]) == EXIT_OK
    _, cols, rows = read_csv(out)
    assert cols == ["t", "f_end"] and len(rows) == 71
    _, cols, joint = read_csv(tmp_path / "e_joint.csv")
    assert cols == ["t", "m", "f"] and len(joint) == 71 * 101
    stats = json.load(open(tmp_path / "e.stats.json"))
    assert abs(stats["variance"] - 0.2409381) < 1e-5
    assert abs(stats["excess_kurtosis"] + 0.2373585) < 1e-5


def test_persistence_outputs(tmp_path):
    out = tmp_path / "p.csv"
    assert main(["persistence", "--out", str(out)]) == EXIT_OK
    head, cols, rows = read_csv(out)
    assert cols == ["L", "P", "log_P"] and len(rows) == 4
    assert any(h.startswith("# level_used=") for h in head)
    stats = json.load(open(tmp_path / "p.stats.json"))
    assert 2.8 < stats["kappa"] < 3.0


def test_validate_low_order_fails(tmp_path):
    out = tmp_path / "v.json"
    assert main(["validate", "--order", "8", "--out", str(out)]) == EXIT_FAIL
    doc = json.load(open(out))
    assert doc["all_pass"] is False
    assert any(c["check"].startswith("convergence") and not c["pass"] for c in doc["checks"])


def test_console_script_help():
    r = subprocess.run([sys.executable, "-m", "airykit.cli", "--help"], capture_output=True, text=True)
    assert r.returncode == 0 and "tw-table" in r.stdout
