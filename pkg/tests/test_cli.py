import csv
import json
import subprocess
import sys
from pathlib import Path

import pytest

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run_cli(*argv):
    return subprocess.run([sys.executable, "-m", "resonwave.cli", *argv],
                          capture_output=True, text=True)


def test_resonances_delta_m2(tmp_path):
    r = run_cli("resonances", "--config", str(CONFIGS / "delta_m2.json"),
                "--out", str(tmp_path))
    assert r.returncode == 0, r.stderr
    with open(tmp_path / "resonances.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 1
    assert abs(float(rows[0]["re"]) - 1.0) < 1e-12
    assert abs(float(rows[0]["im"])) < 1e-12
    assert rows[0]["multiplicity"] == "1"
    assert rows[0]["kind"] == "EigenvalueType"
    assert float(rows[0]["newton_residual"]) < 1e-12


def test_resonances_delta_p2(tmp_path):
    r = run_cli("resonances", "--config", str(CONFIGS / "delta_p2.json"),
                "--out", str(tmp_path))
    assert r.returncode == 0, r.stderr
    with open(tmp_path / "resonances.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 1
    assert abs(float(rows[0]["re"]) + 1.0) < 1e-12
    assert rows[0]["kind"] == "ResonanceType"


def test_manifest_completeness(tmp_path):
    r = run_cli("resonances", "--config", str(CONFIGS / "delta_m2.json"),
                "--out", str(tmp_path))
    assert r.returncode == 0
    man = json.loads((tmp_path / "manifest.json").read_text())
    files = sorted(p.name for p in tmp_path.iterdir())
    assert sorted(man["outputs"]) == files
    assert man["command"] == "resonances"
    assert "total" in man["timings"]


def test_config_error_exit_2(tmp_path):
    doc = json.loads((CONFIGS / "delta_m2.json").read_text())
    doc["contour"]["eps"] = 2.0
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    r = run_cli("expand", "--config", str(bad), "--out", str(tmp_path))
    assert r.returncode == 2
    err = json.loads(r.stderr.strip())
    assert err["error"] == "ConfigError"
    assert "contour ordering violated" in err["message"]


def test_missing_config_exit_2(tmp_path):
    r = run_cli("resonances", "--config", str(tmp_path / "nope.json"),
                "--out", str(tmp_path))
    assert r.returncode == 2
    assert json.loads(r.stderr.strip())["error"] == "ConfigError"


def test_nonconvergence_exit_3(tmp_path):
    # indicator data is outside dom(A): the tail cannot converge
    doc = json.loads((CONFIGS / "delta_m2.json").read_text())
    doc["state"] = {"shape": "indicator", "params": {"a": -1.0, "b": 1.0}}
    doc["expand"] = {"kind": "cosine", "times": [1.0]}
    cfg = tmp_path / "ind.json"
    cfg.write_text(json.dumps(doc))
    r = run_cli("expand", "--config", str(cfg), "--out", str(tmp_path))
    assert r.returncode == 3
    assert json.loads(r.stderr.strip())["error"] == "TruncationNotConverged"


def test_verify_free_exit_0(tmp_path):
    r = run_cli("verify", "--config", str(CONFIGS / "free.json"),
                "--out", str(tmp_path))
    assert r.returncode == 0, r.stdout + r.stderr
    rep = json.loads((tmp_path / "verify.json").read_text())
    assert rep["passed"] is True
    assert all(c["pass"] for c in rep["checks"])


def test_scan_alpha_trajectories(tmp_path):
    r = run_cli("scan-alpha", "--config", str(CONFIGS / "delta_sweep.json"),
                "--out", str(tmp_path))
    assert r.returncode == 0, r.stderr
    with open(tmp_path / "trajectories.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 6
    # delta zero tracks -alpha/2
    for row in rows:
        alpha = float(row["alpha_re"])
        z = complex(row["zeros"].split(";")[0])
        assert abs(z - (-alpha / 2.0)) < 1e-9
