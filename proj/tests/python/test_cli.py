import json
import os
import subprocess
from pathlib import Path

import pytest

CLI = os.environ.get("RRAMPROG_CLI")
pytestmark = pytest.mark.skipif(not CLI, reason="RRAMPROG_CLI not set")

SMALL = "experiment.replicas = 2\nintervals.n_states = 3\n"


def run(*args, env=None):
    return subprocess.run([CLI, *map(str, args)], capture_output=True, text=True, env=env)


@pytest.fixture
def config(tmp_path):
    path = tmp_path / "small.cfg"
    path.write_text(SMALL)
    return path


def test_report_writes_three_artifacts(tmp_path, config):
    out = tmp_path / "out"
    r = run("report", "--config", config, "--out", out)
    assert r.returncode == 0, r.stderr
    assert sorted(p.name for p in out.iterdir()) == ["histograms.csv", "report.json", "traces.csv"]
    report = json.loads((out / "report.json").read_text())
    seeds = ",".join(str(m["seed"]) for m in report["seed_manifest"])
    assert f"# seeds={seeds}\n" in (out / "traces.csv").read_text()


def test_rerun_is_byte_identical(tmp_path, config):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run("run", "--config", config, "--out", a).returncode == 0
    assert run("run", "--config", config, "--out", b, "--threads", "2").returncode == 0
    for name in ("traces.csv", "report.json", "histograms.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_flags_override_config(tmp_path, config):
    out = tmp_path / "o"
    r = run("report", "--config", config, "--out", out, "--seed", 40, "--replicas", 1, "--policy", "naive", "--states", 2)
    assert r.returncode == 0, r.stderr
    report = json.loads((out / "report.json").read_text())
    assert [m["seed"] for m in report["seed_manifest"]] == [40]
    assert [p["policy"] for p in report["policies"]] == ["naive"]
    assert len(report["intervals"]) == 2


def test_sweep_matches_individual_runs(tmp_path, config):
    out = tmp_path / "sweep"
    r = run("sweep", "--config", config, "--out", out)
    assert r.returncode == 0, r.stderr
    index = json.loads((out / "sweep.json").read_text())["sweep"]
    assert [e["delta_t_s"] for e in index] == [0, 1, 5, 10]
    assert [e["policy"] for e in index] == ["naive"] + ["relax-aware"] * 3
    single = tmp_path / "single"
    r = run("report", "--config", config, "--out", single, "--policy", "relax-aware")
    assert r.returncode == 0, r.stderr
    assert (out / "dt_5.000s" / "report.json").read_bytes() == (single / "report.json").read_bytes()
    naive = tmp_path / "naive"
    assert run("report", "--config", config, "--out", naive, "--policy", "naive").returncode == 0
    assert (out / "dt_0.000s" / "report.json").read_bytes() == (naive / "report.json").read_bytes()


def test_single_array_subcommands(tmp_path, config):
    r = run("form-check", "--config", config, "--out", tmp_path / "f")
    assert r.returncode == 0, r.stderr
    assert len((tmp_path / "f" / "formed.csv").read_text().splitlines()) == 65
    r = run("program", "--config", config, "--out", tmp_path / "p", "--state", 1, "--policy", "naive")
    assert r.returncode == 0, r.stderr
    doc = json.loads((tmp_path / "p" / "program.json").read_text())
    assert len(doc["devices"]) == 64 and all(d["state"] == 1 for d in doc["devices"])
    r = run("retention", "--config", config, "--out", tmp_path / "r", "--state", 2)
    assert r.returncode == 0, r.stderr
    assert len((tmp_path / "r" / "retention.csv").read_text().splitlines()) == 1 + 64 * 3


def test_errors_are_json(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("protocol.write.width_ns = 90\n")
    r = run("report", "--config", bad, "--out", tmp_path / "x")
    assert r.returncode != 0
    err = json.loads(r.stderr)["error"]
    assert err["code"] == "ValidationError"
    assert "100 ns" in err["message"]
    dup = tmp_path / "dup.cfg"
    dup.write_text("device.g_floor = 3\ndevice.g_floor = 3\n")
    err = json.loads(run("report", "--config", dup, "--out", tmp_path / "y").stderr)["error"]
    assert err["code"] == "ParseError" and "line 2" in err["message"]


def test_default_output_root_from_environment(tmp_path, config):
    env = dict(os.environ, RRAMPROG_OUT_ROOT=str(tmp_path / "root"))
    r = run("form-check", "--config", config, env=env)
    assert r.returncode == 0, r.stderr
    assert (tmp_path / "root" / "form-check" / "formed.csv").exists()
