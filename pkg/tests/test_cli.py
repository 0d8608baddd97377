import json

import pytest
from hypothesis import given, settings, strategies as st

from twomuhs import cli
from twomuhs.config import ConfigError, RunConfig
from twomuhs.verification import Check, VerifyReport

BASE = {"n": 32, "dt": 0.01, "t_end": 0.1, "cadence": 2}


def write_cfg(tmp_path, data, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def test_config_json_roundtrip_is_byte_identical():
    cfg = RunConfig(n=64, gamma=(0.1, 0.2, 0.3), lambdas=(1.0,), snapshot_times=(0.0, 0.5),
                    initial={"f": {"seed": 1, "k_max": 3, "mean": 1.0}, "v": {"seed": 2, "k_max": 3}})
    text = cfg.to_json()
    assert RunConfig.from_json(text).to_json() == text


@given(st.integers(3, 9), st.lists(st.floats(-2, 2, allow_nan=False), min_size=3, max_size=3),
       st.integers(0, 10**6))
@settings(max_examples=30, deadline=None)
def test_config_roundtrip_property(log_n, gamma, seed):
    cfg = RunConfig(n=2**log_n, gamma=tuple(gamma), seed=seed)
    assert RunConfig.from_json(cfg.to_json()) == cfg


@pytest.mark.parametrize("data", [
    {"n": 32, "t_end": 1.0},
    {"n": 32, "dt": 0.01, "t_end": 0.1, "bogus": 1},
    {"n": 30, "dt": 0.01, "t_end": 0.1},
    {"n": 32, "dt": -0.01, "t_end": 0.1},
    {"n": 32, "dt": 0.03, "t_end": 0.1},
    {"n": 32, "dt": 0.01, "t_end": 0.1, "formulation": "euler"},
    {"n": 32, "dt": 0.01, "t_end": 0.1, "initial": "spiky"},
    {"n": 32, "dt": 0.01, "t_end": 0.1, "lambdas": [0.0]},
    {"n": 32, "dt": 0.01, "t_end": 0.1, "gamma": [1, 2]},
    {"n": 32, "dt": 0.01, "t_end": 0.1, "snapshot_times": [0.005]},
    {"n": 32, "dt": 0.01, "t_end": 0.1, "initial": {"f": {"seed": 1, "k_max": 9}, "v": {"k_max": 1}}},
])
def test_invalid_configs_rejected(data):
    with pytest.raises(ConfigError):
        RunConfig.from_dict(data, ("n", "dt", "t_end"))


def test_missing_dt_exits_1_without_output(tmp_path, capsys):
    path = write_cfg(tmp_path, {"n": 32, "t_end": 1.0})
    out = tmp_path / "out"
    assert cli.main(["simulate", "--config", path, "--out", str(out)]) == 1
    assert not out.exists()
    assert "dt" in capsys.readouterr().err


def test_bad_flag_exits_1(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["simulate", "--no-such-flag"])
    assert info.value.code == 1


def test_simulate_is_deterministic(tmp_path):
    path = write_cfg(tmp_path, dict(BASE, snapshot_times=[0, 0.04, 0.1]))
    outs = [tmp_path / "a", tmp_path / "b"]
    for out in outs:
        assert cli.main(["simulate", "--config", path, "--out", str(out)]) == 0
    files = sorted(p.relative_to(outs[0]) for p in outs[0].rglob("*.csv"))
    assert len(files) == 4 + 6
    for rel in files:
        assert (outs[0] / rel).read_bytes() == (outs[1] / rel).read_bytes()
    ma = json.loads((outs[0] / "manifest.json").read_text())
    mb = json.loads((outs[1] / "manifest.json").read_text())
    assert ma["inputs_hash"] == mb["inputs_hash"]
    assert ma["outputs"] == mb["outputs"]
    assert (outs[0] / "monitor_H1.csv").read_text().startswith("t,value\n0,")


def test_manifest_reexecutes_run(tmp_path):
    path = write_cfg(tmp_path, BASE)
    out = tmp_path / "run"
    cli.main(["simulate", "--config", path, "--out", str(out), "--seed", "7"])
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["seed"] == 7
    again = write_cfg(tmp_path, dict(manifest["config"], out=str(tmp_path / "again")), "again.json")
    cli.main(["simulate", "--config", again])
    for name in ("monitor_H2.csv", "snapshots/f_step0000010.csv"):
        assert (out / name).read_bytes() == (tmp_path / "again" / name).read_bytes()


def test_random_preset_uses_seed(tmp_path):
    path = write_cfg(tmp_path, dict(BASE, initial="random"))
    for seed, name in ((1, "a"), (1, "b"), (2, "c")):
        cli.main(["simulate", "--config", path, "--out", str(tmp_path / name), "--seed", str(seed)])
    snap = "snapshots/f_step0000000.csv"
    assert (tmp_path / "a" / snap).read_bytes() == (tmp_path / "b" / snap).read_bytes()
    assert (tmp_path / "a" / snap).read_bytes() != (tmp_path / "c" / snap).read_bytes()


def test_blow_up_exit_2(tmp_path):
    spec = {"f": {"seed": 1, "k_max": 2, "amplitude": 30, "mean": 1}, "v": {"seed": 2, "k_max": 2, "amplitude": 30}}
    path = write_cfg(tmp_path, {"n": 16, "dt": 0.1, "t_end": 1.0, "initial": spec})
    out = tmp_path / "out"
    assert cli.main(["simulate", "--config", path, "--out", str(out)]) == 2
    assert json.loads((out / "blowup.json").read_text())["threshold"] == 1e6


def test_lax_csv(tmp_path):
    path = write_cfg(tmp_path, dict(BASE, lambdas=[0.5, 2.0]))
    out = tmp_path / "lax"
    assert cli.main(["lax", "--config", path, "--out", str(out)]) == 0
    lines = (out / "lax_residual.csv").read_text().splitlines()
    assert lines[0] == "t,lambda,residual"
    assert len(lines) == 1 + 2 * 6
    assert max(float(line.split(",")[2]) for line in lines[1:]) <= 1e-9


def test_sweep_subdirectories(tmp_path):
    path = write_cfg(tmp_path, dict(BASE, sweep={"gamma": [[0, 0, 0], [0.1, 0, 0.2]], "n": [16, 32]}))
    out = tmp_path / "sweep"
    assert cli.main(["sweep", "--config", path, "--out", str(out)]) == 0
    subs = sorted(p.name for p in out.iterdir() if p.is_dir())
    assert subs == [f"point_{i:03d}" for i in range(4)]
    index = json.loads((out / "manifest.json").read_text())["points"]
    assert [p["n"] for p in index] == [16, 16, 32, 32]
    assert all((out / s / "manifest.json").exists() for s in subs)


def test_sweep_requires_axes(tmp_path):
    assert cli.main(["sweep", "--config", write_cfg(tmp_path, BASE), "--out", str(tmp_path / "s")]) == 1


def test_simulate_requires_config(tmp_path):
    assert cli.main(["simulate", "--out", str(tmp_path / "x")]) == 1


def test_verify_subset_writes_report(tmp_path):
    out = tmp_path / "verify"
    assert cli.main(["verify", "--criteria", "2", "4", "--out", str(out)]) == 0
    report = json.loads((out / "verify_report.json").read_text())
    assert report["passed"] is True
    assert report["summary"]["failed"] == 0
    assert {c["criterion"] for c in report["checks"]} == {2, 4}
    assert "numpy" in report["environment"]


def test_verify_failure_exit_3(tmp_path, monkeypatch):
    bad = VerifyReport([Check(1, "always-fails", 1.0, 0.0)], {}, {})
    monkeypatch.setattr(cli, "run_verification", lambda **kw: bad)
    assert cli.main(["verify", "--out", str(tmp_path / "v")]) == 3


def test_verify_rejects_unknown_criteria(tmp_path):
    assert cli.main(["verify", "--criteria", "11", "--out", str(tmp_path / "v")]) == 1


def test_check_semantics():
    assert Check(1, "x", 1e-11, 1e-10).passed
    assert not Check(1, "x", float("nan"), 1e-10).passed
    assert Check(1, "neg", 0.5, 1e-2, ">=").passed
    assert not Check(1, "neg", 1e-3, 1e-2, ">=").passed
