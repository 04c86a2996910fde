import json
from pathlib import Path

import numpy as np
import pytest

from mase.cli import main
from mase.evolution import SolverConfig, evolve
from mase.grid import Field, Grid, State
from mase.storage import (
    read_profile,
    read_trajectory,
    snapshot_filename,
    verify_manifest,
    write_profile,
    write_trajectory,
)
from mase.traveling_wave import solitary_profile


@pytest.fixture()
def scenario_file(tmp_path):
    doc = {
        "grid": {"n_points": 128, "length": 40.0},
        "initial": {"kind": "gaussian", "amplitude": 0.05, "width": 2.0},
        "solver": {"t_end": 1.0, "snapshot_interval": 0.25},
        "analysis": {"symmetry": True, "breaking": True, "weakform": True},
    }
    p = tmp_path / "scenario.json"
    p.write_text(json.dumps(doc))
    return p


# ---------------------------------------------------------------------------
# storage


def test_trajectory_round_trip(tmp_path):
    grid = Grid(64, 20.0)
    x = grid.points
    u0 = Field(grid, 0.05 * np.exp(-((x - 10.0) ** 2) / 4.0))
    traj = evolve(State(0.0, u0), SolverConfig(t_end=0.5, snapshot_interval=0.25))
    scenario = {"solver": {"t_end": 0.5, "snapshot_interval": 0.25}}
    write_trajectory(tmp_path, traj, scenario)
    assert verify_manifest(tmp_path)
    loaded, manifest = read_trajectory(tmp_path)
    assert loaded.termination == traj.termination
    assert len(loaded.snapshots) == len(traj.snapshots)
    for a, b in zip(loaded.snapshots, traj.snapshots):
        assert a.time == pytest.approx(b.time, abs=1e-12)
        # 12 significant digits in the CSV
        assert np.max(np.abs(a.u.values - b.u.values)) < 1e-11 * max(1.0, b.u.sup_norm())


def test_snapshot_filename_format():
    assert snapshot_filename(0.0) == "t=0.000000.csv"
    assert snapshot_filename(2.5) == "t=2.500000.csv"


def test_manifest_detects_tampering(tmp_path):
    grid = Grid(64, 20.0)
    traj = evolve(State(0.0, Field(grid, np.zeros(64))),
                  SolverConfig(t_end=0.5, snapshot_interval=0.25))
    write_trajectory(tmp_path, traj, {})
    target = tmp_path / "diagnostics.csv"
    target.write_text(target.read_text() + "tampered\n")
    assert not verify_manifest(tmp_path)


def test_profile_round_trip(tmp_path, solitary_c12):
    prefix = tmp_path / "profile_c=1.2"
    write_profile(prefix, solitary_c12, {"note": 1})
    loaded = read_profile(prefix)
    assert loaded.params == solitary_c12.params
    assert loaded.regularity == solitary_c12.regularity
    assert np.max(np.abs(loaded.values - solitary_c12.values)) < 1e-11


# ---------------------------------------------------------------------------
# CLI


def test_cli_simulate_and_symmetry(tmp_path, scenario_file, capsys):
    run_dir = tmp_path / "run"
    assert main(["simulate", "--config", str(scenario_file), "--out", str(run_dir)]) == 0
    assert verify_manifest(run_dir)
    for name in ("manifest.json", "diagnostics.csv", "symmetry.json",
                 "breaking.json", "residuals.json", "run.log"):
        assert (run_dir / name).exists()
    assert main(["symmetry", "--run", str(run_dir)]) == 0
    out = capsys.readouterr().out
    assert "verdict:" in out


def test_cli_invalid_config_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"grid": {"n_points": 4, "length": 40.0}, "solver": {"t_end": 1.0, "snapshot_interval": 0.5}}')
    code = main(["simulate", "--config", str(bad), "--out", str(tmp_path / "r")])
    assert code == 2
    err = capsys.readouterr().err
    assert err.startswith("error: config:")
    assert "\n" not in err.strip()


def test_cli_missing_config_exits_2(tmp_path, capsys):
    code = main(["simulate", "--config", str(tmp_path / "none.json"), "--out", str(tmp_path / "r")])
    assert code == 2


def test_cli_set_overrides_win(tmp_path, scenario_file):
    run_dir = tmp_path / "run_o"
    assert main(["simulate", "--config", str(scenario_file), "--out", str(run_dir),
                 "--set", "solver.t_end=0.5", "--set", "analysis.weakform=false"]) == 0
    manifest = json.loads((run_dir / "manifest.json").read_text())
    assert manifest["scenario"]["solver"]["t_end"] == 0.5
    assert not (run_dir / "residuals.json").exists()


def test_cli_tw_solitary(tmp_path, capsys):
    out = tmp_path / "tw"
    assert main(["tw", "--speed", "1.2", "--out", str(out)]) == 0
    prefix = out / "profile_c=1.2"
    assert (out / "profile_c=1.2.csv").exists()
    loaded = read_profile(prefix)
    assert loaded.regularity.value == "smooth_solitary"
    sidecar = json.loads((out / "profile_c=1.2.json").read_text())
    assert sidecar["max_steady_residual"] < 1e-4
    assert "turning_points" in sidecar and "singular_line" in sidecar


def test_cli_tw_nonexistence_exits_3(tmp_path, capsys):
    code = main(["tw", "--speed", "0.5", "--out", str(tmp_path / "tw")])
    assert code == 3
    assert capsys.readouterr().err.startswith("error: nonexistence:")


def test_cli_symmetry_constant_run_exits_4(tmp_path, capsys):
    doc = {
        "grid": {"n_points": 64, "length": 20.0},
        "initial": {"kind": "zero"},
        "solver": {"t_end": 1.0, "snapshot_interval": 0.25},
    }
    cfg = tmp_path / "zero.json"
    cfg.write_text(json.dumps(doc))
    run_dir = tmp_path / "zrun"
    assert main(["simulate", "--config", str(cfg), "--out", str(run_dir)]) == 0
    from mase.storage import read_columns_csv

    manifest = json.loads((run_dir / "manifest.json").read_text())
    assert manifest["termination"] == "completed"
    snap = read_columns_csv(run_dir / "t=1.000000.csv")
    assert np.all(snap["u"] == 0.0)
    code = main(["symmetry", "--run", str(run_dir)])
    assert code == 4
    assert capsys.readouterr().err.startswith("error: degenerate:")


def test_cli_weakform_on_run_and_profile(tmp_path, scenario_file):
    run_dir = tmp_path / "run_w"
    main(["simulate", "--config", str(scenario_file), "--out", str(run_dir),
          "--set", "solver.snapshot_interval=0.05", "--set", "analysis.weakform=false"])
    assert main(["weakform", "--run", str(run_dir), "--seed", "3"]) == 0
    assert (run_dir / "residuals.json").exists()

    tw_dir = tmp_path / "tw_w"
    main(["tw", "--speed", "1.2", "--out", str(tw_dir)])
    out = tmp_path / "steady.json"
    assert main(["weakform", "--profile", str(tw_dir / "profile_c=1.2"),
                 "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert all(abs(e["residual"]) < 1e-4 for e in doc["per_test_function"])


def test_cli_tw_profile_run_keeps_amplitude(tmp_path):
    doc = {
        "grid": {"n_points": 512, "length": 130.0},
        "initial": {"kind": "tw_profile", "speed": 1.2},
        "solver": {"t_end": 5.0, "snapshot_interval": 0.5},
    }
    cfg = tmp_path / "tw_run.json"
    cfg.write_text(json.dumps(doc))
    run_dir = tmp_path / "tw_run"
    assert main(["simulate", "--config", str(cfg), "--out", str(run_dir)]) == 0
    from mase.storage import read_columns_csv

    diag = read_columns_csv(run_dir / "diagnostics.csv")
    sup = diag["sup_norm"]
    assert np.max(np.abs(sup - sup[0])) / sup[0] < 1e-3
    assert main(["symmetry", "--run", str(run_dir)]) == 0
    verdict = json.loads((run_dir / "symmetry.json").read_text())
    assert verdict["verdict"] == "traveling_wave_consistent"
    assert abs(verdict["speed_estimate"] - 1.2) < 1e-3


def test_cli_out_root_env(tmp_path, scenario_file, monkeypatch):
    monkeypatch.setenv("MASE_OUT_ROOT", str(tmp_path / "root"))
    assert main(["simulate", "--config", str(scenario_file)]) == 0
    assert (tmp_path / "root" / "run" / "manifest.json").exists()


def test_cli_breaking_scenario_exits_0(tmp_path):
    doc = {
        "grid": {"n_points": 512, "length": 300.0},
        "initial": {"kind": "mode", "amplitude": 0.25, "wavenumber": 1},
        "solver": {"t_end": 40.0, "snapshot_interval": 1.0,
                   "breaking_slope_threshold": 0.055},
        "analysis": {"breaking": True},
    }
    cfg = tmp_path / "breaking.json"
    cfg.write_text(json.dumps(doc))
    run_dir = tmp_path / "brun"
    assert main(["simulate", "--config", str(cfg), "--out", str(run_dir)]) == 0
    manifest = json.loads((run_dir / "manifest.json").read_text())
    assert manifest["termination"] == "breaking_detected"
    breaking = json.loads((run_dir / "breaking.json").read_text())
    assert breaking["detected"] is True


# ---------------------------------------------------------------------------
# sweep


def _sweep_config(tmp_path):
    doc = {
        "command": "simulate",
        "base": {
            "grid": {"n_points": 128, "length": 40.0},
            "initial": {"kind": "gaussian", "amplitude": 0.05, "width": 2.0},
            "solver": {"t_end": 0.5, "snapshot_interval": 0.25},
            "analysis": {},
        },
        "sweep": {"initial.amplitude": [0.02, 0.05, 0.08]},
    }
    p = tmp_path / "sweep.json"
    p.write_text(json.dumps(doc))
    return p


def _tree_digest(root: Path, skip=("run.log",)) -> dict:
    from mase.storage import sha256_file

    out = {}
    for p in sorted(root.rglob("*")):
        if p.is_file() and p.name not in skip:
            out[str(p.relative_to(root))] = sha256_file(p)
    return out


def test_sweep_single_point_matches_simulate(tmp_path):
    doc = {
        "command": "simulate",
        "base": json.loads((_sweep_config(tmp_path)).read_text())["base"],
        "sweep": {"initial.amplitude": [0.05]},
    }
    cfg = tmp_path / "one.json"
    cfg.write_text(json.dumps(doc))
    sweep_dir = tmp_path / "sweep_one"
    assert main(["sweep", "--config", str(cfg), "--out", str(sweep_dir)]) == 0

    plain = tmp_path / "plain"
    sc = tmp_path / "plain.json"
    sc.write_text(json.dumps(doc["base"]))
    assert main(["simulate", "--config", str(sc), "--out", str(plain)]) == 0

    assert _tree_digest(sweep_dir / "point_0000") == _tree_digest(plain)


def test_sweep_deterministic_across_workers(tmp_path):
    cfg = _sweep_config(tmp_path)
    d1 = tmp_path / "s1"
    d4 = tmp_path / "s4"
    assert main(["sweep", "--config", str(cfg), "--out", str(d1), "--workers", "1"]) == 0
    assert main(["sweep", "--config", str(cfg), "--out", str(d4), "--workers", "4"]) == 0
    assert _tree_digest(d1) == _tree_digest(d4)


def test_sweep_tw_existence_table(tmp_path):
    doc = {
        "command": "tw",
        "base": {"speed": 1.2, "wave": "auto"},
        "sweep": {"speed": [0.5, 1.2]},
    }
    cfg = tmp_path / "twsweep.json"
    cfg.write_text(json.dumps(doc))
    sweep_dir = tmp_path / "tws"
    assert main(["sweep", "--config", str(cfg), "--out", str(sweep_dir)]) == 0
    table = (sweep_dir / "aggregate.csv").read_text().splitlines()
    assert table[0].startswith("point,speed,status")
    rows = {ln.split(",")[1]: ln for ln in table[1:]}
    assert "error" in rows["0.5"]
    assert "smooth_solitary" in rows["1.2"]


def test_sweep_rejects_bad_config(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"command": "simulate", "base": {}, "sweep": {}}))
    assert main(["sweep", "--config", str(cfg), "--out", str(tmp_path / "x")]) == 2


def test_cli_simulate_degenerate_analysis_still_exits_0(tmp_path):
    # a constant run with symmetry analysis on completes; the report records
    # the degeneracy instead of failing the run
    doc = {
        "grid": {"n_points": 64, "length": 20.0},
        "initial": {"kind": "zero"},
        "solver": {"t_end": 1.0, "snapshot_interval": 0.25},
        "analysis": {"symmetry": True},
    }
    cfg = tmp_path / "zero_sym.json"
    cfg.write_text(json.dumps(doc))
    run_dir = tmp_path / "zsym"
    assert main(["simulate", "--config", str(cfg), "--out", str(run_dir)]) == 0
    rep = json.loads((run_dir / "symmetry.json").read_text())
    assert "error" in rep


def test_cli_simulate_dt_underflow_exits_0(tmp_path):
    doc = {
        "grid": {"n_points": 64, "length": 20.0},
        "initial": {"kind": "gaussian", "amplitude": 0.05, "width": 2.0},
        "solver": {"t_end": 1.0, "snapshot_interval": 0.25,
                   "dt_min": 0.5, "dt_max": 1.0},
        "analysis": {"symmetry": True, "weakform": True},
    }
    cfg = tmp_path / "underflow.json"
    cfg.write_text(json.dumps(doc))
    run_dir = tmp_path / "uf"
    assert main(["simulate", "--config", str(cfg), "--out", str(run_dir)]) == 0
    manifest = json.loads((run_dir / "manifest.json").read_text())
    assert manifest["termination"] == "dt_underflow"
