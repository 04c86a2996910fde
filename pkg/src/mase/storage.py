"""Run-directory serialization: CSV snapshots, JSON manifests, digests.

All numeric CSV output carries 12 significant digits; JSON is pretty-printed
with sorted keys.  Every file a command writes is listed in manifest.json
with its sha256 digest.  Volatile metadata (wall clock, tool invocation) goes
to run.log, a plain-text file outside the manifest, so repeated runs produce
byte-identical CSV/JSON.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigError
from .evolution import SolverConfig, Termination, Trajectory
from .grid import Field, Grid, State
from .symmetry import SymmetryReport
from .traveling_wave import Regularity, TWParams, TWProfile
from .weakform import ResidualReport

FMT = "%.12g"


@dataclass(frozen=True)
class RunManifest:
    scenario: dict
    tool_version: str
    wall_clock_seconds: float
    termination: str
    outputs: tuple[tuple[str, str], ...]  # (relative path, sha256)


def fmt(x: float) -> str:
    return FMT % float(x)


def sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    h.update(path.read_bytes())
    return h.hexdigest()


def write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def write_columns_csv(path: Path, header: list[str], columns: list[np.ndarray]) -> None:
    rows = zip(*columns)
    lines = [",".join(header)]
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n")


def read_columns_csv(path: Path) -> dict[str, np.ndarray]:
    lines = path.read_text().strip().splitlines()
    names = lines[0].split(",")
    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    return {name: data[:, i] for i, name in enumerate(names)}


def snapshot_filename(time: float) -> str:
    return f"t={time:.6f}.csv"


# ---------------------------------------------------------------------------
# trajectories


def write_trajectory(
    run_dir: Path,
    traj: Trajectory,
    scenario: dict,
    wall_clock: float = 0.0,
    extra_outputs: list[Path] | None = None,
) -> RunManifest:
    run_dir.mkdir(parents=True, exist_ok=True)
    outputs: list[Path] = list(extra_outputs or [])
    x = traj.grid.points
    for s in traj.snapshots:
        p = run_dir / snapshot_filename(s.time)
        write_columns_csv(p, ["x", "u"], [x, s.u.values])
        outputs.append(p)

    from .evolution import _max_slope

    diag = run_dir / "diagnostics.csv"
    times = traj.times()
    means = np.array([s.u.mean() for s in traj.snapshots])
    sups = np.array([s.u.sup_norm() for s in traj.snapshots])
    slopes = np.array([_max_slope(s.u.values, traj.grid) for s in traj.snapshots])
    write_columns_csv(diag, ["t", "mean", "sup_norm", "max_slope"],
                      [times, means, sups, slopes])
    outputs.append(diag)

    manifest = RunManifest(
        scenario=scenario,
        tool_version=__version__,
        wall_clock_seconds=wall_clock,
        termination=traj.termination.value,
        outputs=tuple(
            (p.name, sha256_file(p)) for p in sorted(outputs, key=lambda q: q.name)
        ),
    )
    write_json(run_dir / "manifest.json", {
        "schema": "mase/run/v1",
        "scenario": manifest.scenario,
        "tool_version": manifest.tool_version,
        "termination": manifest.termination,
        "outputs": [{"path": p, "sha256": d} for p, d in manifest.outputs],
    })
    (run_dir / "run.log").write_text(
        f"tool_version={__version__}\nwall_clock_seconds={wall_clock:.3f}\n"
    )
    return manifest


def read_trajectory(run_dir: Path) -> tuple[Trajectory, dict]:
    mpath = run_dir / "manifest.json"
    if not mpath.exists():
        raise ConfigError(f"no manifest.json in {run_dir}")
    manifest = json.loads(mpath.read_text())
    scenario = manifest["scenario"]
    solver = scenario["solver"]
    config = SolverConfig(**solver)
    snaps = []
    for entry in manifest["outputs"]:
        name = entry["path"]
        if not name.startswith("t=") or not name.endswith(".csv"):
            continue
        t = float(name[2:-4])
        cols = read_columns_csv(run_dir / name)
        n = len(cols["x"])
        if n < 2:
            raise ConfigError(f"snapshot {name} too short")
        length = float(cols["x"][-1] + (cols["x"][1] - cols["x"][0]))
        grid = Grid(n, length)
        snaps.append(State(t, Field(grid, cols["u"])))
    snaps.sort(key=lambda s: s.time)
    traj = Trajectory(tuple(snaps), config, Termination(manifest["termination"]))
    return traj, manifest


def verify_manifest(run_dir: Path) -> bool:
    manifest = json.loads((run_dir / "manifest.json").read_text())
    for entry in manifest["outputs"]:
        p = run_dir / entry["path"]
        if not p.exists() or sha256_file(p) != entry["sha256"]:
            return False
    return True


# ---------------------------------------------------------------------------
# profiles and reports


def write_profile(prefix: Path, profile: TWProfile, extras: dict | None = None) -> list[Path]:
    csv_path = Path(str(prefix) + ".csv")
    json_path = Path(str(prefix) + ".json")
    write_columns_csv(csv_path, ["xi", "U"], [profile.xi, profile.values])
    sidecar = {
        "speed": profile.params.speed,
        "integration_constant": profile.params.integration_constant,
        "energy": profile.params.energy,
        "regularity": profile.regularity.value,
        "period": profile.period,
    }
    if extras:
        sidecar.update(extras)
    write_json(json_path, sidecar)
    return [csv_path, json_path]


def read_profile(prefix: Path) -> TWProfile:
    cols = read_columns_csv(Path(str(prefix) + ".csv"))
    sidecar = json.loads(Path(str(prefix) + ".json").read_text())
    params = TWParams(
        sidecar["speed"], sidecar["integration_constant"], sidecar["energy"]
    )
    return TWProfile(
        params=params,
        xi=cols["xi"],
        values=cols["U"],
        regularity=Regularity(sidecar["regularity"]),
        period=sidecar.get("period"),
    )


def symmetry_report_dict(report: SymmetryReport) -> dict:
    s = report.axis_series
    return {
        "times": [float(t) for t in s.times],
        "axes": [float(a) for a in s.axes],
        "asymmetry": [float(a) for a in s.asymmetry],
        "lambda_dot": report.lambda_dot,
        "speed_estimate": report.speed_estimate,
        "fit_residual": report.fit_residual,
        "travel_error": report.travel_error,
        "verdict": report.verdict.value,
    }


def residual_report_dict(report: ResidualReport) -> dict:
    return {
        "normalization": report.normalization,
        "per_test_function": [
            {"test_function": desc, "residual": res}
            for desc, res in report.per_test_function
        ],
    }
