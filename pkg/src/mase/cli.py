"""Command-line entry point.

Subcommands: simulate, tw, symmetry, weakform, sweep.  Scenario files are
JSON; ``--set key.path=value`` overrides win over the file.  Science
outcomes (including detected wave breaking) exit 0; configuration faults
exit 2, nonexistent traveling waves exit 3, degenerate symmetry inputs
exit 4, each with a one-line ``error: <kind>: <message>`` on stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from itertools import product
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigError, ConstantFieldError, MaseError, NonexistenceError
from .evolution import detect_breaking, evolve
from .grid import State
from .scenarios import Scenario, apply_overrides, build_initial_field, load_scenario, scenario_from_dict
from .storage import (
    read_trajectory,
    residual_report_dict,
    symmetry_report_dict,
    write_json,
    write_profile,
    write_trajectory,
)
from .symmetry import verify_theorem
from .traveling_wave import (
    Regularity,
    TWParams,
    level_tangencies,
    peaked_composite,
    periodic_profile,
    singular_line,
    solitary_profile,
    turning_points,
)
from .weakform import ResidualReport, TestFunction, random_bumps, steady_residual_report, unsteady_weak_residual


def _out_root() -> Path:
    return Path(os.environ.get("MASE_OUT_ROOT", "."))


def _resolve_out(out: str | None, default_name: str) -> Path:
    return Path(out) if out else _out_root() / default_name


# ---------------------------------------------------------------------------
# simulate


def run_simulate(scenario: Scenario, run_dir: Path, seed: int = 0) -> dict:
    """Evolve a scenario and write the full run directory; returns headline stats."""
    t_start = time.perf_counter()
    u0 = build_initial_field(scenario)
    traj = evolve(State(0.0, u0), scenario.solver)

    run_dir.mkdir(parents=True, exist_ok=True)
    extra: list[Path] = []
    analysis = scenario.analysis
    if analysis.get("breaking", False):
        rep = detect_breaking(traj)
        p = run_dir / "breaking.json"
        write_json(p, {
            "detected": rep.detected,
            "t_detect": rep.t_detect if rep.detected else None,
            "max_slope_history": [[t, v] for t, v in rep.max_slope_history],
            "sup_norm_history": [[t, v] for t, v in rep.sup_norm_history],
        })
        extra.append(p)
    if analysis.get("symmetry", False):
        p = run_dir / "symmetry.json"
        try:
            rep = verify_theorem(
                traj,
                symmetry_tol=float(analysis.get("symmetry_tol", 1e-6)),
                travel_tol=float(analysis.get("travel_tol", 1e-3)),
            )
            write_json(p, symmetry_report_dict(rep))
        except (ConstantFieldError, ValueError) as exc:
            # degenerate or truncated runs still complete; the dedicated
            # symmetry command surfaces the error as an exit code
            write_json(p, {"error": str(exc)})
        extra.append(p)
    if analysis.get("weakform", False) and len(traj.snapshots) >= 4:
        p = run_dir / "residuals.json"
        write_json(p, residual_report_dict(_unsteady_report(traj, seed)))
        extra.append(p)

    wall = time.perf_counter() - t_start
    write_trajectory(run_dir, traj, scenario.to_dict(), wall, extra)

    final = traj.snapshots[-1]
    from .evolution import _max_slope

    return {
        "termination": traj.termination.value,
        "t_final": final.time,
        "sup_final": final.u.sup_norm(),
        "max_slope_final": _max_slope(final.u.values, traj.grid),
        "mean_drift": abs(final.u.mean() - traj.snapshots[0].u.mean()),
    }


def _unsteady_report(traj, seed: int, n_bumps: int = 5) -> ResidualReport:
    rng = np.random.default_rng(seed)
    grid = traj.grid
    times = traj.times()
    margin = grid.length / 16.0
    bumps = random_bumps(rng, n_bumps, (margin, grid.length - margin),
                         (grid.length / 16.0, grid.length / 10.0))
    t_lo, t_hi = times[1], times[-2]
    rho = TestFunction(0.5 * (t_lo + t_hi), 0.45 * (t_hi - t_lo))
    entries = []
    for phi in bumps:
        res = unsteady_weak_residual(traj, phi, rho)
        desc = {"phi": phi.descriptor(), "rho": rho.descriptor()}
        entries.append((desc, res))
    mean_mass = float(np.mean([phi.mass() * rho.mass() for phi in bumps]))
    return ResidualReport(tuple(entries), mean_mass)


def cmd_simulate(args) -> int:
    scenario = load_scenario(args.config, args.set)
    run_dir = _resolve_out(args.out, "run")
    stats = run_simulate(scenario, run_dir, args.seed)
    print(f"run written to {run_dir} (termination: {stats['termination']})")
    return 0


# ---------------------------------------------------------------------------
# tw


def run_tw(doc: dict, out_prefix: Path, seed: int = 0) -> dict:
    """Construct the requested traveling wave and write CSV + JSON sidecar."""
    speed = float(doc["speed"])
    a = float(doc.get("integration_constant", 0.0))
    e = float(doc.get("energy", 0.0))
    wave = doc.get("wave", "auto")
    if wave == "auto":
        wave = "solitary" if (a == 0.0 and e == 0.0) else "periodic"
    if wave == "solitary":
        profile = solitary_profile(speed)
    elif wave == "periodic":
        profile = periodic_profile(TWParams(speed, a, e))
    elif wave == "peaked":
        profile = peaked_composite(speed, a)
    else:
        raise ConfigError(f"unknown wave kind {wave!r}")

    params = profile.params
    rng = np.random.default_rng(seed)
    span = profile.xi[-1] - profile.xi[0]
    width_hi = min(span / 6.0, 64 * (profile.xi[1] - profile.xi[0]) * 8)
    width_lo = max(span / 24.0, 33 * (profile.xi[1] - profile.xi[0]))
    bumps = random_bumps(rng, 5, (profile.xi[0], profile.xi[-1]),
                         (width_lo, max(width_lo * 1.01, width_hi)))
    report = steady_residual_report(profile, bumps)

    extras = {
        "turning_points": turning_points(params),
        "tangencies": level_tangencies(params),
        "singular_line": singular_line(params),
        "max_steady_residual": report.max_residual(),
    }
    out_prefix.parent.mkdir(parents=True, exist_ok=True)
    write_profile(out_prefix, profile, extras)
    write_json(out_prefix.parent / (out_prefix.name + "_residuals.json"),
               residual_report_dict(report))
    return {
        "regularity": profile.regularity.value,
        "period": profile.period,
        "singular_line": extras["singular_line"],
        "max_residual": extras["max_steady_residual"],
    }


def cmd_tw(args) -> int:
    doc = {
        "speed": args.speed,
        "integration_constant": args.integration_constant,
        "energy": args.energy,
        "wave": args.wave,
    }
    out_prefix = _resolve_out(args.out, "tw") / f"profile_c={args.speed:g}"
    info = run_tw(doc, out_prefix, args.seed)
    period = "-" if info["period"] is None else f"{info['period']:.6g}"
    print(
        f"profile written to {out_prefix}.csv ({info['regularity']}, period {period}, "
        f"max steady residual {info['max_residual']:.3e})"
    )
    return 0


# ---------------------------------------------------------------------------
# symmetry / weakform


def cmd_symmetry(args) -> int:
    traj, _ = read_trajectory(Path(args.run))
    if len(traj.snapshots) < 3:
        raise ConfigError("run has fewer than 3 snapshots")
    rep = verify_theorem(traj, symmetry_tol=args.symmetry_tol, travel_tol=args.travel_tol)
    out = Path(args.out) if args.out else Path(args.run) / "symmetry.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    write_json(out, symmetry_report_dict(rep))
    print(
        f"verdict: {rep.verdict.value} (speed estimate {rep.speed_estimate:.6g}, "
        f"travel error {rep.travel_error:.3e})"
    )
    return 0


def cmd_weakform(args) -> int:
    if bool(args.run) == bool(args.profile):
        raise ConfigError("give exactly one of --run or --profile")
    if args.run:
        traj, _ = read_trajectory(Path(args.run))
        report = _unsteady_report(traj, args.seed, args.n_bumps)
        out = Path(args.out) if args.out else Path(args.run) / "residuals.json"
    else:
        from .storage import read_profile

        profile = read_profile(Path(args.profile))
        rng = np.random.default_rng(args.seed)
        span = profile.xi[-1] - profile.xi[0]
        bumps = random_bumps(rng, args.n_bumps, (profile.xi[0], profile.xi[-1]),
                             (span / 24.0, span / 6.0))
        report = steady_residual_report(profile, bumps)
        out = Path(args.out) if args.out else Path(args.profile).parent / "residuals.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    write_json(out, residual_report_dict(report))
    print(f"max residual {report.max_residual():.3e} over {len(report.per_test_function)} test functions")
    return 0


# ---------------------------------------------------------------------------
# sweep


def _sweep_point(task) -> tuple[int, dict]:
    index, command, doc, out_dir, seed = task
    try:
        if command == "simulate":
            stats = run_simulate(scenario_from_dict(doc), Path(out_dir), seed)
        elif command == "tw":
            stats = run_tw(doc, Path(out_dir) / "profile", seed)
        else:
            raise ConfigError(f"unknown sweep command {command!r}")
        stats["status"] = "ok"
    except MaseError as exc:
        stats = {"status": "error", "error": str(exc).replace(",", ";").replace("\n", " ")}
    return index, stats


def cmd_sweep(args) -> int:
    try:
        doc = json.loads(Path(args.config).read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {args.config}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}")
    if args.set:
        doc = apply_overrides(doc, args.set)
    command = doc.get("command", "simulate")
    base = doc.get("base")
    sweep = doc.get("sweep")
    if not isinstance(base, dict) or not isinstance(sweep, dict) or not sweep:
        raise ConfigError("sweep config needs 'base' (object) and non-empty 'sweep' (object)")
    for key, values in sweep.items():
        if not isinstance(values, list) or not values:
            raise ConfigError(f"sweep values for {key!r} must be a non-empty list")
        if not all(np.isfinite(v) for v in values if isinstance(v, (int, float))):
            raise ConfigError(f"sweep values for {key!r} must be finite")

    keys = sorted(sweep.keys())
    combos = list(product(*(sweep[k] for k in keys)))
    sweep_dir = _resolve_out(args.out, "sweep")
    sweep_dir.mkdir(parents=True, exist_ok=True)

    tasks = []
    for i, combo in enumerate(combos):
        point_doc = apply_overrides(base, [f"{k}={json.dumps(v)}" for k, v in zip(keys, combo)])
        point_dir = sweep_dir / f"point_{i:04d}"
        tasks.append((i, command, point_doc, str(point_dir), args.seed))

    results: dict[int, dict] = {}
    if args.workers <= 1:
        for task in tasks:
            i, stats = _sweep_point(task)
            results[i] = stats
    else:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            for i, stats in pool.map(_sweep_point, tasks):
                results[i] = stats

    if command == "simulate":
        stat_cols = ["termination", "t_final", "sup_final", "max_slope_final", "mean_drift"]
    else:
        stat_cols = ["regularity", "period", "singular_line", "max_residual"]
    header = ["point"] + keys + ["status"] + stat_cols + ["error"]
    lines = [",".join(header)]
    for i, combo in enumerate(combos):
        stats = results[i]
        row = [f"point_{i:04d}"] + [json.dumps(v) for v in combo] + [stats.get("status", "error")]
        for col in stat_cols:
            v = stats.get(col)
            if isinstance(v, float):
                row.append("%.12g" % v)
            elif v is None:
                row.append("")
            else:
                row.append(str(v))
        row.append(stats.get("error", ""))
        lines.append(",".join(row))
    (sweep_dir / "aggregate.csv").write_text("\n".join(lines) + "\n")
    n_err = sum(1 for s in results.values() if s.get("status") != "ok")
    print(f"sweep of {len(combos)} points written to {sweep_dir} ({n_err} failures)")
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mase",
        description="Numerical laboratory for a moderate-amplitude shallow-water wave equation",
    )
    parser.add_argument("--version", action="version", version=f"mase {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_config=False):
        p.add_argument("--config", required=needs_config, help="scenario JSON file")
        p.add_argument("--out", default=None, help="output directory (default under MASE_OUT_ROOT)")
        p.add_argument("--seed", type=int, default=0, help="seed for randomized test-function families")
        p.add_argument("--workers", type=int, default=1, help="worker count for sweeps")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override a config entry (repeatable; flags win)")

    p = sub.add_parser("simulate", help="evolve a scenario and write a run directory")
    common(p, needs_config=True)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("tw", help="construct a traveling-wave profile")
    common(p)
    p.add_argument("--speed", "-c", type=float, required=True, help="wave speed c")
    p.add_argument("--integration-constant", "-A", type=float, default=0.0)
    p.add_argument("--energy", "-E", type=float, default=0.0)
    p.add_argument("--wave", choices=["auto", "solitary", "periodic", "peaked"], default="auto")
    p.set_defaults(fn=cmd_tw)

    p = sub.add_parser("symmetry", help="axis tracking and theorem verdict for a run")
    common(p)
    p.add_argument("--run", required=True, help="run directory from simulate")
    p.add_argument("--symmetry-tol", type=float, default=1e-6)
    p.add_argument("--travel-tol", type=float, default=1e-3)
    p.set_defaults(fn=cmd_symmetry)

    p = sub.add_parser("weakform", help="weak-form residuals for a run or a profile")
    common(p)
    p.add_argument("--run", default=None, help="run directory (unsteady residual)")
    p.add_argument("--profile", default=None, help="profile prefix (steady residual)")
    p.add_argument("--n-bumps", type=int, default=5)
    p.set_defaults(fn=cmd_weakform)

    p = sub.add_parser("sweep", help="run a parameter sweep of simulate or tw")
    common(p, needs_config=True)
    p.set_defaults(fn=cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"error: config: {exc}", file=sys.stderr)
        return 2
    except NonexistenceError as exc:
        print(f"error: nonexistence: {exc}", file=sys.stderr)
        return 3
    except ConstantFieldError as exc:
        print(f"error: degenerate: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
