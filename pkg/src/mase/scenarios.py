"""Scenario configuration: grid, initial condition, solver, analysis toggles.

A scenario is a plain JSON document; command-line ``--set key=value``
overrides win over the file.  Initial-condition kinds: zero, gaussian
(amplitude, center, width), mode (amplitude, wavenumber), tw_profile (speed),
file (path to an x,u CSV).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .evolution import SolverConfig
from .grid import Field, Grid
from .traveling_wave import profile_to_field, solitary_profile

_IC_KINDS = ("zero", "gaussian", "mode", "tw_profile", "file")


@dataclass(frozen=True)
class Scenario:
    grid: Grid
    initial: dict
    solver: SolverConfig
    analysis: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "grid": {"n_points": self.grid.n_points, "length": self.grid.length},
            "initial": dict(self.initial),
            "solver": {
                "t_end": self.solver.t_end,
                "snapshot_interval": self.solver.snapshot_interval,
                "cfl": self.solver.cfl,
                "dt_max": self.solver.dt_max,
                "dt_min": self.solver.dt_min,
                "breaking_slope_threshold": self.solver.breaking_slope_threshold,
            },
            "analysis": dict(self.analysis),
        }


def scenario_from_dict(doc: dict) -> Scenario:
    try:
        grid = Grid(int(doc["grid"]["n_points"]), float(doc["grid"]["length"]))
        initial = dict(doc.get("initial", {"kind": "zero"}))
        solver = SolverConfig(**doc["solver"])
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError(f"invalid scenario: {exc}") from exc
    kind = initial.get("kind")
    if kind not in _IC_KINDS:
        raise ConfigError(f"unknown initial condition kind {kind!r}; choose from {_IC_KINDS}")
    if kind == "file":
        path = Path(initial.get("path", ""))
        if not path.exists():
            raise ConfigError(f"initial condition file does not exist: {path}")
    analysis = dict(doc.get("analysis", {}))
    sc = Scenario(grid, initial, solver, analysis)
    build_initial_field(sc)  # validate parameters eagerly
    return sc


def load_scenario(path: Path, overrides: list[str] | None = None) -> Scenario:
    try:
        doc = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}")
    if overrides:
        doc = apply_overrides(doc, overrides)
    return scenario_from_dict(doc)


def apply_overrides(doc: dict, overrides: list[str]) -> dict:
    out = json.loads(json.dumps(doc))
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override must look like key.path=value, got {item!r}")
        key, raw = item.split("=", 1)
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        node = out
        parts = key.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError(f"override path {key!r} crosses a non-object")
        node[parts[-1]] = value
    return out


def _periodic_gaussian(grid: Grid, amplitude: float, center: float, width: float) -> np.ndarray:
    d = np.mod(grid.points - center + grid.length / 2, grid.length) - grid.length / 2
    return amplitude * np.exp(-(d * d) / (2.0 * width * width))


def build_initial_field(scenario: Scenario) -> Field:
    grid = scenario.grid
    ic = scenario.initial
    kind = ic["kind"]
    if kind == "zero":
        return Field(grid, np.zeros(grid.n_points))
    if kind == "gaussian":
        try:
            amplitude = float(ic["amplitude"])
            width = float(ic["width"])
            center = float(ic.get("center", grid.length / 2))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"gaussian initial condition needs amplitude and width: {exc}")
        if not 0 < width < grid.length:
            raise ConfigError(f"gaussian width {width} must lie in (0, length)")
        if not 0 <= center <= grid.length:
            raise ConfigError(f"gaussian center {center} outside the domain")
        return Field(grid, _periodic_gaussian(grid, amplitude, center, width))
    if kind == "mode":
        try:
            amplitude = float(ic["amplitude"])
            m = int(ic["wavenumber"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"mode initial condition needs amplitude and wavenumber: {exc}")
        if not 1 <= m < grid.n_points // 3:
            raise ConfigError(f"wavenumber {m} outside the resolved band [1, {grid.n_points // 3})")
        k = 2.0 * np.pi * m / grid.length
        return Field(grid, amplitude * np.sin(k * grid.points))
    if kind == "tw_profile":
        try:
            speed = float(ic["speed"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"tw_profile initial condition needs a speed: {exc}")
        profile = solitary_profile(speed)
        return profile_to_field(profile, grid, center=float(ic.get("center", grid.length / 2)))
    if kind == "file":
        from .storage import read_columns_csv

        cols = read_columns_csv(Path(ic["path"]))
        if len(cols["u"]) != grid.n_points:
            raise ConfigError(
                f"file initial condition has {len(cols['u'])} samples, grid wants {grid.n_points}"
            )
        return Field(grid, cols["u"])
    raise ConfigError(f"unknown initial condition kind {kind!r}")
