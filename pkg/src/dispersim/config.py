"""Experiment configuration: parsing and validation of JSON/TOML configs."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .model import OMEGA_Q_DEFAULT, PhysicalParams

EXPERIMENT_NAMES = (
    "fig1c",
    "fig1d",
    "fig2a",
    "fig2b",
    "fig2cd",
    "fig3a",
    "fig3c",
    "custom",
)

_TOP_LEVEL_KEYS = {"experiment", "params", "grid", "sweep", "optimize", "output"}
_PARAM_KEYS = {"d", "gamma", "v_g", "omega_q"}
_GRID_KEYS = {"n_points", "window", "t_max", "resolution"}
_SWEEP_KEYS = {
    "d_values", "L_values", "delta_d_values", "n_points", "log_lo", "log_hi",
    "d", "L", "dispersion",
}
_OPTIMIZE_KEYS = {"max_iters", "tol", "step_init", "smoothing_weight"}
_OUTPUT_KEYS = {"dir", "prefix"}


class ConfigError(ValueError):
    """Invalid or unparsable experiment configuration (usage error)."""


class ConfigDomainError(ConfigError):
    """Config parsed fine but requests physically invalid parameters."""


@dataclass(frozen=True)
class ExperimentSpec:
    """A fully validated experiment request."""

    name: str
    params: PhysicalParams
    grid: dict = field(default_factory=dict)
    sweep: dict = field(default_factory=dict)
    optimize: dict = field(default_factory=dict)
    output_dir: Path = Path(".")
    prefix: str = ""

    def __post_init__(self):
        if self.name not in EXPERIMENT_NAMES:
            raise ConfigError(
                f"unknown experiment {self.name!r}; known: {', '.join(EXPERIMENT_NAMES)}"
            )


def _check_keys(section: str, mapping: dict, allowed: set) -> None:
    for key in mapping:
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r} in section {section!r}")


def _load_raw(path: Path) -> dict:
    text = path.read_text()
    if path.suffix.lower() == ".toml":
        try:
            import tomllib
        except ModuleNotFoundError:  # Python < 3.11
            import tomli as tomllib

        try:
            return tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"cannot parse TOML config {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"cannot parse JSON config {path}: {exc}") from exc


def spec_from_dict(raw: dict, base_dir: Path | None = None) -> ExperimentSpec:
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a mapping")
    _check_keys("<root>", raw, _TOP_LEVEL_KEYS)
    if "experiment" not in raw:
        raise ConfigError("missing required key 'experiment'")
    name = raw["experiment"]

    params_raw = dict(raw.get("params", {}))
    _check_keys("params", params_raw, _PARAM_KEYS)
    defaults = {"d": 5.0, "gamma": 1.0, "v_g": 1.0, "omega_q": OMEGA_Q_DEFAULT}
    defaults.update(params_raw)
    try:
        params = PhysicalParams(**defaults)
    except ValueError as exc:
        raise ConfigDomainError(f"invalid params: {exc}") from exc

    grid = dict(raw.get("grid", {}))
    _check_keys("grid", grid, _GRID_KEYS)
    sweep = dict(raw.get("sweep", {}))
    _check_keys("sweep", sweep, _SWEEP_KEYS)
    optimize = dict(raw.get("optimize", {}))
    _check_keys("optimize", optimize, _OPTIMIZE_KEYS)
    output = dict(raw.get("output", {}))
    _check_keys("output", output, _OUTPUT_KEYS)

    out_dir = Path(output.get("dir", "."))
    if base_dir is not None and not out_dir.is_absolute():
        out_dir = base_dir / out_dir
    return ExperimentSpec(
        name=name,
        params=params,
        grid=grid,
        sweep=sweep,
        optimize=optimize,
        output_dir=out_dir,
        prefix=str(output.get("prefix", "")),
    )


def parse_config(path) -> ExperimentSpec:
    """Load and validate a JSON or TOML experiment config."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    return spec_from_dict(_load_raw(path), base_dir=path.parent)
