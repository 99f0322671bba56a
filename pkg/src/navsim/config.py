"""Scenario configuration loading.

User files are JSON documents merged over ``runtime_assets/default_config.json``.
Every key a user file sets must exist in the defaults; ``plant_perturbation``
and keys whose default is ``null`` accept any value and are validated when the
scenario is built.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from controller import MpcConfig, Trajectory
from estimator import EkfConfig
from geodesy import GeodeticCoord
from harness import Scenario, TrajectorySpec, build_trajectory
from sensors import GpsNoiseParams, MagnetometerParams
from utils import get_logger
from vehicle import ControlInput, VehicleParams

from .navsim_error import ConfigError, DynamicsError, LogFormatError, TrajectoryError

logger = get_logger(__name__)

SCHEMA_VERSION = 1
RUNTIME_ASSETS = Path(__file__).resolve().parent / "runtime_assets"
DEFAULT_CONFIG_PATH = RUNTIME_ASSETS / "default_config.json"
SCENARIO_PRESETS = RUNTIME_ASSETS / "scenarios"

# Sections whose contents are free-form at merge time.
_OPEN_SECTIONS = frozenset({"scenario.plant_perturbation"})


@dataclass(frozen=True)
class BatchSettings:
    """Replicate settings for ``navsim batch``.

    Attributes:
        runs:         Number of replicates.
        seed_stride:  Seed increment between replicates.
        max_workers:  Replicates simulated concurrently.
    """

    runs: int = 10
    seed_stride: int = 1
    max_workers: int = 4

    def __post_init__(self) -> None:
        if self.runs < 1:
            raise ConfigError(f"batch.runs must be >= 1, got {self.runs}")
        if self.seed_stride < 1:
            raise ConfigError(f"batch.seed_stride must be >= 1, got {self.seed_stride}")
        if self.max_workers < 1:
            raise ConfigError(f"batch.max_workers must be >= 1, got {self.max_workers}")


@dataclass(frozen=True)
class ConfigOverrides:
    """Command-line values that shadow the config file."""

    seed: int | None = None
    duration: float | None = None
    gps_rate: float | None = None
    output_dir: Path | None = None


@dataclass(frozen=True)
class NavSimConfig:
    """A validated configuration file.

    Attributes:
        schema_version:  Format version of the source document.
        output_dir:      Directory every command writes into.
        plot:            Whether ``run`` renders an SVG next to the log.
        scenario:        The scenario to simulate.
        batch:           Replicate settings.
        source:          File the configuration was read from, ``None`` for defaults.
    """

    schema_version: int
    output_dir: Path
    plot: bool
    scenario: Scenario
    batch: BatchSettings = field(default_factory=BatchSettings)
    source: Path | None = None


# ---------------------------------------------------------------------------
# Loading
# ---------------------------------------------------------------------------

def _read_json(path: Path) -> dict[str, Any]:
    if not path.exists() or not path.is_file():
        raise FileNotFoundError(f"Config file not found: {path}")
    try:
        with path.open("r", encoding="utf-8") as handle:
            payload = json.load(handle)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(payload, dict):
        raise ConfigError(f"{path}: config must be a JSON object at top level")
    return payload


def default_payload() -> dict[str, Any]:
    """Return a fresh copy of the packaged defaults."""
    return _read_json(DEFAULT_CONFIG_PATH)


def preset_path(name: str) -> Path:
    """Path of a packaged scenario preset such as ``ekf_mpc_sinusoid``."""
    path = SCENARIO_PRESETS / f"{name}.json"
    if not path.exists():
        available = sorted(item.stem for item in SCENARIO_PRESETS.glob("*.json"))
        raise ConfigError(f"unknown scenario preset {name!r}; available: {', '.join(available)}")
    return path


def merge_config(defaults: Mapping[str, Any], overrides: Mapping[str, Any], path: str = "") -> dict[str, Any]:
    """Deep-merge ``overrides`` into a copy of ``defaults``.

    Raises:
        ConfigError: if ``overrides`` names a key the defaults do not define.
    """
    merged = copy.deepcopy(dict(defaults))
    for key, value in overrides.items():
        dotted = f"{path}.{key}" if path else key
        if key not in merged:
            raise ConfigError(f"unknown config key '{dotted}'")
        current = merged[key]
        if dotted in _OPEN_SECTIONS or current is None:
            merged[key] = copy.deepcopy(value)
        elif isinstance(current, dict):
            if not isinstance(value, dict):
                raise ConfigError(f"'{dotted}' must be an object")
            merged[key] = merge_config(current, value, dotted)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def _reject_non_finite(value: Any, path: str) -> None:
    if isinstance(value, float) and not math.isfinite(value):
        raise ConfigError(f"'{path}' must be a finite number, got {value!r}")
    if isinstance(value, dict):
        for key, item in value.items():
            _reject_non_finite(item, f"{path}.{key}" if path else key)
    elif isinstance(value, list):
        for index, item in enumerate(value):
            _reject_non_finite(item, f"{path}[{index}]")


# ---------------------------------------------------------------------------
# Section parsing
# ---------------------------------------------------------------------------

def _number(section: Mapping[str, Any], key: str, path: str) -> float:
    value = section.get(key)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"'{path}.{key}' must be a number, got {value!r}")
    return float(value)


def _integer(section: Mapping[str, Any], key: str, path: str) -> int:
    value = section.get(key)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"'{path}.{key}' must be an integer, got {value!r}")
    return value


def _section(payload: Mapping[str, Any], key: str, path: str) -> Mapping[str, Any]:
    value = payload.get(key)
    if not isinstance(value, dict):
        raise ConfigError(f"'{path}.{key}' must be an object")
    return value


def _trajectory(section: Mapping[str, Any], base_dir: Path) -> TrajectorySpec:
    path = "scenario.trajectory"
    raw_path = section.get("path")
    waypoint_path: Path | None = None
    if raw_path is not None:
        if not isinstance(raw_path, str):
            raise ConfigError(f"'{path}.path' must be a string")
        waypoint_path = Path(raw_path).expanduser()
        if not waypoint_path.is_absolute():
            waypoint_path = base_dir / waypoint_path
    return TrajectorySpec(
        kind=section.get("kind"),
        speed=_number(section, "speed", path),
        spacing=_number(section, "spacing", path),
        radius=_number(section, "radius", path),
        arc_fraction=_number(section, "arc_fraction", path),
        amplitude=_number(section, "amplitude", path),
        wavelength=_number(section, "wavelength", path),
        length=_number(section, "length", path),
        path=waypoint_path,
    )


def _constant_input(value: Any) -> ControlInput | None:
    if value is None:
        return None
    if not isinstance(value, dict) or set(value) != {"alpha", "delta"}:
        raise ConfigError("'scenario.constant_input' must be null or an object with 'alpha' and 'delta'")
    return ControlInput(
        alpha=_number(value, "alpha", "scenario.constant_input"),
        delta=_number(value, "delta", "scenario.constant_input"),
    )


def _scenario(payload: Mapping[str, Any], base_dir: Path) -> Scenario:
    rates = _section(payload, "rates", "scenario")
    control_hz = _number(rates, "control_hz", "scenario.rates")
    seed = _integer(payload, "seed", "scenario")
    if seed < 0:
        raise ConfigError(f"'scenario.seed' must be non-negative, got {seed}")
    gps = _section(payload, "gps", "scenario")
    magnetometer = _section(payload, "magnetometer", "scenario")
    perturbation = payload.get("plant_perturbation") or {}
    if not isinstance(perturbation, dict):
        raise ConfigError("'scenario.plant_perturbation' must be an object")
    duration = payload.get("duration")
    name = payload.get("name")
    if not isinstance(name, str) or not name:
        raise ConfigError("'scenario.name' must be a non-empty string")

    return Scenario(
        name=name,
        mode=payload.get("mode"),
        trajectory=_trajectory(_section(payload, "trajectory", "scenario"), base_dir),
        duration=None if duration is None else _number(payload, "duration", "scenario"),
        control_rate_hz=control_hz,
        vehicle=VehicleParams.from_mapping(_section(payload, "vehicle", "scenario")),
        gps=GpsNoiseParams(
            sigma=_number(gps, "sigma", "scenario.gps"),
            p_max=_number(gps, "p_max", "scenario.gps"),
            seed=seed,
            rate_hz=_number(rates, "gps_hz", "scenario.rates"),
            model=gps.get("model"),
            noise_update=gps.get("noise_update"),
        ),
        magnetometer=MagnetometerParams(
            sigma_theta=_number(magnetometer, "sigma_theta", "scenario.magnetometer"),
            rate_hz=_number(rates, "magnetometer_hz", "scenario.rates"),
            seed=seed,
        ),
        ekf=EkfConfig.from_mapping(_section(payload, "estimator", "scenario")),
        mpc=MpcConfig.from_mapping(_section(payload, "controller", "scenario"), dt=1.0 / control_hz),
        origin=GeodeticCoord(**{key: _number(payload["origin"], key, "scenario.origin") for key in ("lat", "lon", "alt")}),
        plant_perturbation={key: float(value) for key, value in perturbation.items()},
        constant_input=_constant_input(payload.get("constant_input")),
        skip_initial=_number(payload, "skip_initial", "scenario"),
    )


def build_config(payload: Mapping[str, Any], base_dir: Path | None = None, source: Path | None = None) -> NavSimConfig:
    """Validate a merged payload and build the typed configuration.

    Raises:
        ConfigError: on any schema or value violation. Errors raised by the
            value types themselves are re-raised as ``ConfigError``.
    """
    base_dir = base_dir or Path.cwd()
    version = payload.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version!r}; expected {SCHEMA_VERSION}")
    _reject_non_finite(dict(payload), "")

    output_dir = payload.get("output_dir")
    if not isinstance(output_dir, str) or not output_dir:
        raise ConfigError("'output_dir' must be a non-empty string")
    plot = payload.get("plot")
    if not isinstance(plot, bool):
        raise ConfigError("'plot' must be true or false")

    try:
        batch_section = _section(payload, "batch", "")
        batch = BatchSettings(
            runs=_integer(batch_section, "runs", "batch"),
            seed_stride=_integer(batch_section, "seed_stride", "batch"),
            max_workers=_integer(batch_section, "max_workers", "batch"),
        )
        scenario = _scenario(_section(payload, "scenario", ""), base_dir)
    except ConfigError:
        raise
    except (ValueError, TypeError, KeyError) as exc:
        raise ConfigError(f"invalid scenario: {exc}") from exc

    return NavSimConfig(
        schema_version=version,
        output_dir=Path(output_dir).expanduser(),
        plot=plot,
        scenario=scenario,
        batch=batch,
        source=source,
    )


def apply_overrides(config: NavSimConfig, overrides: ConfigOverrides | None) -> NavSimConfig:
    """Shadow config values with command-line flags."""
    if overrides is None:
        return config
    scenario = config.scenario
    try:
        if overrides.seed is not None:
            if overrides.seed < 0:
                raise ConfigError(f"--seed must be non-negative, got {overrides.seed}")
            scenario = scenario.with_seed(overrides.seed)
        scenario = scenario.with_overrides(duration=overrides.duration, gps_rate=overrides.gps_rate)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    output_dir = overrides.output_dir if overrides.output_dir is not None else config.output_dir
    return NavSimConfig(
        schema_version=config.schema_version,
        output_dir=output_dir,
        plot=config.plot,
        scenario=scenario,
        batch=config.batch,
        source=config.source,
    )


def load_config(path: str | Path | None = None, overrides: ConfigOverrides | None = None) -> NavSimConfig:
    """Load a configuration file, or the packaged defaults when ``path`` is ``None``.

    Precedence is flags > file > defaults. Relative waypoint paths resolve
    against the config file's directory.

    Raises:
        FileNotFoundError: if ``path`` does not exist.
        ConfigError: if the document fails validation.
    """
    defaults = default_payload()
    if path is None:
        config = build_config(defaults)
    else:
        config_path = Path(path).expanduser().resolve()
        user_payload = _read_json(config_path)
        merged = merge_config(defaults, user_payload)
        config = build_config(merged, base_dir=config_path.parent, source=config_path)
        logger.debug("Config loaded", extra={"path": str(config_path), "scenario": config.scenario.name})
    return apply_overrides(config, overrides)


def load_trajectory(config: NavSimConfig) -> Trajectory:
    """Build the reference trajectory the scenario describes.

    Raises:
        ConfigError: if the vehicle cannot follow the path (too tight a turn,
            or a speed beyond full throttle) or the waypoint file is malformed.
        FileNotFoundError: if the waypoint file does not exist.
    """
    scenario = config.scenario
    try:
        return build_trajectory(scenario.trajectory, scenario.vehicle)
    except (TrajectoryError, DynamicsError, LogFormatError) as exc:
        raise ConfigError(f"scenario.trajectory: {exc}") from exc
