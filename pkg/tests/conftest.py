from __future__ import annotations

import copy
import json
from pathlib import Path
from typing import Any

import pytest

from navsim.config import NavSimConfig, build_config, default_payload, load_config
from estimator import EkfConfig
from harness import Scenario
from vehicle import VehicleParams


@pytest.fixture(scope="session")
def _default_payload() -> dict[str, Any]:
    return default_payload()


@pytest.fixture
def payload(_default_payload) -> dict[str, Any]:
    """Mutable copy of the packaged default configuration."""
    return copy.deepcopy(_default_payload)


@pytest.fixture(scope="session")
def default_config() -> NavSimConfig:
    return load_config()


@pytest.fixture(scope="session")
def params(default_config) -> VehicleParams:
    return default_config.scenario.vehicle


@pytest.fixture(scope="session")
def ekf_config(default_config) -> EkfConfig:
    return default_config.scenario.ekf


@pytest.fixture(scope="session")
def scenario(default_config) -> Scenario:
    return default_config.scenario


@pytest.fixture
def write_config(tmp_path):
    """Write a config document to a temp file and return its path."""

    def _write(document: dict[str, Any], name: str = "config.json") -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(document), encoding="utf-8")
        return path

    return _write


@pytest.fixture
def scenario_factory(payload):
    """Build a scenario from the defaults with ``scenario`` sections replaced.

    Nested dicts are merged one level deep, e.g. ``trajectory={"radius": 2.0}``.
    """

    def _build(**overrides: Any) -> Scenario:
        document = copy.deepcopy(payload)
        for key, value in overrides.items():
            current = document["scenario"].get(key)
            if isinstance(current, dict) and isinstance(value, dict) and key != "plant_perturbation":
                current.update(value)
            else:
                document["scenario"][key] = value
        return build_config(document).scenario

    return _build
