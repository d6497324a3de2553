"""Tool configuration: schema-validated JSON with documented defaults.

The schema ships with the package (``data/config.schema.json``); unknown keys
are rejected, violations are reported with their field paths. The only
environment variable honored is ``FJMKIT_CONFIG`` (default config path).
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema

from .errors import ConfigurationError
from .mechanics import (
    DEFAULT_C1,
    DEFAULT_YOUNGS_MODULUS_MPA,
    FrictionModel,
    MembraneSpec,
    PhaseParams,
    load_bundled_friction_model,
)

CONFIG_ENV_VAR = "FJMKIT_CONFIG"

DEFAULT_FIBER_DIAMETERS_MM = (0.3, 0.4, 0.5, 0.6)
DEFAULT_DENSITIES = (0.33, 0.45, 0.56, 0.72)


def _schema() -> dict:
    path = resources.files("fjmkit").joinpath("data/config.schema.json")
    return json.loads(path.read_text())


@dataclass(frozen=True)
class ToolConfig:
    """Fully-defaulted runtime configuration."""

    membrane: MembraneSpec = field(
        default_factory=lambda: MembraneSpec(inner_radius_mm=2.0)
    )
    youngs_modulus_mpa: float = DEFAULT_YOUNGS_MODULUS_MPA
    load_constant: float = DEFAULT_C1
    phases: PhaseParams = field(default_factory=PhaseParams)
    friction_calibration_path: str | None = None
    seed: int = 0
    bundle_model: str = "packing"
    fill_factor: float = 0.79
    fiber_diameters_mm: tuple[float, ...] = DEFAULT_FIBER_DIAMETERS_MM
    densities: tuple[float, ...] = DEFAULT_DENSITIES

    def friction_model(self) -> FrictionModel:
        if self.friction_calibration_path is None:
            return load_bundled_friction_model()
        return FrictionModel.from_json_file(self.friction_calibration_path)


def _json_path(error: jsonschema.ValidationError) -> str:
    parts = ["$"]
    for p in error.absolute_path:
        parts.append(f"[{p}]" if isinstance(p, int) else f".{p}")
    return "".join(parts)


def parse_config(data: dict) -> ToolConfig:
    """Validate a config payload against the schema and apply defaults."""
    validator = jsonschema.Draft202012Validator(_schema())
    violations = [
        f"{_json_path(err)}: {err.message}"
        for err in sorted(validator.iter_errors(data), key=str)
    ]
    violations.extend(_extra_checks(data))
    if violations:
        raise ConfigurationError(
            "invalid configuration:\n  " + "\n  ".join(violations)
        )
    membrane_raw = data["membrane"]
    membrane = MembraneSpec(
        inner_radius_mm=float(membrane_raw["inner_radius_mm"]),
        wall_thickness_mm=float(membrane_raw.get("wall_thickness_mm", 0.17)),
        effective_length_mm=float(membrane_raw.get("effective_length_mm", 100.0)),
    )
    fiber_defaults = data.get("fiber_defaults", {})
    phases_raw = data.get("phases", {})
    sweep_raw = data.get("sweep", {})
    return ToolConfig(
        membrane=membrane,
        youngs_modulus_mpa=float(
            fiber_defaults.get("youngs_modulus_mpa", DEFAULT_YOUNGS_MODULUS_MPA)
        ),
        load_constant=float(data.get("load_constant", DEFAULT_C1)),
        phases=PhaseParams(
            slip_onset_mm=float(phases_raw.get("slip_onset_mm", 1.0)),
            transition_window_mm=float(phases_raw.get("transition_window_mm", 1.0)),
        ),
        friction_calibration_path=data.get("friction_calibration"),
        seed=int(data.get("seed", 0)),
        bundle_model=sweep_raw.get("bundle_model", "packing"),
        fill_factor=float(sweep_raw.get("fill_factor", 0.79)),
        fiber_diameters_mm=tuple(
            float(d) for d in sweep_raw.get("fiber_diameters_mm",
                                            DEFAULT_FIBER_DIAMETERS_MM)
        ),
        densities=tuple(
            float(d) for d in sweep_raw.get("densities", DEFAULT_DENSITIES)
        ),
    )


def _extra_checks(data: dict) -> list[str]:
    """Physical checks the schema cannot express."""
    out: list[str] = []
    if not isinstance(data, dict):
        return out
    membrane = data.get("membrane")
    if isinstance(membrane, dict):
        inner = membrane.get("inner_radius_mm")
        wall = membrane.get("wall_thickness_mm")
        if (
            isinstance(inner, (int, float))
            and isinstance(wall, (int, float))
            and wall >= inner
        ):
            out.append(
                "$.membrane.wall_thickness_mm: wall must be thinner than the "
                "inner radius"
            )
    sweep_raw = data.get("sweep")
    if isinstance(sweep_raw, dict):
        densities = sweep_raw.get("densities")
        if isinstance(densities, list):
            bound = math.pi / math.sqrt(12.0)
            for i, rho in enumerate(densities):
                if isinstance(rho, (int, float)) and rho > bound:
                    out.append(
                        f"$.sweep.densities[{i}]: {rho} exceeds the hexagonal "
                        f"packing bound pi/sqrt(12) = {bound:.6f}"
                    )
    return out


def validate_config(path: str | Path) -> ToolConfig:
    """Load, schema-validate, and default a config file."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigurationError(f"config {path} must hold a JSON object")
    return parse_config(data)


def default_config() -> ToolConfig:
    """Config from FJMKIT_CONFIG when set, else built-in defaults."""
    env_path = os.environ.get(CONFIG_ENV_VAR)
    if env_path:
        return validate_config(env_path)
    return ToolConfig()
