"""Analytic stiffness model for fiber jamming modules.

A jammed module bends as one solid circular beam; an unjammed one bends as N
independent fibers whose sliding friction soaks up part of the external work.
Both cases reduce to the cantilever tip stiffness

    k = (1 / C1) * E * I / L^3 * 1 / (1 - eps)

with ``eps = 0`` for the jammed case. The stiffness-variation ratio is
``zeta = k_jammed / k_unjammed = R^4 / (N r^4) * (1 - eps)``.

Units are fixed repo-wide: mm, N, MPa (N/mm^2), kPa.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .curves import JAMMED, UNJAMMED, CurveMeta, ForceDeflectionCurve
from .errors import ConfigurationError, InvalidArgumentError
from .geometry import HEX_BOUND, packing_density

QUARTER_PI = math.pi / 4.0

# Documented defaults: point load at the free tip of a cantilever gives
# C1 = 1/3; 3000 MPa is typical of nylon 66 fibers (the modulus is a config
# parameter, not a measured constant -- absolute stiffness scales with it).
DEFAULT_C1 = 1.0 / 3.0
DEFAULT_YOUNGS_MODULUS_MPA = 3000.0

EPSILON_CEILING = 1.0 - 1e-6

MAX_VACUUM_KPA = 101.325


# ---------------------------------------------------------------------------
# Domain types


@dataclass(frozen=True)
class FiberSpec:
    """One fiber: radius (mm) and Young's modulus (MPa)."""

    radius_mm: float
    youngs_modulus_mpa: float = DEFAULT_YOUNGS_MODULUS_MPA

    def __post_init__(self):
        _positive(self.radius_mm, "fiber radius")
        _positive(self.youngs_modulus_mpa, "Young's modulus")


@dataclass(frozen=True)
class MembraneSpec:
    """Latex chamber: inner radius, wall thickness, effective length (mm)."""

    inner_radius_mm: float
    wall_thickness_mm: float = 0.17
    effective_length_mm: float = 100.0

    def __post_init__(self):
        _positive(self.inner_radius_mm, "membrane inner radius")
        _positive(self.wall_thickness_mm, "membrane wall thickness")
        _positive(self.effective_length_mm, "effective length")
        if self.wall_thickness_mm >= self.inner_radius_mm:
            raise InvalidArgumentError(
                "membrane wall must be thin relative to its inner radius"
            )


@dataclass(frozen=True)
class FjmConfig:
    """Full module description used by predictions and sweeps."""

    fiber: FiberSpec
    fiber_count: int
    bundle_radius_mm: float
    membrane: MembraneSpec
    load_constant: float = DEFAULT_C1

    def __post_init__(self):
        if self.fiber_count < 1 or int(self.fiber_count) != self.fiber_count:
            raise InvalidArgumentError("fiber count must be a positive integer")
        _positive(self.bundle_radius_mm, "bundle radius")
        _positive(self.load_constant, "load constant C1")
        if self.bundle_radius_mm > self.membrane.inner_radius_mm * (1.0 + 1e-12):
            raise InvalidArgumentError(
                "bundle radius exceeds the membrane inner radius"
            )
        density = packing_density(
            self.fiber_count, self.fiber.radius_mm, self.membrane.inner_radius_mm
        )
        if density > HEX_BOUND + 1e-9:
            raise InvalidArgumentError(
                f"packing density {density:.4f} exceeds the hexagonal bound"
            )

    @property
    def density(self) -> float:
        return packing_density(
            self.fiber_count, self.fiber.radius_mm, self.membrane.inner_radius_mm
        )

    def to_dict(self) -> dict:
        return {
            "fiber_radius_mm": self.fiber.radius_mm,
            "youngs_modulus_mpa": self.fiber.youngs_modulus_mpa,
            "fiber_count": self.fiber_count,
            "bundle_radius_mm": self.bundle_radius_mm,
            "membrane_inner_radius_mm": self.membrane.inner_radius_mm,
            "membrane_wall_thickness_mm": self.membrane.wall_thickness_mm,
            "effective_length_mm": self.membrane.effective_length_mm,
            "load_constant": self.load_constant,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FjmConfig":
        try:
            return cls(
                fiber=FiberSpec(
                    radius_mm=float(data["fiber_radius_mm"]),
                    youngs_modulus_mpa=float(
                        data.get("youngs_modulus_mpa", DEFAULT_YOUNGS_MODULUS_MPA)
                    ),
                ),
                fiber_count=int(data["fiber_count"]),
                bundle_radius_mm=float(data["bundle_radius_mm"]),
                membrane=MembraneSpec(
                    inner_radius_mm=float(data["membrane_inner_radius_mm"]),
                    wall_thickness_mm=float(data.get("membrane_wall_thickness_mm", 0.17)),
                    effective_length_mm=float(data.get("effective_length_mm", 100.0)),
                ),
                load_constant=float(data.get("load_constant", DEFAULT_C1)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidArgumentError(f"malformed config payload: {exc}") from exc


@dataclass(frozen=True)
class JammingState:
    """Jammed (vacuum applied, pressure carried as metadata) or unjammed."""

    jammed: bool
    vacuum_pressure_kpa: float | None = None

    def __post_init__(self):
        p = self.vacuum_pressure_kpa
        if p is not None:
            if not self.jammed:
                raise InvalidArgumentError("unjammed state carries no vacuum pressure")
            if not (0.0 <= p <= MAX_VACUUM_KPA):
                raise InvalidArgumentError(
                    f"vacuum pressure must lie in [0, {MAX_VACUUM_KPA}] kPa"
                )

    @classmethod
    def jammed_at(cls, vacuum_pressure_kpa: float) -> "JammingState":
        return cls(jammed=True, vacuum_pressure_kpa=vacuum_pressure_kpa)

    @classmethod
    def unjammed(cls) -> "JammingState":
        return cls(jammed=False)

    @property
    def label(self) -> str:
        return JAMMED if self.jammed else UNJAMMED


@dataclass(frozen=True)
class PhaseParams:
    """Knee location of the jammed curve: slip onset and blend window (mm).

    The paper-level model does not quantify either; both default to 1 mm and
    should be calibrated from measured curves when available.
    """

    slip_onset_mm: float = 1.0
    transition_window_mm: float = 1.0

    def __post_init__(self):
        if self.slip_onset_mm < 0.0 or not math.isfinite(self.slip_onset_mm):
            raise InvalidArgumentError("slip onset must be >= 0")
        if self.transition_window_mm < 0.0 or not math.isfinite(
            self.transition_window_mm
        ):
            raise InvalidArgumentError("transition window must be >= 0")


@dataclass(frozen=True)
class StiffnessReport:
    """Jammed/unjammed tip stiffness with their ratio and friction value."""

    k_jammed_n_per_mm: float
    k_unjammed_n_per_mm: float
    zeta: float
    epsilon: float

    def __post_init__(self):
        _positive(self.k_jammed_n_per_mm, "jammed stiffness")
        _positive(self.k_unjammed_n_per_mm, "unjammed stiffness")
        expected = self.k_jammed_n_per_mm / self.k_unjammed_n_per_mm
        if not math.isclose(self.zeta, expected, rel_tol=1e-9):
            raise InvalidArgumentError("zeta inconsistent with stiffness values")
        if not (0.0 <= self.epsilon < 1.0):
            raise InvalidArgumentError("epsilon must lie in [0, 1)")


@dataclass(frozen=True)
class FrictionGroup:
    """Linear friction law eps = a + b*N fitted at one packing density."""

    density: float
    intercept: float
    slope_per_fiber: float

    def __post_init__(self):
        if not (0.0 < self.density <= HEX_BOUND):
            raise InvalidArgumentError("group density must lie in (0, hex bound]")


@dataclass(frozen=True)
class FrictionModel:
    """Per-density linear friction coefficients.

    Queries at a density with no group use the nearest group; because the
    per-fiber friction force grows with packing density, the slope is scaled
    by the density ratio when extrapolating (``scale_slope_with_density``).
    Outputs are clamped to [0, 1 - 1e-6].
    """

    groups: tuple[FrictionGroup, ...] = ()
    scale_slope_with_density: bool = True

    def __post_init__(self):
        seen = set()
        for g in self.groups:
            if g.density in seen:
                raise InvalidArgumentError(
                    f"duplicate friction group at density {g.density}"
                )
            seen.add(g.density)

    def group_for(self, density: float) -> FrictionGroup:
        if not self.groups:
            raise ConfigurationError("friction model holds no calibration groups")
        return min(self.groups, key=lambda g: (abs(g.density - density), g.density))

    def to_dict(self) -> dict:
        return {
            "scale_slope_with_density": self.scale_slope_with_density,
            "groups": [
                {
                    "density": g.density,
                    "intercept": g.intercept,
                    "slope_per_fiber": g.slope_per_fiber,
                }
                for g in self.groups
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FrictionModel":
        try:
            groups = tuple(
                FrictionGroup(
                    density=float(g["density"]),
                    intercept=float(g["intercept"]),
                    slope_per_fiber=float(g["slope_per_fiber"]),
                )
                for g in data["groups"]
            )
            return cls(
                groups=groups,
                scale_slope_with_density=bool(
                    data.get("scale_slope_with_density", True)
                ),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigurationError(f"malformed friction model: {exc}") from exc

    @classmethod
    def from_json_file(cls, path: str | Path) -> "FrictionModel":
        try:
            payload = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigurationError(f"cannot read friction model {path}: {exc}") from exc
        return cls.from_dict(payload)


def load_bundled_friction_model() -> FrictionModel:
    """Two-anchor calibration shipped with the package (56% density group)."""
    path = resources.files("fjmkit").joinpath("data/friction_calibration.json")
    return FrictionModel.from_dict(json.loads(path.read_text()))


class EpsilonEstimate(NamedTuple):
    """Friction coefficient inferred from a measured variation ratio."""

    value: float
    raw: float
    in_model: bool


# ---------------------------------------------------------------------------
# Operations


def inertia_unjammed(fiber_count: int, fiber_radius_mm: float) -> float:
    """Total second moment of N independent fibers: N * pi/4 * r^4 (mm^4)."""
    if fiber_count < 1 or int(fiber_count) != fiber_count:
        raise InvalidArgumentError("fiber count must be a positive integer")
    _positive(fiber_radius_mm, "fiber radius")
    return fiber_count * QUARTER_PI * fiber_radius_mm**4


def inertia_jammed(bundle_radius_mm: float) -> float:
    """Second moment of the solid jammed cross-section: pi/4 * R^4 (mm^4)."""
    if bundle_radius_mm < 0.0 or not math.isfinite(bundle_radius_mm):
        raise InvalidArgumentError("bundle radius must be >= 0")
    return QUARTER_PI * bundle_radius_mm**4


def tip_stiffness(
    youngs_modulus_mpa: float,
    inertia_mm4: float,
    length_mm: float,
    load_constant: float = DEFAULT_C1,
    epsilon: float = 0.0,
) -> float:
    """Cantilever tip stiffness (N/mm); pass epsilon=0 for the jammed case."""
    _positive(youngs_modulus_mpa, "Young's modulus")
    _positive(inertia_mm4, "moment of inertia")
    _positive(length_mm, "length")
    _positive(load_constant, "load constant C1")
    if not (0.0 <= epsilon < 1.0):
        raise InvalidArgumentError(
            "epsilon must lie in [0, 1); the model is singular at 1"
        )
    elastic = youngs_modulus_mpa * inertia_mm4 / (load_constant * length_mm**3)
    return elastic / (1.0 - epsilon)


def variation_ratio(
    bundle_radius_mm: float, fiber_count: int, fiber_radius_mm: float, epsilon: float
) -> float:
    """Stiffness variation ratio zeta = R^4 / (N r^4) * (1 - eps)."""
    _positive(bundle_radius_mm, "bundle radius")
    _positive(fiber_radius_mm, "fiber radius")
    if fiber_count < 1 or int(fiber_count) != fiber_count:
        raise InvalidArgumentError("fiber count must be a positive integer")
    if not (0.0 <= epsilon < 1.0):
        raise InvalidArgumentError("epsilon must lie in [0, 1)")
    return (
        bundle_radius_mm**4
        / (fiber_count * fiber_radius_mm**4)
        * (1.0 - epsilon)
    )


def estimate_epsilon(
    zeta_observed: float,
    bundle_radius_mm: float,
    fiber_count: int,
    fiber_radius_mm: float,
) -> EpsilonEstimate:
    """Invert the variation ratio for the friction coefficient.

    A measured ratio above the frictionless bound R^4/(N r^4) implies a
    negative coefficient: the estimate is clamped to 0 and flagged
    ``in_model=False``.
    """
    if not (zeta_observed > 0.0 and math.isfinite(zeta_observed)):
        raise InvalidArgumentError("observed zeta must be positive and finite")
    _positive(bundle_radius_mm, "bundle radius")
    _positive(fiber_radius_mm, "fiber radius")
    if fiber_count < 1 or int(fiber_count) != fiber_count:
        raise InvalidArgumentError("fiber count must be a positive integer")
    raw = 1.0 - zeta_observed * fiber_count * fiber_radius_mm**4 / bundle_radius_mm**4
    if 0.0 <= raw < 1.0:
        return EpsilonEstimate(value=raw, raw=raw, in_model=True)
    return EpsilonEstimate(value=min(max(raw, 0.0), EPSILON_CEILING), raw=raw,
                           in_model=False)


def epsilon_model(fiber_count: int, density: float, model: FrictionModel) -> float:
    """Friction coefficient from a calibrated model: clamp(a + b_eff*N)."""
    if fiber_count < 1 or int(fiber_count) != fiber_count:
        raise InvalidArgumentError("fiber count must be a positive integer")
    if not (0.0 < density <= HEX_BOUND + 1e-9):
        raise InvalidArgumentError("density must lie in (0, hex bound]")
    group = model.group_for(density)
    slope = group.slope_per_fiber
    if model.scale_slope_with_density:
        slope *= density / group.density
    eps = group.intercept + slope * fiber_count
    return min(max(eps, 0.0), EPSILON_CEILING)


def stiffness_report(config: FjmConfig, epsilon: float) -> StiffnessReport:
    """Jammed and unjammed tip stiffness of one module, plus their ratio."""
    e = config.fiber.youngs_modulus_mpa
    length = config.membrane.effective_length_mm
    k_j = tip_stiffness(
        e, inertia_jammed(config.bundle_radius_mm), length, config.load_constant, 0.0
    )
    k_uj = tip_stiffness(
        e,
        inertia_unjammed(config.fiber_count, config.fiber.radius_mm),
        length,
        config.load_constant,
        epsilon,
    )
    return StiffnessReport(
        k_jammed_n_per_mm=k_j,
        k_unjammed_n_per_mm=k_uj,
        zeta=k_j / k_uj,
        epsilon=epsilon,
    )


def predict_curve(
    config: FjmConfig,
    state: JammingState,
    phases: PhaseParams,
    epsilon: float,
    max_deflection_mm: float,
    step_mm: float,
    config_id: str | None = None,
) -> ForceDeflectionCurve:
    """Piecewise force-deflection prediction.

    Jammed: pre-slip slope k_j up to the slip onset, a linear slope blend
    from k_j to the full-slip slope over the transition window, then the
    full-slip slope (the unjammed stiffness, never above k_j). Unjammed:
    a single slope for every deflection. Force is continuous with F(0) = 0.
    """
    _positive(max_deflection_mm, "max deflection")
    _positive(step_mm, "step")
    if step_mm > max_deflection_mm:
        raise InvalidArgumentError("step exceeds the max deflection")
    report = stiffness_report(config, epsilon)
    y = np.arange(0.0, max_deflection_mm * (1.0 + 1e-12) + step_mm / 2.0, step_mm)
    y = y[y <= max_deflection_mm * (1.0 + 1e-12)]
    if state.jammed:
        k_full = min(report.k_unjammed_n_per_mm, report.k_jammed_n_per_mm)
        force = _jammed_force(
            y,
            report.k_jammed_n_per_mm,
            k_full,
            phases.slip_onset_mm,
            phases.transition_window_mm,
        )
    else:
        force = report.k_unjammed_n_per_mm * y
    meta = CurveMeta(
        state=state.label,
        config_id=config_id,
        vacuum_pressure_kpa=state.vacuum_pressure_kpa,
    )
    return ForceDeflectionCurve(y, force, meta)


def _jammed_force(
    y: np.ndarray, k_pre: float, k_full: float, onset: float, window: float
) -> np.ndarray:
    force = np.empty_like(y)
    pre = y <= onset
    force[pre] = k_pre * y[pre]
    f_onset = k_pre * onset
    if window > 0.0:
        in_window = (~pre) & (y <= onset + window)
        t = y[in_window] - onset
        force[in_window] = f_onset + k_pre * t + (k_full - k_pre) * t**2 / (2.0 * window)
        f_end = f_onset + (k_pre + k_full) * window / 2.0
    else:
        in_window = np.zeros_like(pre)
        f_end = f_onset
    beyond = (~pre) & (~in_window)
    force[beyond] = f_end + k_full * (y[beyond] - onset - window)
    return force


def _positive(value: float, name: str) -> None:
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
        raise InvalidArgumentError(f"{name} must be positive and finite")
