"""Design-space exploration: configuration tables, grid sweeps, selection.

A sweep cell is a (fiber diameter, packing density) pair. The fiber count
comes from inverting the density formula; the jammed bundle radius comes, by
default, from the packing solver's minimal enclosing ratio for that count
(``bundle_model="packing"``), which makes the jammed stiffness fall as fibers
shrink, matching observed behavior. A constant fill-factor alternative
(``bundle_model="fill-factor"``) is available for quick estimates.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, replace
from pathlib import Path

from .errors import InvalidArgumentError, NoFeasibleDesignError
from .geometry import (
    HEX_BOUND,
    fiber_count_for_density,
    max_fibers_in_circle,
    min_enclosing_ratio,
    packing_density,
)
from .mechanics import (
    DEFAULT_C1,
    FiberSpec,
    FjmConfig,
    FrictionModel,
    MembraneSpec,
    StiffnessReport,
    epsilon_model,
    stiffness_report,
)

DEFAULT_FILL_FACTOR = 0.79  # within-bundle fill implied by the reference table
BUNDLE_MODELS = ("packing", "fill-factor")

SWEEP_CSV_HEADER = (
    "fiber_diameter_mm,density,fiber_count,k_jammed_n_per_mm,"
    "k_unjammed_n_per_mm,zeta,epsilon,feasible"
)
TABLE_CSV_HEADER = (
    "bundle_diameter_mm,bundle_fraction,fiber_diameter_mm,fiber_count,density"
)


@dataclass(frozen=True)
class SweepGrid:
    """Axes and shared inputs of a design-space sweep."""

    fiber_diameters_mm: tuple[float, ...]
    densities: tuple[float, ...]
    membrane: MembraneSpec
    youngs_modulus_mpa: float
    friction: FrictionModel

    def __post_init__(self):
        if not self.fiber_diameters_mm or not self.densities:
            raise InvalidArgumentError("sweep axes must be non-empty")
        for d in self.fiber_diameters_mm:
            if not (d > 0.0 and math.isfinite(d)):
                raise InvalidArgumentError("fiber diameters must be positive")
        for rho in self.densities:
            if not (0.0 < rho <= HEX_BOUND):
                raise InvalidArgumentError(
                    f"densities must lie in (0, {HEX_BOUND:.4f}]"
                )
        if not (self.youngs_modulus_mpa > 0.0):
            raise InvalidArgumentError("Young's modulus must be positive")


@dataclass(frozen=True)
class DesignPoint:
    """One evaluated sweep cell; infeasible cells keep their coordinates."""

    fiber_diameter_mm: float
    density: float
    fiber_count: int | None
    config: FjmConfig | None
    report: StiffnessReport | None
    feasible: bool
    note: str = ""


@dataclass(frozen=True)
class Constraints:
    """Selection bounds; any bound left as None is inactive."""

    min_jammed_stiffness_n_per_mm: float | None = None
    min_variation_ratio: float | None = None
    max_density: float | None = None

    def __post_init__(self):
        for name in (
            "min_jammed_stiffness_n_per_mm",
            "min_variation_ratio",
            "max_density",
        ):
            value = getattr(self, name)
            if value is not None and not (value > 0.0 and math.isfinite(value)):
                raise InvalidArgumentError(f"{name} must be positive when set")


@dataclass(frozen=True)
class TableRow:
    """One row of a configuration table (Table-1 style)."""

    bundle_fraction: float
    bundle_diameter_mm: float
    fiber_diameter_mm: float
    fiber_count: int
    density: float


# ---------------------------------------------------------------------------
# Operations


def generate_table(
    membrane: MembraneSpec,
    bundle_fractions: tuple[float, ...] = (0.95, 0.85, 0.75, 0.65),
    fiber_diameters_mm: tuple[float, ...] = (0.3, 0.4, 0.5, 0.6),
    seed: int = 0,
) -> list[TableRow]:
    """Fiber counts and densities for each bundle-fraction/diameter pair.

    Counts come from the packing solver: the largest number of fibers the
    bundle circle certifiably holds. Rows whose fiber exceeds the bundle are
    skipped with a warning.
    """
    for fraction in bundle_fractions:
        if not (0.0 < fraction <= 1.0):
            raise InvalidArgumentError("bundle fractions must lie in (0, 1]")
    for d in fiber_diameters_mm:
        if not (0.0 < d < 2.0 * membrane.inner_radius_mm):
            raise InvalidArgumentError(
                "fiber diameters must be positive and below the membrane diameter"
            )
    rows: list[TableRow] = []
    for fraction in bundle_fractions:
        container = fraction * membrane.inner_radius_mm
        for diameter in fiber_diameters_mm:
            r = diameter / 2.0
            if r > container:
                warnings.warn(
                    f"fiber diameter {diameter} mm does not fit a bundle of "
                    f"{2.0 * container} mm; row skipped",
                    stacklevel=2,
                )
                continue
            result = max_fibers_in_circle(container, r, seed=seed)
            rows.append(
                TableRow(
                    bundle_fraction=fraction,
                    bundle_diameter_mm=2.0 * container,
                    fiber_diameter_mm=diameter,
                    fiber_count=result.count,
                    density=packing_density(
                        result.count, r, membrane.inner_radius_mm
                    ),
                )
            )
    return rows


def bundle_radius_for(
    fiber_count: int,
    fiber_radius_mm: float,
    membrane: MembraneSpec,
    density: float,
    bundle_model: str = "packing",
    fill_factor: float = DEFAULT_FILL_FACTOR,
    seed: int = 0,
) -> float:
    """Jammed bundle radius for a cell, by either bundle model."""
    if bundle_model not in BUNDLE_MODELS:
        raise InvalidArgumentError(f"bundle_model must be one of {BUNDLE_MODELS}")
    if bundle_model == "packing":
        return fiber_radius_mm * min_enclosing_ratio(fiber_count, seed=seed)
    if not (0.0 < fill_factor <= 1.0):
        raise InvalidArgumentError("fill factor must lie in (0, 1]")
    return membrane.inner_radius_mm * math.sqrt(density / fill_factor)


def sweep(
    grid: SweepGrid,
    length_mm: float | None = None,
    load_constant: float = DEFAULT_C1,
    bundle_model: str = "packing",
    fill_factor: float = DEFAULT_FILL_FACTOR,
    seed: int = 0,
) -> list[DesignPoint]:
    """Evaluate every grid cell; ordering is density-major, then diameter."""
    length = length_mm if length_mm is not None else grid.membrane.effective_length_mm
    if not (length > 0.0 and math.isfinite(length)):
        raise InvalidArgumentError("sweep length must be positive")
    membrane = replace(grid.membrane, effective_length_mm=length)
    points: list[DesignPoint] = []
    for density in grid.densities:
        for diameter in grid.fiber_diameters_mm:
            points.append(
                _evaluate_cell(
                    diameter,
                    density,
                    membrane,
                    grid,
                    load_constant,
                    bundle_model,
                    fill_factor,
                    seed,
                )
            )
    return points


def _evaluate_cell(
    diameter: float,
    density: float,
    membrane: MembraneSpec,
    grid: SweepGrid,
    load_constant: float,
    bundle_model: str,
    fill_factor: float,
    seed: int,
) -> DesignPoint:
    r = diameter / 2.0
    try:
        count = fiber_count_for_density(density, r, membrane.inner_radius_mm)
    except InvalidArgumentError as exc:
        return DesignPoint(diameter, density, None, None, None, False, str(exc))
    try:
        bundle_radius = bundle_radius_for(
            count, r, membrane, density, bundle_model, fill_factor, seed
        )
        if bundle_radius > membrane.inner_radius_mm * (1.0 + 1e-12):
            return DesignPoint(
                diameter,
                density,
                count,
                None,
                None,
                False,
                f"bundle radius {bundle_radius:.3f} mm exceeds the membrane",
            )
        config = FjmConfig(
            fiber=FiberSpec(radius_mm=r, youngs_modulus_mpa=grid.youngs_modulus_mpa),
            fiber_count=count,
            bundle_radius_mm=bundle_radius,
            membrane=membrane,
            load_constant=load_constant,
        )
        eps = epsilon_model(count, density, grid.friction)
        report = stiffness_report(config, eps)
    except InvalidArgumentError as exc:
        return DesignPoint(diameter, density, count, None, None, False, str(exc))
    return DesignPoint(diameter, density, count, config, report, True)


def select_optimal(points: list[DesignPoint], constraints: Constraints) -> DesignPoint:
    """Highest-variation feasible point under the constraints.

    Ties go to the larger jammed stiffness, then the smaller fiber count.
    """
    usable = [p for p in points if p.feasible and p.report is not None]
    if not usable:
        raise NoFeasibleDesignError("sweep produced no feasible design points")

    def excluded_by(p: DesignPoint) -> list[str]:
        reasons = []
        c = constraints
        if (
            c.min_jammed_stiffness_n_per_mm is not None
            and p.report.k_jammed_n_per_mm < c.min_jammed_stiffness_n_per_mm
        ):
            reasons.append("min_jammed_stiffness")
        if (
            c.min_variation_ratio is not None
            and p.report.zeta < c.min_variation_ratio
        ):
            reasons.append("min_variation_ratio")
        if c.max_density is not None and p.density > c.max_density:
            reasons.append("max_density")
        return reasons

    admitted: list[DesignPoint] = []
    exclusion_counts: dict[str, int] = {}
    for p in usable:
        reasons = excluded_by(p)
        if reasons:
            for r in reasons:
                exclusion_counts[r] = exclusion_counts.get(r, 0) + 1
        else:
            admitted.append(p)
    if not admitted:
        binding = sorted(exclusion_counts)
        raise NoFeasibleDesignError(
            "no design point satisfies the constraints; binding: "
            + ", ".join(binding),
            binding_constraints=binding,
        )
    return min(
        admitted,
        key=lambda p: (
            -p.report.zeta,
            -p.report.k_jammed_n_per_mm,
            p.fiber_count if p.fiber_count is not None else math.inf,
        ),
    )


# ---------------------------------------------------------------------------
# CSV output


def _fmt(value: float | int | None) -> str:
    if value is None:
        return "nan"
    return format(value, ".10g")


def write_sweep_csv(points: list[DesignPoint], target: str | Path | io.TextIOBase) -> None:
    """One row per cell under the fixed sweep header; nan for infeasible."""
    if isinstance(target, (str, Path)):
        with open(target, "w", newline="") as fh:
            write_sweep_csv(points, fh)
        return
    target.write(SWEEP_CSV_HEADER + "\n")
    writer = csv.writer(target, lineterminator="\n")
    for p in points:
        report = p.report
        writer.writerow(
            [
                _fmt(p.fiber_diameter_mm),
                _fmt(p.density),
                _fmt(p.fiber_count),
                _fmt(report.k_jammed_n_per_mm if report else None),
                _fmt(report.k_unjammed_n_per_mm if report else None),
                _fmt(report.zeta if report else None),
                _fmt(report.epsilon if report else None),
                "true" if p.feasible else "false",
            ]
        )


def write_table_csv(rows: list[TableRow], target: str | Path | io.TextIOBase) -> None:
    if isinstance(target, (str, Path)):
        with open(target, "w", newline="") as fh:
            write_table_csv(rows, fh)
        return
    target.write(TABLE_CSV_HEADER + "\n")
    writer = csv.writer(target, lineterminator="\n")
    for row in rows:
        writer.writerow(
            [
                _fmt(row.bundle_diameter_mm),
                _fmt(row.bundle_fraction),
                _fmt(row.fiber_diameter_mm),
                str(row.fiber_count),
                _fmt(row.density),
            ]
        )
