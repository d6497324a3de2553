"""Command-line front end: pack, predict, fit, calibrate, sweep, table.

Machine-readable output (JSON/CSV) goes to ``--out`` or stdout; human
summaries go to stderr. Exit codes: 0 success, 1 invalid input or I/O
failure, 2 infeasible or insufficient data.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import __version__
from .config import ToolConfig, default_config, validate_config
from .curves import CurveMeta, ForceDeflectionCurve
from .errors import (
    ConfigurationError,
    DegenerateCurveError,
    InsufficientDataError,
    InvalidArgumentError,
    MalformedCurveError,
    NoFeasibleDesignError,
    OutOfModelError,
)
from .explorer import (
    Constraints,
    SweepGrid,
    generate_table,
    select_optimal,
    sweep as run_sweep,
    write_sweep_csv,
    write_table_csv,
)
from .fitting import (
    aggregate_reports,
    calibrate_friction,
    compute_variation,
    fit_jammed,
    fit_unjammed,
)
from .geometry import max_fibers_in_circle
from .mechanics import (
    FjmConfig,
    JammingState,
    epsilon_model,
    predict_curve,
)


def _load_tool_config(path: str | None) -> ToolConfig:
    return validate_config(path) if path else default_config()


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=not text.endswith("\n"))


def _summary(message: str) -> None:
    click.echo(message, err=True)


@click.group()
@click.version_option(__version__, prog_name="fjmkit")
def cli() -> None:
    """Fiber jamming module design toolkit."""


# ---------------------------------------------------------------------------
# pack


@cli.command()
@click.option("--container-radius", type=float, required=True, help="Bundle radius, mm.")
@click.option("--fiber-radius", type=float, required=True, help="Fiber radius, mm.")
@click.option("--seed", type=int, default=None, help="Solver seed (default: config).")
@click.option("--config", "config_path", type=str, default=None)
@click.option("--out", type=str, default=None, help="Layout JSON path (default stdout).")
def pack(container_radius, fiber_radius, seed, config_path, out) -> None:
    """Pack as many fibers as the solver certifies into a circular bundle."""
    cfg = _load_tool_config(config_path)
    seed = cfg.seed if seed is None else seed
    result = max_fibers_in_circle(container_radius, fiber_radius, seed=seed)
    _emit(result.layout.to_json() + "\n", out)
    _summary(
        f"pack: seed={seed} count={result.count} "
        f"density={result.achieved_density:.4f}"
    )


# ---------------------------------------------------------------------------
# predict


@cli.command()
@click.option("--module", "module_path", type=str, required=True,
              help="FjmConfig JSON describing the module.")
@click.option("--state", type=click.Choice(["jammed", "unjammed"]), required=True)
@click.option("--epsilon", type=float, default=None,
              help="Friction coefficient (default: calibrated model).")
@click.option("--vacuum-kpa", type=float, default=None)
@click.option("--max-deflection", type=float, required=True, help="mm")
@click.option("--step", type=float, required=True, help="mm")
@click.option("--config", "config_path", type=str, default=None)
@click.option("--config-id", type=str, default=None)
@click.option("--out", type=str, default=None, help="Curve CSV path (default stdout).")
def predict(module_path, state, epsilon, vacuum_kpa, max_deflection, step,
            config_path, config_id, out) -> None:
    """Predict a force-deflection curve for one module."""
    cfg = _load_tool_config(config_path)
    module = _read_module(module_path)
    if epsilon is None:
        epsilon = epsilon_model(
            module.fiber_count, module.density, cfg.friction_model()
        )
    jam_state = (
        JammingState.jammed_at(vacuum_kpa)
        if state == "jammed" and vacuum_kpa is not None
        else JammingState(jammed=(state == "jammed"))
    )
    curve = predict_curve(
        module, jam_state, cfg.phases, epsilon, max_deflection, step,
        config_id=config_id,
    )
    if out:
        curve.to_csv(out)
    else:
        curve.to_csv(sys.stdout)
    _summary(
        f"predict: state={state} epsilon={epsilon:.4f} samples={len(curve)}"
    )


def _read_module(path: str) -> FjmConfig:
    try:
        payload = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InvalidArgumentError(f"module file {path} is not valid JSON: {exc}")
    return FjmConfig.from_dict(payload)


# ---------------------------------------------------------------------------
# fit


@cli.command()
@click.option("--curve", "curve_path", type=str, default=None, help="Curve CSV.")
@click.option("--state", type=click.Choice(["jammed", "unjammed"]), default=None)
@click.option("--manifest", "manifest_path", type=str, default=None,
              help="JSON manifest of runs: [{path, state, config_id, vacuum_pressure_kpa}]")
@click.option("--out", type=str, default=None, help="Report JSON path (default stdout).")
def fit(curve_path, state, manifest_path, out) -> None:
    """Extract stiffness slopes from measured curves."""
    if (curve_path is None) == (manifest_path is None):
        raise click.UsageError("pass exactly one of --curve (with --state) or --manifest")
    if curve_path is not None:
        if state is None:
            raise click.UsageError("--curve requires --state")
        curve = ForceDeflectionCurve.from_csv(curve_path, CurveMeta(state=state))
        report = fit_jammed(curve) if state == "jammed" else fit_unjammed(curve)
        _emit(json.dumps(report.to_dict(), indent=2) + "\n", out)
        _summary(
            f"fit: state={state} primary_slope={report.primary_slope_n_per_mm:.6g} "
            f"over_fed={report.over_fed}"
        )
        return
    payload = _fit_manifest(Path(manifest_path))
    _emit(json.dumps(payload, indent=2) + "\n", out)
    groups = payload["by_config"]
    _summary(f"fit: {len(payload['runs'])} runs, {len(groups)} configurations")


def _fit_manifest(path: Path) -> dict:
    try:
        entries = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise InvalidArgumentError(f"manifest {path} is not valid JSON: {exc}")
    if not isinstance(entries, list) or not entries:
        raise InvalidArgumentError("manifest must be a non-empty JSON list")
    seen_paths = set()
    runs = []
    grouped: dict[tuple[str | None, str], list] = {}
    for i, entry in enumerate(entries):
        try:
            curve_path = entry["path"]
            curve_state = entry["state"]
        except (TypeError, KeyError) as exc:
            raise InvalidArgumentError(f"manifest entry {i} missing {exc}")
        if curve_path in seen_paths:
            raise InvalidArgumentError(f"manifest lists {curve_path} twice")
        seen_paths.add(curve_path)
        meta = CurveMeta(
            state=curve_state,
            config_id=entry.get("config_id"),
            vacuum_pressure_kpa=entry.get("vacuum_pressure_kpa"),
        )
        resolved = Path(curve_path)
        if not resolved.is_absolute():
            resolved = path.parent / resolved
        curve = ForceDeflectionCurve.from_csv(resolved, meta)
        report = fit_jammed(curve) if curve_state == "jammed" else fit_unjammed(curve)
        runs.append({"path": curve_path, "state": curve_state,
                     "config_id": meta.config_id, "report": report.to_dict()})
        grouped.setdefault((meta.config_id, curve_state), []).append(report)

    by_config: dict[str, dict] = {}
    for (config_id, curve_state), reports in sorted(
        grouped.items(), key=lambda kv: (str(kv[0][0]), kv[0][1])
    ):
        key = config_id if config_id is not None else "default"
        agg = aggregate_reports(reports)
        by_config.setdefault(key, {})[curve_state] = agg.to_dict()
    for key, states in by_config.items():
        if "jammed" in states and "unjammed" in states:
            states["zeta"] = (
                states["jammed"]["primary_slope_n_per_mm"]
                / states["unjammed"]["primary_slope_n_per_mm"]
            )
    return {"runs": runs, "by_config": by_config}


# ---------------------------------------------------------------------------
# calibrate


@cli.command()
@click.option("--pairs", "pairs_path", type=str, required=True,
              help="JSON list of {config: FjmConfig, zeta_measured: float}.")
@click.option("--group-tolerance", type=float, default=0.02)
@click.option("--out", type=str, default=None, help="Model JSON path (default stdout).")
def calibrate(pairs_path, group_tolerance, out) -> None:
    """Fit the per-density friction model from measured variation ratios."""
    try:
        entries = json.loads(Path(pairs_path).read_text())
    except json.JSONDecodeError as exc:
        raise InvalidArgumentError(f"pairs file is not valid JSON: {exc}")
    if not isinstance(entries, list):
        raise InvalidArgumentError("pairs file must hold a JSON list")
    pairs = []
    for i, entry in enumerate(entries):
        try:
            pairs.append(
                (FjmConfig.from_dict(entry["config"]), float(entry["zeta_measured"]))
            )
        except (TypeError, KeyError, ValueError) as exc:
            raise InvalidArgumentError(f"pairs entry {i} malformed: {exc}")
    model = calibrate_friction(pairs, group_tolerance=group_tolerance)
    _emit(json.dumps(model.to_dict(), indent=2) + "\n", out)
    _summary(f"calibrate: {len(model.groups)} density group(s) from {len(pairs)} pairs")


# ---------------------------------------------------------------------------
# sweep


@cli.command()
@click.option("--config", "config_path", type=str, default=None)
@click.option("--diameters", type=str, default=None,
              help="Comma-separated fiber diameters, mm.")
@click.option("--densities", type=str, default=None,
              help="Comma-separated packing densities (fractions).")
@click.option("--length", type=float, default=None, help="Effective length, mm.")
@click.option("--c1", "load_constant", type=float, default=None)
@click.option("--bundle-model", type=click.Choice(["packing", "fill-factor"]),
              default=None)
@click.option("--min-jammed-stiffness", type=float, default=None)
@click.option("--min-variation-ratio", type=float, default=None)
@click.option("--max-density", type=float, default=None)
@click.option("--out", type=str, default=None, help="Sweep CSV path (default stdout).")
def sweep(config_path, diameters, densities, length, load_constant, bundle_model,
          min_jammed_stiffness, min_variation_ratio, max_density, out) -> None:
    """Sweep the diameter x density design space; optionally select a winner."""
    cfg = _load_tool_config(config_path)
    diameter_axis = _parse_axis(diameters, cfg.fiber_diameters_mm, "--diameters")
    density_axis = _parse_axis(densities, cfg.densities, "--densities")
    grid = SweepGrid(
        fiber_diameters_mm=diameter_axis,
        densities=density_axis,
        membrane=cfg.membrane,
        youngs_modulus_mpa=cfg.youngs_modulus_mpa,
        friction=cfg.friction_model(),
    )
    points = run_sweep(
        grid,
        length_mm=length,
        load_constant=load_constant if load_constant is not None else cfg.load_constant,
        bundle_model=bundle_model or cfg.bundle_model,
        fill_factor=cfg.fill_factor,
        seed=cfg.seed,
    )
    if out:
        write_sweep_csv(points, out)
    else:
        write_sweep_csv(points, sys.stdout)
    feasible = sum(1 for p in points if p.feasible)
    _summary(f"sweep: seed={cfg.seed} cells={len(points)} feasible={feasible}")
    if any(v is not None for v in
           (min_jammed_stiffness, min_variation_ratio, max_density)):
        best = select_optimal(points, Constraints(
            min_jammed_stiffness_n_per_mm=min_jammed_stiffness,
            min_variation_ratio=min_variation_ratio,
            max_density=max_density,
        ))
        _summary(
            f"optimal: fiber_diameter={best.fiber_diameter_mm} mm "
            f"density={best.density} zeta={best.report.zeta:.2f}"
        )


def _parse_axis(raw: str | None, fallback: tuple[float, ...], flag: str) -> tuple[float, ...]:
    if raw is None:
        return fallback
    parts = [p.strip() for p in raw.split(",")]
    values = []
    for p in parts:
        if not p:
            continue
        try:
            values.append(float(p))
        except ValueError:
            raise click.UsageError(f"{flag} holds a non-numeric entry: {p!r}")
    if not values:
        raise click.UsageError(f"{flag} must list at least one value")
    return tuple(values)


# ---------------------------------------------------------------------------
# table


@cli.command()
@click.option("--membrane-diameter", type=float, default=None,
              help="Membrane inner diameter, mm (default: config).")
@click.option("--fractions", type=str, default="0.95,0.85,0.75,0.65",
              help="Comma-separated bundle fractions of the membrane.")
@click.option("--diameters", type=str, default="0.3,0.4,0.5,0.6",
              help="Comma-separated fiber diameters, mm.")
@click.option("--config", "config_path", type=str, default=None)
@click.option("--out", type=str, default=None, help="Table CSV path (default stdout).")
def table(membrane_diameter, fractions, diameters, config_path, out) -> None:
    """Generate the fiber-count table for bundle fractions x fiber diameters."""
    cfg = _load_tool_config(config_path)
    membrane = cfg.membrane
    if membrane_diameter is not None:
        from dataclasses import replace

        membrane = replace(membrane, inner_radius_mm=membrane_diameter / 2.0)
    rows = generate_table(
        membrane,
        bundle_fractions=_parse_axis(fractions, (), "--fractions"),
        fiber_diameters_mm=_parse_axis(diameters, (), "--diameters"),
        seed=cfg.seed,
    )
    if out:
        write_table_csv(rows, out)
    else:
        write_table_csv(rows, sys.stdout)
    _summary(f"table: seed={cfg.seed} rows={len(rows)}")


# ---------------------------------------------------------------------------
# entry point


def main(argv: list[str] | None = None) -> int:
    """Dispatch a subcommand and map exceptions to exit codes."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.UsageError as exc:
        exc.show()
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except (InvalidArgumentError, MalformedCurveError, ConfigurationError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except (
        NoFeasibleDesignError,
        InsufficientDataError,
        DegenerateCurveError,
        OutOfModelError,
    ) as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except OSError as exc:
        click.echo(f"I/O error: {exc}", err=True)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
