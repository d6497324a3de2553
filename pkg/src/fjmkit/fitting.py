"""Slope, knee, and friction extraction from measured force-deflection curves.

The jammed curve of a module shows a stiff straight pre-slip segment whose
gradient is the jammed stiffness; the unjammed curve is a single soft line
unless the module is over-fed, in which case an initial stiff segment must be
skipped. Knees between segments are located by an exhaustive two-segment
continuous least-squares search over sample positions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .curves import JAMMED, UNJAMMED, ForceDeflectionCurve
from .errors import (
    DegenerateCurveError,
    InsufficientDataError,
    InvalidArgumentError,
)
from .mechanics import FjmConfig, FrictionGroup, FrictionModel, estimate_epsilon

MIN_SAMPLES = 8          # 4 per segment keeps both regressions stable
MIN_SEGMENT = 4
SSE_REDUCTION = 0.20     # two segments must beat one line by this much
OVER_FED_RATIO = 5.0     # initial/post-knee slope ratio marking an over-fed run


@dataclass(frozen=True)
class CurveFitReport:
    """Fitted slopes for one curve; slopes in N/mm, knee and region in mm."""

    primary_slope_n_per_mm: float
    secondary_slope_n_per_mm: float | None
    knee_mm: float | None
    over_fed: bool
    residual_rms_n: float
    region_mm: tuple[float, float]

    def __post_init__(self):
        if self.primary_slope_n_per_mm < 0.0:
            raise InvalidArgumentError("primary slope must be >= 0")
        if (
            self.secondary_slope_n_per_mm is not None
            and self.secondary_slope_n_per_mm < 0.0
        ):
            raise InvalidArgumentError("secondary slope must be >= 0")
        if self.residual_rms_n < 0.0:
            raise InvalidArgumentError("residual RMS must be >= 0")
        if self.region_mm[0] > self.region_mm[1]:
            raise InvalidArgumentError("fit region is inverted")

    def to_dict(self) -> dict:
        return {
            "primary_slope_n_per_mm": self.primary_slope_n_per_mm,
            "secondary_slope_n_per_mm": self.secondary_slope_n_per_mm,
            "knee_mm": self.knee_mm,
            "over_fed": self.over_fed,
            "residual_rms_n": self.residual_rms_n,
            "region_mm": list(self.region_mm),
        }


# ---------------------------------------------------------------------------
# Regression helpers


def _line_fit(y: np.ndarray, f: np.ndarray) -> tuple[float, float, float]:
    """Least-squares line f = a + m*y; returns (slope, intercept, sse)."""
    design = np.column_stack([np.ones_like(y), y])
    coef, *_ = np.linalg.lstsq(design, f, rcond=None)
    resid = f - design @ coef
    return float(coef[1]), float(coef[0]), float(resid @ resid)


def _two_segment_sse(y: np.ndarray, f: np.ndarray, knee: float) -> float:
    """SSE of the best continuous two-segment line broken at ``knee``."""
    design = np.column_stack(
        [np.ones_like(y), np.minimum(y, knee), np.maximum(y - knee, 0.0)]
    )
    coef, *_ = np.linalg.lstsq(design, f, rcond=None)
    resid = f - design @ coef
    return float(resid @ resid)


def detect_knee(curve: ForceDeflectionCurve) -> float | None:
    """Breakpoint of the best two-segment continuous fit, if it earns it.

    Returns None when a single line explains the curve almost as well (less
    than a 20% squared-error reduction) or fits it exactly.
    """
    y = curve.deflection_mm
    f = curve.force_n
    n = len(y)
    if n < MIN_SAMPLES:
        raise InsufficientDataError(
            f"knee detection needs at least {MIN_SAMPLES} samples, got {n}"
        )
    _, _, sse1 = _line_fit(y, f)
    scale = float(np.abs(f).max()) or 1.0
    if sse1 <= (1e-10 * scale) ** 2 * n:
        return None  # already a perfect line
    best_knee = None
    best_sse = math.inf
    for i in range(MIN_SEGMENT - 1, n - MIN_SEGMENT):
        knee = float(y[i])
        sse = _two_segment_sse(y, f, knee)
        if sse < best_sse:
            best_sse, best_knee = sse, knee
    if best_knee is None or best_sse > (1.0 - SSE_REDUCTION) * sse1:
        return None
    return best_knee


# ---------------------------------------------------------------------------
# Curve fits


def _require_state(curve: ForceDeflectionCurve, state: str) -> None:
    if curve.metadata.state != state:
        raise InvalidArgumentError(
            f"curve must be marked {state!r}, got {curve.metadata.state!r}"
        )


def _knee_or_none(curve: ForceDeflectionCurve) -> float | None:
    if len(curve) < MIN_SAMPLES:
        return None
    return detect_knee(curve)


def fit_jammed(curve: ForceDeflectionCurve) -> CurveFitReport:
    """Pre-slip gradient of a jammed curve (post-knee gradient when found)."""
    _require_state(curve, JAMMED)
    y, f = curve.deflection_mm, curve.force_n
    knee = _knee_or_none(curve)
    if knee is None:
        slope, _, sse = _line_fit(y, f)
        return CurveFitReport(
            primary_slope_n_per_mm=max(slope, 0.0),
            secondary_slope_n_per_mm=None,
            knee_mm=None,
            over_fed=False,
            residual_rms_n=math.sqrt(sse / len(y)),
            region_mm=(float(y[0]), float(y[-1])),
        )
    pre = y <= knee
    post = y >= knee
    slope_pre, _, sse_pre = _line_fit(y[pre], f[pre])
    slope_post, _, _ = _line_fit(y[post], f[post])
    return CurveFitReport(
        primary_slope_n_per_mm=max(slope_pre, 0.0),
        secondary_slope_n_per_mm=max(slope_post, 0.0),
        knee_mm=knee,
        over_fed=False,
        residual_rms_n=math.sqrt(sse_pre / int(pre.sum())),
        region_mm=(float(y[0]), knee),
    )


def fit_unjammed(curve: ForceDeflectionCurve) -> CurveFitReport:
    """Soft-phase gradient of an unjammed curve, skipping over-fed segments.

    An initial segment at least five times stiffer than the rest marks an
    over-fed module; its samples are excluded from the primary slope.
    """
    _require_state(curve, UNJAMMED)
    y, f = curve.deflection_mm, curve.force_n
    knee = _knee_or_none(curve)
    if knee is not None:
        pre = y <= knee
        post = y >= knee
        slope_initial, _, _ = _line_fit(y[pre], f[pre])
        slope_post, _, sse_post = _line_fit(y[post], f[post])
        if slope_post > 0.0 and slope_initial >= OVER_FED_RATIO * slope_post:
            return CurveFitReport(
                primary_slope_n_per_mm=slope_post,
                secondary_slope_n_per_mm=max(slope_initial, 0.0),
                knee_mm=knee,
                over_fed=True,
                residual_rms_n=math.sqrt(sse_post / int(post.sum())),
                region_mm=(knee, float(y[-1])),
            )
    slope, _, sse = _line_fit(y, f)
    return CurveFitReport(
        primary_slope_n_per_mm=max(slope, 0.0),
        secondary_slope_n_per_mm=None,
        knee_mm=None,
        over_fed=False,
        residual_rms_n=math.sqrt(sse / len(y)),
        region_mm=(float(y[0]), float(y[-1])),
    )


def compute_variation(
    jammed: CurveFitReport, unjammed: CurveFitReport
) -> float:
    """Variation ratio zeta from two fitted curves."""
    if unjammed.primary_slope_n_per_mm <= 0.0:
        raise DegenerateCurveError("unjammed primary slope is not positive")
    if jammed.primary_slope_n_per_mm <= 0.0:
        raise DegenerateCurveError("jammed primary slope is not positive")
    return jammed.primary_slope_n_per_mm / unjammed.primary_slope_n_per_mm


def aggregate_reports(reports: Sequence[CurveFitReport]) -> CurveFitReport:
    """Median aggregation across repeated runs of one configuration."""
    if not reports:
        raise InsufficientDataError("no reports to aggregate")
    primary = float(np.median([r.primary_slope_n_per_mm for r in reports]))
    secondaries = [
        r.secondary_slope_n_per_mm
        for r in reports
        if r.secondary_slope_n_per_mm is not None
    ]
    knees = [r.knee_mm for r in reports if r.knee_mm is not None]
    over_fed_votes = sum(1 for r in reports if r.over_fed)
    return CurveFitReport(
        primary_slope_n_per_mm=primary,
        secondary_slope_n_per_mm=float(np.median(secondaries)) if secondaries else None,
        knee_mm=float(np.median(knees)) if knees else None,
        over_fed=over_fed_votes * 2 >= len(reports) and over_fed_votes > 0,
        residual_rms_n=float(np.median([r.residual_rms_n for r in reports])),
        region_mm=(
            min(r.region_mm[0] for r in reports),
            max(r.region_mm[1] for r in reports),
        ),
    )


# ---------------------------------------------------------------------------
# Friction calibration


def calibrate_friction(
    pairs: Iterable[tuple[FjmConfig, float]],
    group_tolerance: float = 0.02,
    scale_slope_with_density: bool = True,
) -> FrictionModel:
    """Fit per-density lines eps = a + b*N from measured variation ratios.

    Configurations are grouped by packing density (absolute tolerance
    ``group_tolerance``); each group needs at least two pairs with distinct
    fiber counts. The regression target is the unclamped inversion of the
    variation ratio, so out-of-model measurements keep their leverage.
    """
    items = sorted(
        ((cfg.density, cfg, zeta) for cfg, zeta in pairs), key=lambda t: t[0]
    )
    if not items:
        raise InsufficientDataError("no calibration pairs given")
    groups: list[list[tuple[float, FjmConfig, float]]] = []
    for item in items:
        if groups and item[0] - groups[-1][0][0] <= group_tolerance:
            groups[-1].append(item)
        else:
            groups.append([item])

    fitted: list[FrictionGroup] = []
    for members in groups:
        densities = [m[0] for m in members]
        rep_density = float(np.mean(densities))
        if len(members) < 2:
            raise InsufficientDataError(
                f"density group at {rep_density:.3f} has fewer than 2 pairs"
            )
        counts = np.array([m[1].fiber_count for m in members], dtype=float)
        eps = np.array(
            [
                estimate_epsilon(
                    zeta, cfg.bundle_radius_mm, cfg.fiber_count, cfg.fiber.radius_mm
                ).raw
                for _, cfg, zeta in members
            ]
        )
        if np.ptp(counts) == 0.0:
            raise InsufficientDataError(
                f"density group at {rep_density:.3f} needs two distinct fiber counts"
            )
        design = np.column_stack([np.ones_like(counts), counts])
        coef, *_ = np.linalg.lstsq(design, eps, rcond=None)
        fitted.append(
            FrictionGroup(
                density=rep_density,
                intercept=float(coef[0]),
                slope_per_fiber=float(coef[1]),
            )
        )
    return FrictionModel(
        groups=tuple(fitted), scale_slope_with_density=scale_slope_with_density
    )
