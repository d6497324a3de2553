"""Circle packing for fiber bundles: counts, layouts, and packing density.

Answers the two geometric questions behind module sizing: how many fibers of
radius ``r`` fit inside a circular chamber of radius ``R``, and how small a
chamber ``n`` fibers need. Layouts returned by this module are certified:
they satisfy the non-overlap and containment invariants at relative
tolerance ``REL_TOL``.

Counts and enclosing ratios come from a frozen solver table bundled with the
package (built once by ``scripts/build_packing_table.py`` using the engine in
``_packing``); queries beyond the table fall back to the live solver.
"""

from __future__ import annotations

import bisect
import json
import math
from dataclasses import dataclass
from importlib import resources

import numpy as np

from . import _packing
from .errors import InvalidArgumentError

REL_TOL = 1e-9
HEX_BOUND = math.pi / math.sqrt(12.0)


# ---------------------------------------------------------------------------
# Domain types


@dataclass(frozen=True)
class CirclePackingLayout:
    """Explicit centers of equal circles inside a circular container (mm)."""

    container_radius: float
    circle_radius: float
    centers: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if not (self.circle_radius > 0.0 and math.isfinite(self.circle_radius)):
            raise InvalidArgumentError("circle_radius must be positive and finite")
        if not (self.container_radius > 0.0 and math.isfinite(self.container_radius)):
            raise InvalidArgumentError("container_radius must be positive and finite")
        errors = self.check()
        if errors:
            raise InvalidArgumentError("invalid layout: " + "; ".join(errors))

    @property
    def count(self) -> int:
        return len(self.centers)

    def center_array(self) -> np.ndarray:
        return np.asarray(self.centers, dtype=float).reshape(-1, 2)

    def check(self) -> list[str]:
        """Certification: containment and pairwise separation at REL_TOL."""
        errors: list[str] = []
        c = self.center_array()
        if len(c) == 0:
            return ["layout holds no circles"]
        if not np.isfinite(c).all():
            return ["centers contain non-finite coordinates"]
        reach = self.container_radius - self.circle_radius
        norms = np.linalg.norm(c, axis=1)
        slack = reach + REL_TOL * self.container_radius
        if norms.max() > slack:
            errors.append(
                f"center at norm {norms.max():.12g} exceeds reach {reach:.12g}"
            )
        if len(c) > 1:
            dmin = _packing.min_pair_distance(c)
            if dmin < 2.0 * self.circle_radius * (1.0 - REL_TOL):
                errors.append(
                    f"pair distance {dmin:.12g} below diameter "
                    f"{2.0 * self.circle_radius:.12g}"
                )
        return errors

    def scaled(self, factor: float) -> "CirclePackingLayout":
        if factor <= 0.0:
            raise InvalidArgumentError("scale factor must be positive")
        return CirclePackingLayout(
            container_radius=self.container_radius * factor,
            circle_radius=self.circle_radius * factor,
            centers=tuple((x * factor, y * factor) for x, y in self.centers),
        )

    def to_dict(self) -> dict:
        return {
            "container_radius": self.container_radius,
            "circle_radius": self.circle_radius,
            "centers": [[x, y] for x, y in self.centers],
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, data: dict) -> "CirclePackingLayout":
        try:
            return cls(
                container_radius=float(data["container_radius"]),
                circle_radius=float(data["circle_radius"]),
                centers=tuple((float(x), float(y)) for x, y in data["centers"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidArgumentError(f"malformed layout payload: {exc}") from exc


@dataclass(frozen=True)
class PackingResult:
    """Certified fiber count with its layout and in-container density."""

    count: int
    layout: CirclePackingLayout
    achieved_density: float

    def __post_init__(self):
        if self.count != self.layout.count:
            raise InvalidArgumentError("count does not match layout size")
        expected = (
            self.count
            * self.layout.circle_radius**2
            / self.layout.container_radius**2
        )
        if not math.isclose(self.achieved_density, expected, rel_tol=1e-12):
            raise InvalidArgumentError("achieved_density inconsistent with layout")
        if self.count >= 2 and self.achieved_density > HEX_BOUND + 1e-9:
            raise InvalidArgumentError(
                f"density {self.achieved_density:.6f} above hexagonal bound"
            )


# ---------------------------------------------------------------------------
# Frozen solver table

_TABLE: dict[int, tuple[float, np.ndarray]] | None = None
_TABLE_RATIOS: list[float] = []


def _load_table() -> dict[int, tuple[float, np.ndarray]]:
    global _TABLE, _TABLE_RATIOS
    if _TABLE is None:
        path = resources.files("fjmkit").joinpath("data/packings.json")
        raw = json.loads(path.read_text())
        table = {
            int(n): (float(entry["ratio"]), np.asarray(entry["centers"], dtype=float))
            for n, entry in raw["layouts"].items()
        }
        _TABLE = dict(sorted(table.items()))
        _TABLE_RATIOS = [_TABLE[n][0] for n in sorted(_TABLE)]
    return _TABLE


def table_max_count() -> int:
    return max(_load_table())


# ---------------------------------------------------------------------------
# Operations


def packing_density(n: int, fiber_radius: float, membrane_radius: float) -> float:
    """Cross-sectional area fraction n*r^2 / R^2 of fibers in the chamber."""
    if n < 0 or int(n) != n:
        raise InvalidArgumentError("fiber count must be a non-negative integer")
    _require_positive_finite(fiber_radius, "fiber_radius")
    _require_positive_finite(membrane_radius, "membrane_radius")
    density = n * fiber_radius**2 / membrane_radius**2
    if density > 1.0:
        raise InvalidArgumentError(
            f"packing density {density:.4f} exceeds 1; fibers cannot fit"
        )
    return density


def fiber_count_for_density(
    target_density: float, fiber_radius: float, membrane_radius: float
) -> int:
    """Fiber count whose packing density rounds closest to the target."""
    if not (0.0 < target_density <= HEX_BOUND):
        raise InvalidArgumentError(
            f"target density must lie in (0, {HEX_BOUND:.4f}]"
        )
    _require_positive_finite(fiber_radius, "fiber_radius")
    _require_positive_finite(membrane_radius, "membrane_radius")
    count = round(target_density * membrane_radius**2 / fiber_radius**2)
    if count == 0:
        raise InvalidArgumentError(
            "no whole fiber reaches the target density; fiber too large"
        )
    return int(count)


def min_enclosing_ratio(n: int, seed: int = 0) -> float:
    """Smallest container/fiber radius ratio the solver achieves for n fibers."""
    if n < 1 or int(n) != n:
        raise InvalidArgumentError("fiber count must be a positive integer")
    n = int(n)
    table = _load_table()
    if n in table:
        return table[n][0]
    ratio, _ = _packing.pack_min_ratio(n, seed=seed, effort=_packing.LIVE_EFFORT)
    return ratio


def enclosing_layout(n: int, fiber_radius: float = 1.0, seed: int = 0) -> CirclePackingLayout:
    """Certified layout of n fibers in the smallest container the solver has."""
    if n < 1 or int(n) != n:
        raise InvalidArgumentError("fiber count must be a positive integer")
    _require_positive_finite(fiber_radius, "fiber_radius")
    n = int(n)
    table = _load_table()
    if n in table:
        ratio, centers = table[n]
    else:
        ratio, centers = _packing.pack_min_ratio(
            n, seed=seed, effort=_packing.LIVE_EFFORT
        )
    return CirclePackingLayout(
        container_radius=ratio * fiber_radius,
        circle_radius=fiber_radius,
        centers=tuple(
            (x * fiber_radius, y * fiber_radius) for x, y in centers
        ),
    )


def max_fibers_in_circle(
    container_radius: float, fiber_radius: float, seed: int = 0
) -> PackingResult:
    """Largest certified fiber count for the given chamber and fiber size.

    Deterministic for a fixed seed; the seed only matters for queries beyond
    the frozen table.
    """
    _require_positive_finite(container_radius, "container_radius")
    _require_positive_finite(fiber_radius, "fiber_radius")
    if container_radius < fiber_radius:
        raise InvalidArgumentError(
            "container_radius must be at least fiber_radius"
        )
    target = container_radius / fiber_radius
    limit = target * (1.0 + REL_TOL)

    table = _load_table()
    ns = sorted(table)
    count = 0
    centers = None
    idx = bisect.bisect_right(_TABLE_RATIOS, limit)
    if idx > 0:
        count = ns[idx - 1]
        centers = table[count][1]

    if count == ns[-1]:
        count, centers = _search_beyond_table(count, centers, target, seed)

    if count == 0 or centers is None:
        raise InvalidArgumentError(
            "container cannot certify a single fiber"  # unreachable: ratio >= 1
        )
    layout = CirclePackingLayout(
        container_radius=container_radius,
        circle_radius=fiber_radius,
        centers=tuple(
            (x * fiber_radius, y * fiber_radius) for x, y in centers
        ),
    )
    density = count * fiber_radius**2 / container_radius**2
    return PackingResult(count=count, layout=layout, achieved_density=density)


def _search_beyond_table(
    count: int, centers: np.ndarray, target: float, seed: int
) -> tuple[int, np.ndarray]:
    """Extend the table answer upward with the live solver."""
    while True:
        trial = count + 1
        placed = _packing.fit_in_container(
            trial, target, seed=seed + trial, effort=_packing.LIVE_EFFORT
        )
        if placed is None:
            return count, centers
        count, centers = trial, placed


def _require_positive_finite(value: float, name: str) -> None:
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
        raise InvalidArgumentError(f"{name} must be positive and finite")
