"""Force-deflection curves and their CSV representation.

The on-disk format is one sample per row under the exact header
``deflection_mm,force_N``, deflections strictly increasing.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidArgumentError, MalformedCurveError

CSV_HEADER = ("deflection_mm", "force_N")

JAMMED = "jammed"
UNJAMMED = "unjammed"
VALID_STATES = (JAMMED, UNJAMMED)


@dataclass(frozen=True)
class CurveMeta:
    """Provenance of a measured or predicted curve."""

    state: str | None = None
    config_id: str | None = None
    vacuum_pressure_kpa: float | None = None

    def __post_init__(self):
        if self.state is not None and self.state not in VALID_STATES:
            raise InvalidArgumentError(
                f"state must be one of {VALID_STATES}, got {self.state!r}"
            )
        p = self.vacuum_pressure_kpa
        if p is not None and not (0.0 <= p <= 101.325):
            raise InvalidArgumentError(
                "vacuum pressure must lie in [0, 101.325] kPa"
            )


@dataclass(frozen=True)
class ForceDeflectionCurve:
    """Ordered (deflection mm, force N) samples with optional metadata."""

    deflection_mm: np.ndarray
    force_n: np.ndarray
    metadata: CurveMeta = field(default_factory=CurveMeta)

    def __post_init__(self):
        y = np.atleast_1d(np.asarray(self.deflection_mm, dtype=float))
        f = np.atleast_1d(np.asarray(self.force_n, dtype=float))
        if y.ndim != 1 or f.ndim != 1 or len(y) != len(f):
            raise MalformedCurveError("deflection and force must be equal-length 1-D")
        if len(y) == 0:
            raise MalformedCurveError("curve holds no samples")
        if not np.isfinite(y).all():
            raise MalformedCurveError("deflections contain non-finite values")
        if not np.isfinite(f).all():
            raise MalformedCurveError("forces contain non-finite values")
        if y[0] < 0.0:
            raise MalformedCurveError("first deflection must be >= 0")
        if len(y) > 1 and not (np.diff(y) > 0.0).all():
            raise MalformedCurveError("deflections must be strictly increasing")
        y.flags.writeable = False
        f.flags.writeable = False
        object.__setattr__(self, "deflection_mm", y)
        object.__setattr__(self, "force_n", f)

    def __len__(self) -> int:
        return len(self.deflection_mm)

    @property
    def samples(self) -> list[tuple[float, float]]:
        return list(zip(self.deflection_mm.tolist(), self.force_n.tolist()))

    def with_metadata(self, metadata: CurveMeta) -> "ForceDeflectionCurve":
        return ForceDeflectionCurve(self.deflection_mm, self.force_n, metadata)

    def to_csv(self, target: str | Path | io.TextIOBase) -> None:
        if isinstance(target, (str, Path)):
            with open(target, "w", newline="") as fh:
                self._write(fh)
        else:
            self._write(target)

    def _write(self, fh) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for y, f in zip(self.deflection_mm, self.force_n):
            writer.writerow([format(y, ".10g"), format(f, ".10g")])

    @classmethod
    def from_csv(
        cls, source: str | Path | io.TextIOBase, metadata: CurveMeta | None = None
    ) -> "ForceDeflectionCurve":
        if isinstance(source, (str, Path)):
            with open(source, newline="") as fh:
                return cls._read(fh, metadata)
        return cls._read(source, metadata)

    @classmethod
    def _read(cls, fh, metadata: CurveMeta | None) -> "ForceDeflectionCurve":
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedCurveError("empty curve file") from None
        if tuple(h.strip() for h in header) != CSV_HEADER:
            raise MalformedCurveError(
                f"curve header must be {','.join(CSV_HEADER)!r}, got {header!r}"
            )
        ys: list[float] = []
        fs: list[float] = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                y, f = float(row[0]), float(row[1])
            except (IndexError, ValueError) as exc:
                raise MalformedCurveError(f"bad sample on line {lineno}") from exc
            if not (math.isfinite(y) and math.isfinite(f)):
                raise MalformedCurveError(f"non-finite sample on line {lineno}")
            ys.append(y)
            fs.append(f)
        return cls(np.array(ys), np.array(fs), metadata or CurveMeta())
