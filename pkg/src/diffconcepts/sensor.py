"""Series ingestion and sensor attribute derivation.

A polyline is read at its points; each point yields one sample with the
direction of travel (``a``), the stroke width (``w``) and the coordinates
(``x``, ``y``).
"""

from __future__ import annotations

import csv
import io
import json
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from diffconcepts.core import validate_attribute_name
from diffconcepts.encoder import SampleSeries
from diffconcepts.errors import (
    DerivationError,
    InvalidArgumentError,
    InvalidValueError,
    ParseError,
    SchemaError,
)

SENSOR_ATTRIBUTES = ("angle", "width", "x", "y")
SENSOR_SYMBOLS = {"angle": "a", "width": "w", "x": "x", "y": "y"}
_ALIASES = {
    **{name: name for name in SENSOR_ATTRIBUTES},
    **{symbol: name for name, symbol in SENSOR_SYMBOLS.items()},
}


@dataclass(frozen=True)
class Point:
    x: float
    y: float
    width: float


@dataclass(frozen=True)
class Polyline:
    """A curve axis with a stroke width at each point."""

    name: str
    points: tuple[Point, ...]

    def __post_init__(self):
        points = tuple(self.points)
        if not points:
            raise InvalidArgumentError("a polyline needs at least one point")
        for index, point in enumerate(points):
            for field in ("x", "y", "width"):
                if not math.isfinite(getattr(point, field)):
                    raise InvalidValueError(f"point {index} has a non-finite {field}")
            if point.width < 0:
                raise InvalidValueError(f"point {index} has a negative width")
        object.__setattr__(self, "points", points)

    def __len__(self) -> int:
        return len(self.points)

    def coordinates(self) -> np.ndarray:
        """Array of shape ``(n, 3)`` with columns x, y, width."""
        return np.array([(p.x, p.y, p.width) for p in self.points], dtype=float)


@dataclass(frozen=True)
class AttributeSelection:
    """Ordered, duplicate-free subset of the sensor attributes."""

    chosen: tuple[str, ...]

    def __post_init__(self):
        chosen = tuple(self.chosen)
        if not chosen:
            raise SchemaError("select at least one sensor attribute")
        unknown = [name for name in chosen if name not in SENSOR_ATTRIBUTES]
        if unknown:
            raise SchemaError(
                f"unknown sensor attribute(s) {unknown}; "
                f"choose from {', '.join(SENSOR_ATTRIBUTES)}"
            )
        if len(set(chosen)) != len(chosen):
            raise SchemaError(f"duplicate sensor attributes in {list(chosen)}")
        object.__setattr__(self, "chosen", chosen)

    @classmethod
    def parse(cls, text: str) -> AttributeSelection:
        """Parse ``"angle,x"``; the short names ``a`` and ``w`` are accepted."""
        names = [item.strip().lower() for item in text.split(",") if item.strip()]
        unknown = [name for name in names if name not in _ALIASES]
        if unknown:
            raise SchemaError(
                f"unknown sensor attribute(s) {unknown}; "
                f"choose from {', '.join(SENSOR_ATTRIBUTES)}"
            )
        return cls(tuple(_ALIASES[name] for name in names))

    @property
    def symbols(self) -> tuple[str, ...]:
        """Series attribute names for the selection (``a``, ``w``, ``x``, ``y``)."""
        return tuple(SENSOR_SYMBOLS[name] for name in self.chosen)


def parse_series_csv(text: str, name: str = "series") -> SampleSeries:
    """Parse a header-plus-rows CSV table into a series.

    Blank lines are skipped. Rows and columns in error messages are 1-based
    and count the header as row 1.
    """
    try:
        rows = list(csv.reader(io.StringIO(text.lstrip("\ufeff"))))
    except csv.Error as exc:
        raise ParseError(f"malformed CSV: {exc}") from exc

    numbered = [(number, row) for number, row in enumerate(rows, start=1) if row]
    if not numbered:
        raise ParseError("empty input")

    header_row, header = numbered[0]
    attributes = [cell.strip() for cell in header]
    for column, attribute in enumerate(attributes, start=1):
        try:
            validate_attribute_name(attribute)
        except InvalidArgumentError as exc:
            raise ParseError(str(exc), row=header_row, column=column) from None
        if attribute in attributes[: column - 1]:
            raise ParseError(
                f"duplicate column {attribute!r}", row=header_row, column=column
            )

    values = []
    for number, row in numbered[1:]:
        if len(row) != len(attributes):
            raise ParseError(
                f"expected {len(attributes)} cells, got {len(row)}", row=number
            )
        parsed = []
        for column, cell in enumerate(row, start=1):
            try:
                value = float(cell.strip())
            except ValueError:
                raise ParseError(
                    f"non-numeric cell {cell!r}", row=number, column=column
                ) from None
            if not math.isfinite(value):
                raise ParseError(
                    f"non-finite cell {cell!r}", row=number, column=column
                )
            parsed.append(value)
        values.append(parsed)

    if not values:
        raise ParseError("empty body")
    return SampleSeries(name, tuple(attributes), np.array(values, dtype=float))


def format_series_csv(series: SampleSeries) -> str:
    """Render a series as CSV; floats use their shortest round-trip form."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(series.attributes)
    for row in series.values.tolist():
        writer.writerow([repr(float(value)) for value in row])
    return buffer.getvalue()


def _number(value: object, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"{where} must be a number, got {value!r}")
    if not math.isfinite(value):
        raise ParseError(f"{where} must be finite, got {value!r}")
    return float(value)


def parse_polyline_json(text: str) -> Polyline:
    """Parse ``{"name": ..., "points": [{"x": .., "y": .., "w": ..}, ...]}``."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"invalid JSON: {exc.msg}", row=exc.lineno, column=exc.colno
        ) from exc

    if not isinstance(data, dict):
        raise ParseError("expected a JSON object")
    name = data.get("name")
    if not isinstance(name, str) or not name:
        raise ParseError("missing or empty field 'name'")
    points = data.get("points")
    if not isinstance(points, list):
        raise ParseError("missing field 'points' (a list)")
    if not points:
        raise ParseError("'points' must not be empty")

    parsed = []
    for index, point in enumerate(points):
        if not isinstance(point, dict):
            raise ParseError(f"points[{index}] must be an object")
        missing = [key for key in ("x", "y", "w") if key not in point]
        if missing:
            raise ParseError(f"points[{index}] is missing {', '.join(missing)}")
        width = _number(point["w"], f"points[{index}].w")
        if width < 0:
            raise ParseError(f"points[{index}].w must be non-negative")
        parsed.append(
            Point(
                _number(point["x"], f"points[{index}].x"),
                _number(point["y"], f"points[{index}].y"),
                width,
            )
        )
    return Polyline(name, tuple(parsed))


def format_polyline_json(polyline: Polyline) -> str:
    return json.dumps(
        {
            "name": polyline.name,
            "points": [{"x": p.x, "y": p.y, "w": p.width} for p in polyline.points],
        },
        indent=2,
    )


def resample_uniform(polyline: Polyline, step: float) -> Polyline:
    """Re-read the polyline at points ``step`` apart in arc length.

    x, y and width are interpolated linearly; the original end points are kept.
    """
    if not math.isfinite(step) or step <= 0:
        raise InvalidArgumentError(f"step must be positive, got {step!r}")
    if len(polyline) < 2:
        raise InvalidArgumentError("resampling needs at least two points")

    coords = polyline.coordinates()
    lengths = np.hypot(np.diff(coords[:, 0]), np.diff(coords[:, 1]))
    keep = np.concatenate(([True], lengths > 0))
    coords = coords[keep]
    arc = np.concatenate(([0.0], np.cumsum(lengths[lengths > 0])))
    total = float(arc[-1])
    first, last = polyline.points[0], polyline.points[-1]
    if total == 0:
        return Polyline(polyline.name, (first, last))

    n_full = int(math.floor(total / step))
    distances = step * np.arange(n_full + 1, dtype=float)
    if total - distances[-1] > 1e-9 * step:
        distances = np.append(distances, total)
    else:
        distances[-1] = total

    xs = np.interp(distances, arc, coords[:, 0])
    ys = np.interp(distances, arc, coords[:, 1])
    ws = np.interp(distances, arc, coords[:, 2])
    points = [Point(x, y, w) for x, y, w in zip(xs.tolist(), ys.tolist(), ws.tolist())]
    points[0], points[-1] = first, last
    return Polyline(polyline.name, tuple(points))


def unwrap_angles(angles: Sequence[float]) -> list[float]:
    """Shift each angle by whole turns so successive steps stay within 180°."""
    values = np.asarray(angles, dtype=float)
    if values.size == 0:
        return []
    if not np.isfinite(values).all():
        raise InvalidValueError("angles must be finite")
    return np.unwrap(values, period=360.0).tolist()


def _directions(coords: np.ndarray) -> list[float] | None:
    dx = np.diff(coords[:, 0])
    dy = np.diff(coords[:, 1])
    moving = (dx != 0) | (dy != 0)
    if not moving.any():
        return None
    raw = np.degrees(np.arctan2(dy, dx))
    # zero-length segments keep the previous heading; leading ones take the first
    source = np.maximum.accumulate(np.where(moving, np.arange(moving.size), -1))
    source[source < 0] = int(np.argmax(moving))
    return raw[source].tolist()


def derive_series(polyline: Polyline, selection: AttributeSelection) -> SampleSeries:
    """One sample per point with the selected sensor attributes.

    The angle at point ``i`` is the unwrapped heading in degrees, measured
    from the positive x-axis, towards point ``i+1``; the last point repeats
    the previous heading.
    """
    coords = polyline.coordinates()
    columns: dict[str, np.ndarray] = {
        "x": coords[:, 0],
        "y": coords[:, 1],
        "width": coords[:, 2],
    }
    if "angle" in selection.chosen:
        if len(polyline) < 2:
            raise DerivationError(
                f"polyline {polyline.name!r} has a single point; "
                "the angle needs at least two"
            )
        directions = _directions(coords)
        if directions is None:
            raise DerivationError(
                f"polyline {polyline.name!r} never moves; "
                "all of its points coincide"
            )
        angles = unwrap_angles(directions)
        columns["angle"] = np.array([*angles, angles[-1]], dtype=float)

    values = np.column_stack([columns[name] for name in selection.chosen])
    return SampleSeries(polyline.name, selection.symbols, values)
