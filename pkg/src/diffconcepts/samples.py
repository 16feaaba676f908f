"""Bundled example curves."""

from __future__ import annotations

import math

import numpy as np

from diffconcepts.encoder import SampleSeries
from diffconcepts.sensor import AttributeSelection, Point, Polyline

WORKED_EXAMPLE = (
    # (width, angle) per sample
    (0.00, -65.85),
    (0.05, -65.85),
    (0.10, -65.85),
    (0.15, -46.42),
    (0.20, -7.57),
    (0.26, 31.28),
    (0.30, 50.71),
    (0.36, 50.71),
    (0.43, 50.71),
    (0.50, 50.71),
    (0.50, 50.71),
    (0.50, 50.71),
    (0.50, 74.56),
    (0.50, 122.27),
    (0.50, 169.98),
    (0.50, 193.84),
    (0.50, 193.84),
)

SENSOR_COMBINATIONS = tuple(
    AttributeSelection(chosen)
    for chosen in (
        ("angle",),
        ("angle", "width"),
        ("angle", "x", "y"),
        ("angle", "x"),
        ("angle", "y"),
        ("angle", "width", "x", "y"),
    )
)

# Whole-curve width patterns. All have four runs and differ pairwise, so none
# is a sub-pattern of another.
WIDTH_PATTERNS = {
    "a": "<=>=",
    "b": "<>=<",
    "c": ">=<=",
    "d": "><=>",
    "e": "=<>=",
    "f": "=><>",
    "g": "<><>",
    "h": "><><",
}

SEGMENTS_PER_RUN = 4
WIDTH_STEP = 0.05


def worked_example() -> SampleSeries:
    """The 17-sample width/angle series of the worked example."""
    return SampleSeries("worked-example", ("w", "a"), np.array(WORKED_EXAMPLE))


def _axis(shape: int, t: float, amplitude: float) -> tuple[float, float]:
    if shape == 0:
        return 4 * t, -amplitude * math.sin(math.pi * t)
    if shape == 1:
        return 4 * t, amplitude * math.sin(2 * math.pi * t)
    if shape == 2:
        return 4 * t, 2 * t + amplitude * 0.3 * math.sin(3 * math.pi * t)
    return 4 * t, amplitude * 0.5 * math.sin(4 * math.pi * t)


def _widths(pattern: str) -> list[float]:
    widths = [1.0]
    for symbol in pattern:
        for _ in range(SEGMENTS_PER_RUN):
            if symbol == ">":
                widths.append(widths[-1] + WIDTH_STEP)
            elif symbol == "<":
                widths.append(widths[-1] - WIDTH_STEP)
            else:
                widths.append(widths[-1])
    return widths


def synthetic_family() -> list[Polyline]:
    """Eight curves flowing left to right, in four visually similar pairs.

    Pairs (a,b), (c,d), (e,f) and (g,h) share an axis shape with a slightly
    different amplitude; every curve has its own width pattern.
    """
    curves = []
    for index, (name, pattern) in enumerate(WIDTH_PATTERNS.items()):
        shape, variant = divmod(index, 2)
        amplitude = 1.0 + 0.15 * variant
        widths = _widths(pattern)
        last = len(widths) - 1
        points = []
        for i, width in enumerate(widths):
            x, y = _axis(shape, i / last, amplitude)
            points.append(Point(x, y, width))
        curves.append(Polyline(name, tuple(points)))
    return curves
