"""Pixel points and the 0-999 integer coordinate grid used for text I/O.

Pixel coordinates are continuous: ``x`` is the column, ``y`` the row, with the
origin at the top-left pixel center. Normalized coordinates are integers on a
1000-bin grid per axis; normalization floors ``coord / dim * 1000`` and clamps
to [0, 999], denormalization returns the bin center so that a round trip is
exact for every valid normalized pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "GRID",
    "CoordinateBoundsError",
    "PixelPoint",
    "NormalizedCoord",
    "normalize_point",
    "denormalize_point",
]

GRID = 1000


class CoordinateBoundsError(ValueError):
    """A point lies outside the image it is bound to."""


@dataclass(frozen=True)
class PixelPoint:
    """Continuous 2D image location (column ``x``, row ``y``)."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"pixel point must be finite, got ({self.x}, {self.y})")

    def in_bounds(self, width: int, height: int) -> bool:
        return 0.0 <= self.x < width and 0.0 <= self.y < height

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class NormalizedCoord:
    """Integer coordinates on the ``GRID`` x ``GRID`` text-output grid."""

    nx: int
    ny: int

    def __post_init__(self) -> None:
        for name, value in (("nx", self.nx), ("ny", self.ny)):
            if not isinstance(value, int) or isinstance(value, bool):
                raise TypeError(f"{name} must be an int, got {value!r}")
            if not 0 <= value < GRID:
                raise ValueError(f"{name}={value} outside [0, {GRID - 1}]")


def _check_dims(width: int, height: int) -> None:
    if width < 1 or height < 1:
        raise ValueError(f"image dimensions must be >= 1, got {width}x{height}")


def normalize_point(p: PixelPoint, width: int, height: int) -> NormalizedCoord:
    """Map a pixel point to integer grid coordinates.

    Raises :class:`CoordinateBoundsError` if the point is outside the image.
    """
    _check_dims(width, height)
    if not p.in_bounds(width, height):
        raise CoordinateBoundsError(
            f"point ({p.x}, {p.y}) outside image bounds {width}x{height}"
        )
    nx = min(max(math.floor(p.x / width * GRID), 0), GRID - 1)
    ny = min(max(math.floor(p.y / height * GRID), 0), GRID - 1)
    return NormalizedCoord(nx, ny)


def denormalize_point(n: NormalizedCoord, width: int, height: int) -> PixelPoint:
    """Map grid coordinates back to the center of their pixel bin."""
    _check_dims(width, height)
    x = (n.nx + 0.5) / GRID * width
    y = (n.ny + 0.5) / GRID * height
    return PixelPoint(x, y)
