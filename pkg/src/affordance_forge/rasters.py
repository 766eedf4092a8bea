"""Shared raster value types: binary masks and scalar context images."""

from __future__ import annotations

from enum import Enum

import numpy as np

__all__ = ["BinaryMask", "ContextKind", "ContextImage"]


class BinaryMask:
    """Immutable H x W boolean grid tied to an image of the same size."""

    __slots__ = ("_bits",)

    def __init__(self, bits: np.ndarray):
        arr = np.asarray(bits)
        if arr.ndim != 2:
            raise ValueError(f"mask must be 2D, got shape {arr.shape}")
        arr = arr.astype(bool, copy=True)
        arr.setflags(write=False)
        self._bits = arr

    @property
    def bits(self) -> np.ndarray:
        return self._bits

    @property
    def width(self) -> int:
        return self._bits.shape[1]

    @property
    def height(self) -> int:
        return self._bits.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self._bits.shape  # (H, W)

    def area(self) -> int:
        return int(self._bits.sum())

    def is_empty(self) -> bool:
        return not self._bits.any()

    def centroid(self) -> tuple[float, float]:
        """(x, y) centroid of the set pixels. Raises on an empty mask."""
        if self.is_empty():
            raise ValueError("centroid of an empty mask is undefined")
        rows, cols = np.nonzero(self._bits)
        return (float(cols.mean()), float(rows.mean()))

    def union(self, other: "BinaryMask") -> "BinaryMask":
        self._check_same_shape(other)
        return BinaryMask(self._bits | other._bits)

    def intersects(self, other: "BinaryMask") -> bool:
        self._check_same_shape(other)
        return bool((self._bits & other._bits).any())

    def _check_same_shape(self, other: "BinaryMask") -> None:
        if self.shape != other.shape:
            raise ValueError(f"mask shape mismatch: {self.shape} vs {other.shape}")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BinaryMask):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self._bits, other._bits))

    def __hash__(self) -> int:
        return hash((self.shape, self._bits.tobytes()))

    def __repr__(self) -> str:
        return f"BinaryMask({self.width}x{self.height}, area={self.area()})"


class ContextKind(str, Enum):
    SOFT_EDGE = "soft_edge"
    DEPTH = "depth"
    SEG_MASK = "seg_mask"


class ContextImage:
    """Immutable H x W scalar guidance map with values in [0, 1]."""

    __slots__ = ("_values", "_kind")

    def __init__(self, values: np.ndarray, kind: ContextKind):
        arr = np.asarray(values, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError(f"context must be 2D, got shape {arr.shape}")
        if not np.isfinite(arr).all():
            raise ValueError("context values must be finite")
        if arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
            raise ValueError("context values must lie in [0, 1]")
        arr = arr.copy()
        arr.setflags(write=False)
        self._values = arr
        self._kind = ContextKind(kind)

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def kind(self) -> ContextKind:
        return self._kind

    @property
    def width(self) -> int:
        return self._values.shape[1]

    @property
    def height(self) -> int:
        return self._values.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self._values.shape

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ContextImage):
            return NotImplemented
        return self._kind == other._kind and bool(np.array_equal(self._values, other._values))

    def __hash__(self) -> int:
        return hash((self._kind, self.shape, self._values.tobytes()))

    def __repr__(self) -> str:
        return f"ContextImage({self.width}x{self.height}, kind={self._kind.value})"
