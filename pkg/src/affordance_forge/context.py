"""Context images that guide inpainting: soft edges, depth, segmentation masks.

The soft-edge map is the default guidance signal. It is a classical,
deterministic extractor (Gaussian pre-smooth, per-channel Scharr gradients,
channel-max magnitude, 99th-percentile normalization) so the pipeline needs
no learned model; deployments that want a learned edge detector can route
through the model gateway instead.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from .rasters import BinaryMask, ContextImage, ContextKind

__all__ = [
    "DegenerateImageError",
    "compute_soft_edge",
    "compute_depth_context",
    "compute_mask_context",
    "masked_context",
]


class DegenerateImageError(ValueError):
    pass


_SCHARR_X = np.array([[-3.0, 0.0, 3.0], [-10.0, 0.0, 10.0], [-3.0, 0.0, 3.0]])
_SCHARR_Y = _SCHARR_X.T

_PRESMOOTH_SIGMA = 1.0
_NORM_PERCENTILE = 99.0

# Filter arithmetic on a constant image leaves ~1e-15 residue; anything this
# far below the smallest real 8-bit gradient response (~2.5e-4) is noise.
_NOISE_FLOOR = 1e-9


def compute_soft_edge(rgb: np.ndarray) -> ContextImage:
    """Edge-strength map in [0, 1] from an 8-bit RGB image."""
    rgb = np.asarray(rgb)
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise ValueError(f"expected HxWx3 RGB array, got shape {rgb.shape}")
    height, width = rgb.shape[:2]
    if height < 3 or width < 3:
        raise DegenerateImageError(f"image {width}x{height} too small for 3x3 stencils")

    channels = rgb.astype(np.float64) / 255.0
    strength = np.zeros((height, width), dtype=np.float64)
    for k in range(3):
        smooth = ndimage.gaussian_filter(channels[:, :, k], sigma=_PRESMOOTH_SIGMA, mode="reflect")
        gx = ndimage.convolve(smooth, _SCHARR_X, mode="reflect")
        gy = ndimage.convolve(smooth, _SCHARR_Y, mode="reflect")
        np.maximum(strength, np.hypot(gx, gy), out=strength)

    strength[strength < _NOISE_FLOOR] = 0.0
    scale = max(float(np.percentile(strength, _NORM_PERCENTILE)), np.finfo(np.float64).eps)
    values = np.clip(strength / scale, 0.0, 1.0)
    return ContextImage(values, ContextKind.SOFT_EDGE)


def compute_depth_context(depth_m: np.ndarray, mask: BinaryMask) -> ContextImage:
    """Min-max normalized depth under the mask, inverted so nearer is brighter.

    Non-positive or non-finite depth readings under the mask are treated as
    sensor holes and excluded; a constant-depth region maps to 0.5.
    """
    depth_m = np.asarray(depth_m, dtype=np.float64)
    if depth_m.ndim != 2:
        raise ValueError(f"depth must be 2D, got shape {depth_m.shape}")
    if depth_m.shape != mask.shape:
        raise ValueError(f"depth shape {depth_m.shape} != mask shape {mask.shape}")
    if mask.is_empty():
        raise ValueError("depth context needs a non-empty mask")

    valid = mask.bits & np.isfinite(depth_m) & (depth_m > 0)
    if not valid.any():
        raise ValueError("no valid depth readings under the mask")
    d_min = float(depth_m[valid].min())
    d_max = float(depth_m[valid].max())

    values = np.zeros(mask.shape, dtype=np.float64)
    if d_max == d_min:
        values[valid] = 0.5
    else:
        values[valid] = (d_max - depth_m[valid]) / (d_max - d_min)
    return ContextImage(values, ContextKind.DEPTH)


def compute_mask_context(mask: BinaryMask) -> ContextImage:
    """Indicator image: 1.0 on the mask, 0.0 elsewhere."""
    return ContextImage(mask.bits.astype(np.float64), ContextKind.SEG_MASK)


def masked_context(context: ContextImage, mask: BinaryMask) -> ContextImage:
    """Pixelwise product of a context image with a mask indicator."""
    if context.shape != mask.shape:
        raise ValueError(f"context shape {context.shape} != mask shape {mask.shape}")
    return ContextImage(context.values * mask.bits, context.kind)
