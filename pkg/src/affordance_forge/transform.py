"""Seeded geometric transforms applied coherently to masks, contexts and keypoints.

A transform is a similarity map (scale, rotation, translation about a pivot)
optionally followed by a smooth elastic displacement field. The same spec is
applied to an object's segmentation mask (nearest-neighbor), its masked
context image (bilinear) and its annotated keypoints (exact closed form plus
field lookup), which is what keeps synthetic keypoint labels consistent with
the inpainted imagery.

Forward point map: ``p' = R_theta * s * (p - center) + center + translation``,
then ``p'' = p' + E(p')`` where ``E`` is the dense elastic field. Raster
warping uses the inverse map (fixed-point inversion of the elastic step), so
masks stay binary and context values stay convex combinations of inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import ndimage

from .core.coords import PixelPoint
from .rasters import BinaryMask, ContextImage

__all__ = [
    "InvalidTransformConfigError",
    "OutOfFrameError",
    "MaskOutOfFrameError",
    "SimilarityParams",
    "ElasticParams",
    "TransformSpec",
    "TransformConfig",
    "sample_transform",
    "identity_spec",
    "similarity_matrix",
    "invert_similarity",
    "apply_to_point",
    "apply_to_points_array",
    "apply_to_mask",
    "apply_to_context",
    "compose_inpaint_region",
    "check_placement",
    "spec_to_json",
    "spec_from_json",
]

_ELASTIC_INVERSE_ITERS = 4


class InvalidTransformConfigError(ValueError):
    pass


class OutOfFrameError(ValueError):
    """A transformed point left the image bounds."""


class MaskOutOfFrameError(ValueError):
    """A transformed mask has no pixels left inside the frame."""


@dataclass(frozen=True)
class SimilarityParams:
    """Uniform scale + rotation about ``center``, then translation (pixels)."""

    scale: float
    rotation: float
    translation: tuple[float, float]
    center: PixelPoint

    def __post_init__(self) -> None:
        if not (math.isfinite(self.scale) and self.scale > 0):
            raise ValueError(f"scale must be finite and > 0, got {self.scale}")
        if not math.isfinite(self.rotation):
            raise ValueError("rotation must be finite")
        dx, dy = self.translation
        if not (math.isfinite(dx) and math.isfinite(dy)):
            raise ValueError("translation must be finite")
        object.__setattr__(self, "translation", (float(dx), float(dy)))

    @property
    def is_identity(self) -> bool:
        return (
            self.scale == 1.0
            and self.rotation == 0.0
            and self.translation == (0.0, 0.0)
        )


@dataclass(frozen=True)
class ElasticParams:
    """Coarse seeded displacement grid, densified per image and smoothed.

    ``displacements`` holds the raw coarse samples (row-major, two components
    per control point). The dense field is the bilinear upsampling of the
    grid to ``field_size``, Gaussian-smoothed with ``smoothing_sigma`` and
    rescaled so the maximum displacement magnitude equals ``magnitude_alpha``.
    """

    grid_shape: tuple[int, int]  # (rows, cols) of control points
    displacements: tuple[float, ...]
    smoothing_sigma: float
    magnitude_alpha: float
    field_size: tuple[int, int]  # (width, height) of the owning image

    def __post_init__(self) -> None:
        rows, cols = self.grid_shape
        if rows < 2 or cols < 2:
            raise ValueError("elastic grid needs at least 2x2 control points")
        if len(self.displacements) != rows * cols * 2:
            raise ValueError(
                f"expected {rows * cols * 2} displacement values, got {len(self.displacements)}"
            )
        if not all(math.isfinite(v) for v in self.displacements):
            raise ValueError("displacements must be finite")
        if self.smoothing_sigma < 0 or not math.isfinite(self.smoothing_sigma):
            raise ValueError("smoothing_sigma must be finite and >= 0")
        if self.magnitude_alpha < 0 or not math.isfinite(self.magnitude_alpha):
            raise ValueError("magnitude_alpha must be finite and >= 0")
        w, h = self.field_size
        if w < 1 or h < 1:
            raise ValueError("field_size must be positive")
        object.__setattr__(self, "displacements", tuple(float(v) for v in self.displacements))


@dataclass(frozen=True)
class TransformSpec:
    """A fully sampled transform; reproducible from its stored parameters."""

    similarity: SimilarityParams
    elastic: ElasticParams | None
    seed: int

    @property
    def is_identity(self) -> bool:
        return self.similarity.is_identity and self.elastic is None


@dataclass(frozen=True)
class TransformConfig:
    """Sampling ranges for :func:`sample_transform`.

    Translation bounds are in pixels; ``image_size`` is required when elastic
    distortion is enabled because the dense field spans the image.
    """

    scale_range: tuple[float, float] = (0.75, 1.25)
    rotation_range: tuple[float, float] = (-math.pi / 6, math.pi / 6)
    translation_range: tuple[float, float] = (-48.0, 48.0)
    elastic_enabled: bool = False
    elastic_alpha: float = 8.0
    elastic_sigma: float = 12.0
    elastic_grid: tuple[int, int] = (8, 8)
    image_size: tuple[int, int] | None = None

    def __post_init__(self) -> None:
        s_min, s_max = self.scale_range
        if s_min <= 0 or s_min > s_max or not (math.isfinite(s_min) and math.isfinite(s_max)):
            raise InvalidTransformConfigError(f"invalid scale range {self.scale_range}")
        r_min, r_max = self.rotation_range
        if r_min > r_max:
            raise InvalidTransformConfigError(f"invalid rotation range {self.rotation_range}")
        t_min, t_max = self.translation_range
        if t_min > t_max:
            raise InvalidTransformConfigError(f"invalid translation range {self.translation_range}")
        if self.elastic_enabled:
            if self.image_size is None:
                raise InvalidTransformConfigError("elastic distortion requires image_size")
            if self.elastic_alpha < 0 or self.elastic_sigma < 0:
                raise InvalidTransformConfigError("elastic alpha and sigma must be >= 0")
            rows, cols = self.elastic_grid
            if rows < 2 or cols < 2:
                raise InvalidTransformConfigError("elastic grid must be at least 2x2")

    @classmethod
    def defaults_for_image(
        cls, width: int, height: int, elastic: bool = True
    ) -> "TransformConfig":
        """Default ranges scaled to the image: translation <= 15% of the short side."""
        bound = 0.15 * min(width, height)
        return cls(
            translation_range=(-bound, bound),
            elastic_enabled=elastic,
            image_size=(width, height),
        )

    @classmethod
    def identity(cls) -> "TransformConfig":
        return cls(
            scale_range=(1.0, 1.0),
            rotation_range=(0.0, 0.0),
            translation_range=(0.0, 0.0),
            elastic_enabled=False,
        )


def identity_spec(center: PixelPoint = PixelPoint(0.0, 0.0), seed: int = 0) -> TransformSpec:
    return TransformSpec(
        similarity=SimilarityParams(1.0, 0.0, (0.0, 0.0), center),
        elastic=None,
        seed=seed,
    )


def sample_transform(
    config: TransformConfig, seed: int, center: PixelPoint = PixelPoint(0.0, 0.0)
) -> TransformSpec:
    """Draw a transform uniformly from the configured ranges.

    Deterministic in ``(config, seed, center)``; the pivot is supplied by the
    caller (the orchestrator uses the object mask centroid).
    """
    rng = np.random.default_rng(seed)
    scale = float(rng.uniform(*config.scale_range))
    rotation = float(rng.uniform(*config.rotation_range))
    dx = float(rng.uniform(*config.translation_range))
    dy = float(rng.uniform(*config.translation_range))
    similarity = SimilarityParams(scale, rotation, (dx, dy), center)

    elastic = None
    if config.elastic_enabled:
        rows, cols = config.elastic_grid
        coarse = rng.normal(0.0, 1.0, size=(rows, cols, 2))
        elastic = ElasticParams(
            grid_shape=(rows, cols),
            displacements=tuple(float(v) for v in coarse.ravel()),
            smoothing_sigma=config.elastic_sigma,
            magnitude_alpha=config.elastic_alpha,
            field_size=config.image_size,  # type: ignore[arg-type]
        )
    return TransformSpec(similarity=similarity, elastic=elastic, seed=seed)


def similarity_matrix(params: SimilarityParams) -> np.ndarray:
    """3x3 homogeneous matrix equal to the forward similarity map."""
    c, s = math.cos(params.rotation), math.sin(params.rotation)
    a = params.scale * c
    b = params.scale * s
    cx, cy = params.center.x, params.center.y
    dx, dy = params.translation
    # x' = a(x-cx) - b(y-cy) + cx + dx ; y' = b(x-cx) + a(y-cy) + cy + dy
    return np.array(
        [
            [a, -b, -a * cx + b * cy + cx + dx],
            [b, a, -b * cx - a * cy + cy + dy],
            [0.0, 0.0, 1.0],
        ]
    )


def invert_similarity(params: SimilarityParams) -> SimilarityParams:
    """Similarity params of the exact inverse map (same pivot)."""
    inv_scale = 1.0 / params.scale
    c, s = math.cos(-params.rotation), math.sin(-params.rotation)
    dx, dy = params.translation
    tx = -inv_scale * (c * dx - s * dy)
    ty = -inv_scale * (s * dx + c * dy)
    return SimilarityParams(inv_scale, -params.rotation, (tx, ty), params.center)


# The smoothed field is very low-frequency (sigma defaults to 12 px), so it is
# built and sampled at reduced resolution; bilinear sampling of the capped
# grid is a convex combination, keeping every displacement <= alpha.
_FIELD_SUBSAMPLE = 4


@lru_cache(maxsize=64)
def _elastic_field_grid(elastic: ElasticParams) -> np.ndarray:
    """(h, w, 2) displacement field at 1/_FIELD_SUBSAMPLE resolution:
    bilinear-upsampled control grid, Gaussian-smoothed, rescaled to alpha."""
    width, height = elastic.field_size
    rows, cols = elastic.grid_shape
    coarse = np.array(elastic.displacements, dtype=np.float64).reshape(rows, cols, 2)

    h = max(2, -(-height // _FIELD_SUBSAMPLE))
    w = max(2, -(-width // _FIELD_SUBSAMPLE))
    # Control points sit at cell centers of a rows x cols tiling of the image.
    ys = ((np.arange(h) + 0.5) * height / h) * rows / height - 0.5
    xs = ((np.arange(w) + 0.5) * width / w) * cols / width - 0.5
    grid_y, grid_x = np.meshgrid(ys, xs, indexing="ij")
    sigma = elastic.smoothing_sigma * h / height
    field = np.empty((h, w, 2), dtype=np.float64)
    for k in range(2):
        field[:, :, k] = ndimage.map_coordinates(
            coarse[:, :, k], [grid_y, grid_x], order=1, mode="nearest"
        )
        if sigma > 0:
            field[:, :, k] = ndimage.gaussian_filter(field[:, :, k], sigma=sigma, mode="nearest")
    magnitude = np.hypot(field[:, :, 0], field[:, :, 1])
    peak = float(magnitude.max())
    if peak > 0.0:
        field *= elastic.magnitude_alpha / peak
    else:
        field[:] = 0.0
    field.setflags(write=False)
    return field


def _sample_field(
    elastic: ElasticParams, xs: np.ndarray, ys: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Bilinear displacement lookup at continuous image coordinates."""
    field = _elastic_field_grid(elastic)
    width, height = elastic.field_size
    h, w = field.shape[:2]
    gy = (np.asarray(ys, np.float64) + 0.5) * h / height - 0.5
    gx = (np.asarray(xs, np.float64) + 0.5) * w / width - 0.5
    dx = ndimage.map_coordinates(field[:, :, 0], [gy, gx], order=1, mode="nearest")
    dy = ndimage.map_coordinates(field[:, :, 1], [gy, gx], order=1, mode="nearest")
    return dx, dy


def _similarity_forward(params: SimilarityParams, xs: np.ndarray, ys: np.ndarray):
    if params.scale == 1.0 and params.rotation == 0.0:
        # pure translation: skip the pivot arithmetic so shifts are exact
        return xs + params.translation[0], ys + params.translation[1]
    c, s = math.cos(params.rotation), math.sin(params.rotation)
    rel_x = xs - params.center.x
    rel_y = ys - params.center.y
    out_x = params.scale * (c * rel_x - s * rel_y) + params.center.x + params.translation[0]
    out_y = params.scale * (s * rel_x + c * rel_y) + params.center.y + params.translation[1]
    return out_x, out_y


def apply_to_points_array(
    spec: TransformSpec, xs: np.ndarray, ys: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized forward map for arrays of x and y coordinates."""
    if spec.is_identity:
        return np.array(xs, dtype=np.float64), np.array(ys, dtype=np.float64)
    out_x, out_y = _similarity_forward(spec.similarity, np.asarray(xs, np.float64), np.asarray(ys, np.float64))
    if spec.elastic is not None:
        dx, dy = _sample_field(spec.elastic, out_x, out_y)
        out_x = out_x + dx
        out_y = out_y + dy
    return out_x, out_y


def apply_to_point(
    spec: TransformSpec,
    p: PixelPoint,
    bounds: tuple[int, int] | None = None,
    out_of_bounds: str = "reject",
) -> PixelPoint:
    """Forward-map one point; exact identity when the spec is the identity.

    With ``bounds=(width, height)``, a result outside the image is rejected
    (:class:`OutOfFrameError`) or clamped, per ``out_of_bounds``.
    """
    if spec.is_identity:
        result = p
    else:
        xs, ys = apply_to_points_array(spec, np.array([p.x]), np.array([p.y]))
        result = PixelPoint(float(xs[0]), float(ys[0]))
    if bounds is not None and not result.in_bounds(*bounds):
        if out_of_bounds == "reject":
            raise OutOfFrameError(
                f"transformed point ({result.x:.2f}, {result.y:.2f}) outside {bounds[0]}x{bounds[1]}"
            )
        if out_of_bounds == "clamp":
            width, height = bounds
            result = PixelPoint(
                min(max(result.x, 0.0), width - 1.0),
                min(max(result.y, 0.0), height - 1.0),
            )
        else:
            raise ValueError(f"unknown out_of_bounds policy {out_of_bounds!r}")
    return result


def _inverse_map_grid(
    spec: TransformSpec, out_x: np.ndarray, out_y: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Continuous input locations whose forward image is the given output grid."""
    u_x, u_y = out_x, out_y
    if spec.elastic is not None:
        u_x = np.array(out_x, dtype=np.float64)
        u_y = np.array(out_y, dtype=np.float64)
        for _ in range(_ELASTIC_INVERSE_ITERS):
            dx, dy = _sample_field(spec.elastic, u_x, u_y)
            u_x = out_x - dx
            u_y = out_y - dy
    inv = invert_similarity(spec.similarity)
    return _similarity_forward(inv, u_x, u_y)


def _forward_bbox(
    spec: TransformSpec, mask: BinaryMask, pad: float
) -> tuple[int, int, int, int] | None:
    """Clipped output-space bounding box (r0, r1, c0, c1) covering h(mask)."""
    rows, cols = np.nonzero(mask.bits)
    r_min, r_max = rows.min(), rows.max()
    c_min, c_max = cols.min(), cols.max()
    corner_x = np.array([c_min, c_max, c_min, c_max], dtype=np.float64)
    corner_y = np.array([r_min, r_min, r_max, r_max], dtype=np.float64)
    fx, fy = _similarity_forward(spec.similarity, corner_x, corner_y)
    margin = pad + (spec.elastic.magnitude_alpha if spec.elastic is not None else 0.0)
    c0 = int(math.floor(fx.min() - margin))
    c1 = int(math.ceil(fx.max() + margin)) + 1
    r0 = int(math.floor(fy.min() - margin))
    r1 = int(math.ceil(fy.max() + margin)) + 1
    c0, c1 = max(c0, 0), min(c1, mask.width)
    r0, r1 = max(r0, 0), min(r1, mask.height)
    if c0 >= c1 or r0 >= r1:
        return None
    return (r0, r1, c0, c1)


def apply_to_mask(spec: TransformSpec, mask: BinaryMask) -> BinaryMask:
    """Warp a binary mask by inverse mapping with nearest-neighbor sampling."""
    if mask.is_empty():
        raise ValueError("cannot transform an empty mask")
    if spec.is_identity:
        return BinaryMask(mask.bits)
    bbox = _forward_bbox(spec, mask, pad=2.0)
    out = np.zeros(mask.shape, dtype=bool)
    if bbox is not None:
        r0, r1, c0, c1 = bbox
        grid_y, grid_x = np.meshgrid(
            np.arange(r0, r1, dtype=np.float64),
            np.arange(c0, c1, dtype=np.float64),
            indexing="ij",
        )
        in_x, in_y = _inverse_map_grid(spec, grid_x, grid_y)
        ci = np.rint(in_x).astype(np.int64)
        ri = np.rint(in_y).astype(np.int64)
        valid = (ci >= 0) & (ci < mask.width) & (ri >= 0) & (ri < mask.height)
        hit = np.zeros_like(valid)
        hit[valid] = mask.bits[ri[valid], ci[valid]]
        out[r0:r1, c0:c1] = hit
    if not out.any():
        raise MaskOutOfFrameError("transformed mask left the frame entirely")
    return BinaryMask(out)


def apply_to_context(
    spec: TransformSpec,
    masked_context: ContextImage,
    mask: BinaryMask | None = None,
) -> ContextImage:
    """Warp a masked scalar field with bilinear sampling.

    ``masked_context`` must already be zero outside the object mask. When
    ``mask`` is supplied the result is zeroed exactly outside the warped mask,
    matching :func:`apply_to_mask` support.
    """
    if mask is not None and mask.shape != masked_context.shape:
        raise ValueError("mask and context dimensions differ")
    if spec.is_identity:
        if mask is not None:
            return ContextImage(masked_context.values * mask.bits, masked_context.kind)
        return ContextImage(masked_context.values, masked_context.kind)

    height, width = masked_context.shape
    support = mask if mask is not None else BinaryMask(masked_context.values > 0)
    if support.is_empty():
        return ContextImage(np.zeros_like(masked_context.values), masked_context.kind)
    bbox = _forward_bbox(spec, support, pad=3.0)
    out = np.zeros_like(masked_context.values)
    if bbox is None:
        raise MaskOutOfFrameError("transformed context left the frame entirely")
    r0, r1, c0, c1 = bbox
    grid_y, grid_x = np.meshgrid(
        np.arange(r0, r1, dtype=np.float64),
        np.arange(c0, c1, dtype=np.float64),
        indexing="ij",
    )
    in_x, in_y = _inverse_map_grid(spec, grid_x, grid_y)
    patch = ndimage.map_coordinates(
        masked_context.values, [in_y, in_x], order=1, mode="constant", cval=0.0
    )
    out[r0:r1, c0:c1] = patch
    np.clip(out, 0.0, 1.0, out=out)
    if mask is not None:
        warped = apply_to_mask(spec, mask)
        out *= warped.bits
    return ContextImage(out, masked_context.kind)


def compose_inpaint_region(mask: BinaryMask, spec: TransformSpec) -> BinaryMask:
    """Union of the original footprint and the transformed silhouette.

    If the transform pushed the silhouette fully out of frame the region
    degenerates to the original footprint alone.
    """
    try:
        warped = apply_to_mask(spec, mask)
    except MaskOutOfFrameError:
        return BinaryMask(mask.bits)
    return mask.union(warped)


def _dilate(mask: BinaryMask, margin: int) -> np.ndarray:
    if margin <= 0:
        return mask.bits
    r = int(margin)
    yy, xx = np.mgrid[-r : r + 1, -r : r + 1]
    footprint = (xx * xx + yy * yy) <= r * r
    return ndimage.binary_dilation(mask.bits, structure=footprint)


def check_placement(
    spec: TransformSpec,
    mask: BinaryMask,
    other_masks: list[BinaryMask],
    margin: int = 0,
) -> bool:
    """Accept iff the transformed mask stays in frame and clears other objects.

    Rejection criteria: any set pixel of the mask forward-maps out of frame,
    or the warped silhouette dilated by ``margin`` touches any other mask.
    """
    for other in other_masks:
        if other.shape != mask.shape:
            raise ValueError("masks must share dimensions")
    rows, cols = np.nonzero(mask.bits)
    fx, fy = apply_to_points_array(spec, cols.astype(np.float64), rows.astype(np.float64))
    if (
        (fx < 0.0).any()
        or (fx > mask.width - 1.0).any()
        or (fy < 0.0).any()
        or (fy > mask.height - 1.0).any()
    ):
        return False
    try:
        warped = apply_to_mask(spec, mask)
    except MaskOutOfFrameError:
        return False
    dilated = _dilate(warped, margin)
    for other in other_masks:
        if (dilated & other.bits).any():
            return False
    return True


def spec_to_json(spec: TransformSpec) -> dict:
    """JSON-serializable dict that reproduces the spec bit-exactly."""
    doc: dict = {
        "seed": spec.seed,
        "similarity": {
            "scale": spec.similarity.scale,
            "rotation": spec.similarity.rotation,
            "translation": list(spec.similarity.translation),
            "center": [spec.similarity.center.x, spec.similarity.center.y],
        },
        "elastic": None,
    }
    if spec.elastic is not None:
        doc["elastic"] = {
            "grid_shape": list(spec.elastic.grid_shape),
            "displacements": list(spec.elastic.displacements),
            "smoothing_sigma": spec.elastic.smoothing_sigma,
            "magnitude_alpha": spec.elastic.magnitude_alpha,
            "field_size": list(spec.elastic.field_size),
        }
    return doc


def spec_from_json(doc: dict) -> TransformSpec:
    sim = doc["similarity"]
    similarity = SimilarityParams(
        scale=float(sim["scale"]),
        rotation=float(sim["rotation"]),
        translation=(float(sim["translation"][0]), float(sim["translation"][1])),
        center=PixelPoint(float(sim["center"][0]), float(sim["center"][1])),
    )
    elastic = None
    if doc.get("elastic") is not None:
        e = doc["elastic"]
        elastic = ElasticParams(
            grid_shape=(int(e["grid_shape"][0]), int(e["grid_shape"][1])),
            displacements=tuple(float(v) for v in e["displacements"]),
            smoothing_sigma=float(e["smoothing_sigma"]),
            magnitude_alpha=float(e["magnitude_alpha"]),
            field_size=(int(e["field_size"][0]), int(e["field_size"][1])),
        )
    return TransformSpec(similarity=similarity, elastic=elastic, seed=int(doc["seed"]))
