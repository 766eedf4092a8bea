"""Deterministic fixture scenes: a table-sweeping corpus drawn procedurally.

Each scene is a wood-grain tabletop with a brush (handle + bristles) and a
snack package at seeded positions, with exact segmentation masks, a depth
plane, and the five keypoint roles annotated. The corpus stands in for the
human-collected example data so the whole pipeline can run and be tested
offline.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core.coords import PixelPoint
from .core.store import DatasetStore
from .core.types import (
    FromDepthOffset,
    HumanProvenance,
    KeypointBinding,
    KeypointRole,
    KeypointSet,
    ObjectEntry,
    SceneRecord,
    TaskSchema,
    TopDownFixedYaw,
    YawFromGraspToFunction,
)
from .rasters import BinaryMask
from .seeding import derive_seed

__all__ = [
    "sweeping_schema",
    "drawer_schema",
    "SceneData",
    "make_sweeping_scene",
    "make_drawer_scene",
    "build_corpus",
]

TABLE_DEPTH_M = 0.90


def sweeping_schema() -> TaskSchema:
    return TaskSchema(
        task_id="table_sweeping",
        instruction_template="Use the {object0} to sweep the {object1}.",
        required_roles=frozenset(KeypointRole),
        gripper_height_mode=FromDepthOffset(offset=0.02),
        gripper_orientation_mode=YawFromGraspToFunction(),
    )


def drawer_schema() -> TaskSchema:
    """Graspless task: everything but the grasp point."""
    return TaskSchema(
        task_id="drawer_closing",
        instruction_template="Close the {object0}.",
        required_roles=frozenset(
            {
                KeypointRole.FUNCTION,
                KeypointRole.TARGET,
                KeypointRole.PRE_CONTACT,
                KeypointRole.POST_CONTACT,
            }
        ),
        gripper_height_mode=FromDepthOffset(offset=0.03),
        gripper_orientation_mode=TopDownFixedYaw(yaw=0.0),
    )


@dataclass
class SceneData:
    """A fully materialized scene before it is written to a store."""

    record: SceneRecord
    rgb: np.ndarray
    depth_m: np.ndarray
    masks: dict[int, BinaryMask]


def _wood_background(rng: np.random.Generator, width: int, height: int) -> np.ndarray:
    base = np.array([181, 148, 105], dtype=np.float64)
    img = np.tile(base, (height, width, 1))
    # plank stripes + mild grain noise keep the soft-edge percentile meaningful
    ys = np.arange(height)[:, None]
    stripe = 6.0 * np.sin(ys / 23.0)
    img[:, :, 0] += stripe
    img[:, :, 1] += stripe * 0.6
    img += rng.integers(-5, 6, size=(height, width, 1)).astype(np.float64)
    return np.clip(img, 0, 255).astype(np.uint8)


def _fill_rect(img: np.ndarray, x0: int, y0: int, x1: int, y1: int, color) -> None:
    img[y0:y1, x0:x1] = color


def _rect_mask(width: int, height: int, x0: int, y0: int, x1: int, y1: int) -> np.ndarray:
    bits = np.zeros((height, width), dtype=bool)
    bits[y0:y1, x0:x1] = True
    return bits


def _rounded_rect_mask(
    width: int, height: int, cx: float, cy: float, half_w: float, half_h: float, radius: float
) -> np.ndarray:
    ys, xs = np.mgrid[0:height, 0:width]
    dx = np.maximum(np.abs(xs - cx) - (half_w - radius), 0.0)
    dy = np.maximum(np.abs(ys - cy) - (half_h - radius), 0.0)
    return dx * dx + dy * dy <= radius * radius


_BRUSH_PALETTES = [
    ((96, 60, 34), (208, 174, 60)),
    ((140, 30, 30), (224, 200, 120)),
    ((40, 70, 120), (200, 180, 90)),
    ((60, 100, 60), (228, 190, 110)),
]

_PACKAGE_PALETTES = [
    (202, 52, 70),
    (60, 130, 190),
    (230, 150, 40),
    (120, 70, 160),
    (40, 160, 120),
]


def make_sweeping_scene(
    index: int, seed: int, size: tuple[int, int] = (640, 480), object_set: str = "standard"
) -> SceneData:
    """Build sweeping scene ``index`` deterministically from the corpus seed."""
    width, height = size
    rng = np.random.default_rng(derive_seed(seed, "fixture", index))
    rgb = _wood_background(rng, width, height)

    margin = 52
    handle_w, handle_h = 20, 72
    bristle_w, bristle_h = 50, 24
    pkg_hw, pkg_hh = 36.0, 24.0

    for _ in range(200):
        hx = int(rng.integers(margin + bristle_w, width - margin - bristle_w))
        hy = int(rng.integers(margin, height - margin - handle_h - bristle_h - 10))
        px = float(rng.integers(margin + int(pkg_hw) + 8, width - margin - int(pkg_hw) - 8))
        py = float(rng.integers(margin + int(pkg_hh) + 8, height - margin - int(pkg_hh) - 8))

        handle = (hx - handle_w // 2, hy, hx + handle_w // 2, hy + handle_h)
        bristles = (
            hx - bristle_w // 2,
            hy + handle_h,
            hx + bristle_w // 2,
            hy + handle_h + bristle_h,
        )
        brush_bits = _rect_mask(width, height, *handle) | _rect_mask(width, height, *bristles)
        pkg_bits = _rounded_rect_mask(width, height, px, py, pkg_hw, pkg_hh, 9.0)

        gap = 46
        brush_box = (handle[0] - gap, handle[1] - gap, bristles[2] + gap, bristles[3] + gap)
        pkg_box = (px - pkg_hw - gap, py - pkg_hh - gap, px + pkg_hw + gap, py + pkg_hh + gap)
        overlaps = not (
            brush_box[2] < pkg_box[0]
            or pkg_box[2] < brush_box[0]
            or brush_box[3] < pkg_box[1]
            or pkg_box[3] < brush_box[1]
        )
        if not overlaps:
            break
    else:
        raise RuntimeError(f"could not place fixture objects for scene {index}")

    handle_color, bristle_color = _BRUSH_PALETTES[int(rng.integers(len(_BRUSH_PALETTES)))]
    pkg_color = _PACKAGE_PALETTES[int(rng.integers(len(_PACKAGE_PALETTES)))]
    _fill_rect(rgb, *handle, handle_color)
    _fill_rect(rgb, *bristles, bristle_color)
    rgb[pkg_bits] = pkg_color

    depth = np.fromfunction(
        lambda r, c: TABLE_DEPTH_M + 0.02 * r / height, (height, width), dtype=np.float64
    )
    depth[brush_bits] = TABLE_DEPTH_M - 0.030
    depth[pkg_bits] = TABLE_DEPTH_M - 0.025

    grasp = PixelPoint(float(hx), float(hy + handle_h * 0.4))
    function = PixelPoint(float(hx), float(hy + handle_h + bristle_h - 3))
    target = PixelPoint(px, py)
    direction = np.array([px - function.x, py - function.y])
    norm = float(np.linalg.norm(direction))
    direction = direction / norm if norm > 0 else np.array([1.0, 0.0])
    reach = 58.0
    pre = PixelPoint(
        float(np.clip(px - direction[0] * reach, 4.0, width - 5.0)),
        float(np.clip(py - direction[1] * reach, 4.0, height - 5.0)),
    )
    post = PixelPoint(
        float(np.clip(px + direction[0] * reach, 4.0, width - 5.0)),
        float(np.clip(py + direction[1] * reach, 4.0, height - 5.0)),
    )

    keypoints = KeypointSet(
        {
            KeypointRole.GRASP: KeypointBinding(grasp, 0),
            KeypointRole.FUNCTION: KeypointBinding(function, 0),
            KeypointRole.TARGET: KeypointBinding(target, 1),
            KeypointRole.PRE_CONTACT: KeypointBinding(pre, 1),
            KeypointRole.POST_CONTACT: KeypointBinding(post, 1),
        }
    )
    schema = sweeping_schema()
    record = SceneRecord(
        record_id=f"human-{index:04d}",
        task_id=schema.task_id,
        rgb_ref="",
        instruction=schema.instruction_template.format(
            object0="brush", object1="snack package"
        ),
        objects=(ObjectEntry("brush"), ObjectEntry("snack package")),
        keypoints=keypoints,
        provenance=HumanProvenance(),
        object_set=object_set,
    )
    return SceneData(
        record=record,
        rgb=rgb,
        depth_m=depth,
        masks={0: BinaryMask(brush_bits), 1: BinaryMask(pkg_bits)},
    )


def make_drawer_scene(seed: int = 7, size: tuple[int, int] = (640, 480)) -> SceneData:
    """Single-object graspless scene: an open drawer front."""
    width, height = size
    rng = np.random.default_rng(derive_seed(seed, "drawer"))
    rgb = _wood_background(rng, width, height)

    cx, cy = width // 2, height // 2
    x0, y0, x1, y1 = cx - 90, cy - 36, cx + 90, cy + 36
    _fill_rect(rgb, x0, y0, x1, y1, (82, 70, 58))
    _fill_rect(rgb, cx - 30, cy - 6, cx + 30, cy + 6, (190, 190, 196))
    bits = _rect_mask(width, height, x0, y0, x1, y1)

    depth = np.full((height, width), TABLE_DEPTH_M, dtype=np.float64)
    depth[bits] = TABLE_DEPTH_M - 0.12

    keypoints = KeypointSet(
        {
            KeypointRole.FUNCTION: KeypointBinding(PixelPoint(float(cx), float(y0 + 6)), 0),
            KeypointRole.TARGET: KeypointBinding(PixelPoint(float(cx), float(cy)), 0),
            KeypointRole.PRE_CONTACT: KeypointBinding(PixelPoint(float(cx), float(y0 - 30)), 0),
            KeypointRole.POST_CONTACT: KeypointBinding(PixelPoint(float(cx), float(cy + 60)), 0),
        }
    )
    schema = drawer_schema()
    record = SceneRecord(
        record_id="drawer-0000",
        task_id=schema.task_id,
        rgb_ref="",
        instruction=schema.instruction_template.format(object0="drawer"),
        objects=(ObjectEntry("drawer"),),
        keypoints=keypoints,
        provenance=HumanProvenance(),
        object_set="standard",
    )
    return SceneData(record=record, rgb=rgb, depth_m=depth, masks={0: BinaryMask(bits)})


def build_corpus(
    root,
    n: int = 50,
    seed: int = 2024,
    size: tuple[int, int] = (640, 480),
    novel_count: int = 10,
) -> DatasetStore:
    """Write an ``n``-scene sweeping corpus; the last ``novel_count`` records
    carry the 'novel' object-set tag used by split-holdout tests."""
    if novel_count > n:
        raise ValueError("novel_count cannot exceed n")
    store = DatasetStore(root, create=True)
    store.put_schema(sweeping_schema())
    store.put_schema(drawer_schema())
    for index in range(n):
        object_set = "novel" if index >= n - novel_count else "standard"
        scene = make_sweeping_scene(index, seed, size=size, object_set=object_set)
        store.add_record(scene.record, scene.rgb, scene.depth_m, scene.masks)
    return store
