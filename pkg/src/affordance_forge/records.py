"""Serialize scenes into fine-tuning records for the two prediction heads.

The natural-language head gets the canonical affordance text as its response;
the regression head gets a fixed-order vector of normalized coordinates with
a per-entry presence mask (absent roles are masked, never sentinel values,
because sentinels corrupt the evaluation MSE). Vanilla augmentation replicas
move keypoints coherently through the same geometric machinery the synthesis
pipeline uses; color jitter leaves keypoints untouched.
"""

from __future__ import annotations

import json
import logging
import math
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import ndimage

from .core.coords import PixelPoint, normalize_point
from .core.store import DatasetStore, DatasetView
from .core.textio import render_affordance_text
from .core.types import (
    ROLE_ORDER,
    KeypointBinding,
    KeypointSet,
    PromptTemplate,
    SceneRecord,
)
from .seeding import derive_seed
from .transform import SimilarityParams, similarity_matrix

__all__ = [
    "DEFAULT_PROMPT_TEMPLATE",
    "AugmentationConfig",
    "FineTuneRecord",
    "BuildStats",
    "build_records",
    "export_jsonl",
    "HoldoutSpec",
    "SplitResult",
    "SplitError",
    "split_dataset",
    "write_split_manifest",
    "read_split_manifest",
]

logger = logging.getLogger(__name__)

DEFAULT_PROMPT_TEMPLATE = PromptTemplate(
    system_text=(
        "You mark task-relevant manipulation points on the image. "
        "Coordinates are integers normalized to the 0-999 range per axis."
    ),
    question_text=(
        "Instruction: {instruction}\n"
        "Answer with one line per point in the form `role: (x, y)`."
    ),
)


@dataclass(frozen=True)
class AugmentationConfig:
    """Vanilla augmentation toggles and ranges.

    ``replicas`` counts records emitted per source scene; replica 0 is always
    the untouched original, replicas >= 1 sample from the enabled operations.
    """

    replicas: int = 1
    rotation_max_deg: float = 0.0
    crop: bool = False
    crop_scale_range: tuple[float, float] = (0.7, 1.0)
    hflip: bool = False
    vflip: bool = False
    color_jitter: float = 0.0

    def __post_init__(self) -> None:
        if self.replicas < 1:
            raise ValueError("replicas must be >= 1")
        if self.rotation_max_deg < 0 or self.rotation_max_deg > 180:
            raise ValueError("rotation_max_deg must be in [0, 180]")
        lo, hi = self.crop_scale_range
        if not (0 < lo <= hi <= 1.0):
            raise ValueError("crop_scale_range must satisfy 0 < lo <= hi <= 1")
        if not 0.0 <= self.color_jitter < 1.0:
            raise ValueError("color_jitter must be in [0, 1)")

    @property
    def any_geometric(self) -> bool:
        return self.rotation_max_deg > 0 or self.crop or self.hflip or self.vflip


@dataclass(frozen=True)
class FineTuneRecord:
    """One training example; exactly one of the two target forms is set."""

    record_id: str
    replica: int
    image_ref: str
    prompt: str
    nl_text: str | None = None
    regression_targets: tuple[int, ...] | None = None
    regression_mask: tuple[bool, ...] | None = None


@dataclass
class BuildStats:
    emitted: int = 0
    dropped_replicas: int = 0


def _warp_rgb_similarity(params: SimilarityParams, rgb: np.ndarray) -> np.ndarray:
    """Full-frame bilinear warp of an RGB image by a similarity map."""
    h = np.linalg.inv(similarity_matrix(params))
    height, width = rgb.shape[:2]
    grid_y, grid_x = np.meshgrid(
        np.arange(height, dtype=np.float64), np.arange(width, dtype=np.float64), indexing="ij"
    )
    in_x = h[0, 0] * grid_x + h[0, 1] * grid_y + h[0, 2]
    in_y = h[1, 0] * grid_x + h[1, 1] * grid_y + h[1, 2]
    out = np.empty_like(rgb)
    for k in range(rgb.shape[2]):
        out[:, :, k] = ndimage.map_coordinates(
            rgb[:, :, k].astype(np.float64), [in_y, in_x], order=1, mode="constant", cval=0.0
        ).round().clip(0, 255).astype(np.uint8)
    return out


def _crop_resize(rgb: np.ndarray, box: tuple[float, float, float, float]) -> np.ndarray:
    """Crop ``box`` (x0, y0, w, h) and resize back to the original frame."""
    height, width = rgb.shape[:2]
    x0, y0, w, h = box
    grid_y, grid_x = np.meshgrid(
        np.arange(height, dtype=np.float64), np.arange(width, dtype=np.float64), indexing="ij"
    )
    in_x = x0 + (grid_x + 0.5) * w / width - 0.5
    in_y = y0 + (grid_y + 0.5) * h / height - 0.5
    out = np.empty_like(rgb)
    for k in range(rgb.shape[2]):
        out[:, :, k] = ndimage.map_coordinates(
            rgb[:, :, k].astype(np.float64), [in_y, in_x], order=1, mode="nearest"
        ).round().clip(0, 255).astype(np.uint8)
    return out


def _color_jitter(rgb: np.ndarray, rng: np.random.Generator, jitter: float) -> np.ndarray:
    values = rgb.astype(np.float64) / 255.0
    brightness = rng.uniform(1 - jitter, 1 + jitter)
    contrast = rng.uniform(1 - jitter, 1 + jitter)
    saturation = rng.uniform(1 - jitter, 1 + jitter)
    values = values * brightness
    mean = values.mean()
    values = mean + (values - mean) * contrast
    gray = values.mean(axis=2, keepdims=True)
    values = gray + (values - gray) * saturation
    return (values.clip(0.0, 1.0) * 255.0).round().astype(np.uint8)


class _ReplicaDropped(Exception):
    pass


def _augment_replica(
    rgb: np.ndarray,
    keypoints: KeypointSet,
    aug: AugmentationConfig,
    rng: np.random.Generator,
) -> tuple[np.ndarray, KeypointSet]:
    """One sampled replica; raises _ReplicaDropped if a keypoint leaves frame."""
    height, width = rgb.shape[:2]
    points = {role: (b.point.x, b.point.y) for role, b in keypoints.items()}
    out = rgb

    if aug.rotation_max_deg > 0:
        angle = math.radians(rng.uniform(-aug.rotation_max_deg, aug.rotation_max_deg))
        params = SimilarityParams(
            1.0, angle, (0.0, 0.0), PixelPoint((width - 1) / 2.0, (height - 1) / 2.0)
        )
        out = _warp_rgb_similarity(params, out)
        h = similarity_matrix(params)
        points = {
            role: (
                h[0, 0] * x + h[0, 1] * y + h[0, 2],
                h[1, 0] * x + h[1, 1] * y + h[1, 2],
            )
            for role, (x, y) in points.items()
        }

    if aug.crop:
        scale = rng.uniform(*aug.crop_scale_range)
        side = math.sqrt(scale)
        w, h_box = width * side, height * side
        x0 = rng.uniform(0.0, width - w)
        y0 = rng.uniform(0.0, height - h_box)
        out = _crop_resize(out, (x0, y0, w, h_box))
        points = {
            role: ((x - x0) * width / w, (y - y0) * height / h_box)
            for role, (x, y) in points.items()
        }

    if aug.hflip and rng.uniform() < 0.5:
        out = out[:, ::-1].copy()
        points = {role: (width - 1 - x, y) for role, (x, y) in points.items()}

    if aug.vflip and rng.uniform() < 0.5:
        out = out[::-1].copy()
        points = {role: (x, height - 1 - y) for role, (x, y) in points.items()}

    if aug.color_jitter > 0:
        out = _color_jitter(out, rng, aug.color_jitter)

    entries = {}
    for role, (x, y) in points.items():
        if not (0.0 <= x < width and 0.0 <= y < height):
            raise _ReplicaDropped(f"role {role.value} left the frame")
        entries[role] = KeypointBinding(PixelPoint(x, y), keypoints[role].object_index)
    return out, KeypointSet(entries)


def _targets(
    keypoints: KeypointSet, required_roles, width: int, height: int
) -> tuple[tuple[int, ...], tuple[bool, ...]]:
    targets: list[int] = []
    mask: list[bool] = []
    for role in ROLE_ORDER:
        binding = keypoints.get(role)
        present = role in required_roles and binding is not None
        if present:
            n = normalize_point(binding.point, width, height)
            targets.extend((n.nx, n.ny))
        else:
            targets.extend((0, 0))
        mask.extend((present, present))
    return tuple(targets), tuple(mask)


def build_records(
    view: DatasetStore | DatasetView,
    record_ids: list[str],
    head_kind: str,
    aug: AugmentationConfig,
    seed: int,
    out_dir: str | Path,
    template: PromptTemplate = DEFAULT_PROMPT_TEMPLATE,
) -> tuple[list[FineTuneRecord], BuildStats]:
    """One fine-tuning record per (scene x augmentation replica).

    Augmented images are written under ``out_dir``/aug; identity replicas
    reference the stored scene image. Deterministic in ``seed``.
    """
    if head_kind not in ("nl", "regression"):
        raise ValueError(f"head_kind must be 'nl' or 'regression', got {head_kind!r}")
    if isinstance(view, DatasetStore):
        view = DatasetView([view])
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    aug_dir = out_dir / "aug"

    stats = BuildStats()
    results: list[FineTuneRecord] = []
    for record_id in record_ids:
        store = view.store_of(record_id)
        record = store.get_record(record_id)
        schema = store.get_schema(record.task_id)
        width, height = store.image_size(record_id)
        prompt = template.render(record.instruction)
        rgb = None  # loaded lazily, only when a replica needs pixels

        for replica in range(aug.replicas):
            if replica == 0:
                keypoints = record.keypoints
                image_path = store.resolve(record.rgb_ref)
            else:
                if rgb is None:
                    rgb = store.load_rgb(record_id)
                rng = np.random.default_rng(derive_seed(seed, record_id, replica))
                try:
                    augmented, keypoints = _augment_replica(rgb, record.keypoints, aug, rng)
                except _ReplicaDropped as err:
                    stats.dropped_replicas += 1
                    logger.info("dropped %s replica %d: %s", record_id, replica, err)
                    continue
                aug_dir.mkdir(exist_ok=True)
                image_path = aug_dir / f"{record_id}-r{replica}.png"
                from . import images

                images.save_rgb(image_path, augmented)

            image_ref = os.path.relpath(image_path, out_dir)
            if head_kind == "nl":
                nl_text = render_affordance_text(keypoints, schema, width, height)
                results.append(
                    FineTuneRecord(
                        record_id=record_id,
                        replica=replica,
                        image_ref=image_ref,
                        prompt=prompt,
                        nl_text=nl_text,
                    )
                )
            else:
                targets, mask = _targets(keypoints, schema.required_roles, width, height)
                results.append(
                    FineTuneRecord(
                        record_id=record_id,
                        replica=replica,
                        image_ref=image_ref,
                        prompt=prompt,
                        regression_targets=targets,
                        regression_mask=mask,
                    )
                )
            stats.emitted += 1
    return results, stats


def export_jsonl(records: list[FineTuneRecord], path: str | Path) -> None:
    """Write fine-tuning records in the conversation-style JSONL format."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for record in records:
            if record.nl_text is not None:
                doc = {
                    "image": record.image_ref,
                    "prompt": record.prompt,
                    "response": record.nl_text,
                    "record_id": record.record_id,
                }
            else:
                doc = {
                    "image": record.image_ref,
                    "prompt": record.prompt,
                    "targets": list(record.regression_targets or ()),
                    "mask": list(record.regression_mask or ()),
                    "record_id": record.record_id,
                }
            fh.write(json.dumps(doc, ensure_ascii=False) + "\n")


# -- train/test splitting ------------------------------------------------------


class SplitError(ValueError):
    pass


@dataclass(frozen=True)
class HoldoutSpec:
    """Select held-out records by object-set tag or by explicit id list."""

    object_set: str | None = None
    record_ids: frozenset[str] | None = None

    def __post_init__(self) -> None:
        if (self.object_set is None) == (self.record_ids is None):
            raise SplitError("specify exactly one of object_set or record_ids")

    def matches(self, record: SceneRecord) -> bool:
        if self.object_set is not None:
            return record.object_set == self.object_set
        return record.record_id in (self.record_ids or frozenset())

    def to_json(self) -> dict:
        if self.object_set is not None:
            return {"object_set": self.object_set}
        return {"record_ids": sorted(self.record_ids or ())}


@dataclass
class SplitResult:
    train_ids: list[str]
    test_ids: list[str]
    excluded_ids: list[str]
    rule: HoldoutSpec


def _family(record: SceneRecord) -> str:
    return record.parent_id if record.is_synthetic else record.record_id


def split_dataset(
    view: DatasetStore | DatasetView, holdout: HoldoutSpec
) -> SplitResult:
    """Disjoint train/test split with parent-child leakage excluded.

    Test takes the human records the holdout selects (synthetic records never
    land in test; they stand in for real images, the test side is real data);
    every record sharing a family with a test record, and every synthetic
    record matching the holdout itself, is excluded from train entirely.
    """
    if isinstance(view, DatasetStore):
        view = DatasetView([view])
    records = list(view.iter_records())
    test: list[str] = []
    test_families: set[str] = set()
    for record in records:
        if holdout.matches(record) and not record.is_synthetic:
            test.append(record.record_id)
            test_families.add(_family(record))

    train: list[str] = []
    excluded: list[str] = []
    test_set = set(test)
    for record in records:
        if record.record_id in test_set:
            continue
        if _family(record) in test_families or holdout.matches(record):
            excluded.append(record.record_id)
        else:
            train.append(record.record_id)

    overlap = set(train) & test_set
    assert not overlap, f"split produced overlapping ids: {sorted(overlap)[:5]}"
    if not train:
        raise SplitError("split produced an empty train side")
    if not test:
        raise SplitError("split produced an empty test side")
    return SplitResult(train_ids=train, test_ids=test, excluded_ids=excluded, rule=holdout)


def write_split_manifest(result: SplitResult, path: str | Path) -> None:
    doc = {
        "rule": result.rule.to_json(),
        "train": sorted(result.train_ids),
        "test": sorted(result.test_ids),
        "excluded": sorted(result.excluded_ids),
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def read_split_manifest(path: str | Path) -> SplitResult:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    rule_doc = doc["rule"]
    rule = HoldoutSpec(
        object_set=rule_doc.get("object_set"),
        record_ids=frozenset(rule_doc["record_ids"]) if "record_ids" in rule_doc else None,
    )
    return SplitResult(
        train_ids=list(doc["train"]),
        test_ids=list(doc["test"]),
        excluded_ids=list(doc.get("excluded", [])),
        rule=rule,
    )
