"""The synthesis loop: grow a dataset by per-object transform-and-inpaint.

Each synthetic record is built from one sampled human record. Per object, in
annotation order: resolve the descriptor and segmentation mask, resample the
description, draw a placement-checked transform, warp the mask and the masked
context, inpaint the union region on the running image, and map the object's
keypoints through the same transform. The transformed keypoints of all
objects merge into the new label, and every sampled parameter lands in the
record's provenance so the output is reproducible bit for bit.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .context import compute_depth_context, compute_mask_context, compute_soft_edge, masked_context
from .core.store import DatasetStore
from .core.types import (
    KeypointBinding,
    KeypointSet,
    ObjectEntry,
    ObjectSynthesis,
    SceneRecord,
    SyntheticProvenance,
)
from .core.validation import validate_record
from .gateway.client import InpaintRequest, ModelServices, ServiceError
from .rasters import BinaryMask, ContextImage, ContextKind
from .seeding import derive_seed
from .transform import (
    TransformConfig,
    TransformSpec,
    apply_to_context,
    apply_to_mask,
    apply_to_point,
    check_placement,
    compose_inpaint_region,
    identity_spec,
    sample_transform,
)
from .core.coords import PixelPoint

__all__ = [
    "SynthesisConfig",
    "SynthesisError",
    "RecordRejectedError",
    "SynthesisAbortedError",
    "LoadedScene",
    "SynthesizedScene",
    "SynthesisStats",
    "synthesize_record",
    "synthesize_dataset",
    "ReviewQueue",
]

logger = logging.getLogger(__name__)


class SynthesisError(RuntimeError):
    pass


class RecordRejectedError(SynthesisError):
    """The synthesized record failed validation and was discarded."""


class SynthesisAbortedError(SynthesisError):
    """Too many skipped records; partial output stays on disk."""

    def __init__(self, message: str, stats: "SynthesisStats"):
        super().__init__(message)
        self.stats = stats


@dataclass(frozen=True)
class SynthesisConfig:
    """Knobs of the dataset growth loop."""

    target_size: int
    transform: TransformConfig
    context_kind: ContextKind = ContextKind.SOFT_EDGE
    per_object_independent_transform: bool = True
    collision_margin: int = 4
    max_placement_retries: int = 20
    master_seed: int = 0
    failure_budget_frac: float = 0.05

    def __post_init__(self) -> None:
        if self.target_size < 0:
            raise ValueError("target_size must be >= 0")
        if self.collision_margin < 0:
            raise ValueError("collision_margin must be >= 0")
        if self.max_placement_retries < 1:
            raise ValueError("max_placement_retries must be >= 1")
        if not 0.0 <= self.failure_budget_frac <= 1.0:
            raise ValueError("failure_budget_frac must be in [0, 1]")


@dataclass
class LoadedScene:
    """A source record with its pixel data resolved."""

    record: SceneRecord
    rgb: np.ndarray
    depth_m: np.ndarray | None
    masks: dict[int, BinaryMask]
    _context_cache: dict[ContextKind, ContextImage] = field(default_factory=dict, repr=False)

    @classmethod
    def from_store(cls, store: DatasetStore, record_id: str) -> "LoadedScene":
        record = store.get_record(record_id)
        masks = {}
        for index in range(len(record.objects)):
            mask = store.load_mask(record_id, index)
            if mask is not None:
                masks[index] = mask
        return cls(
            record=record,
            rgb=store.load_rgb(record_id),
            depth_m=store.load_depth(record_id),
            masks=masks,
        )

    def scene_context(self, kind: ContextKind, masks: dict[int, BinaryMask]) -> ContextImage:
        """Context image of the whole scene, computed once from the original."""
        if kind not in self._context_cache:
            if kind == ContextKind.SOFT_EDGE:
                context = compute_soft_edge(self.rgb)
            else:
                union = np.zeros(self.rgb.shape[:2], dtype=bool)
                for mask in masks.values():
                    union |= mask.bits
                union_mask = BinaryMask(union)
                if kind == ContextKind.DEPTH:
                    if self.depth_m is None:
                        raise SynthesisError(
                            f"record '{self.record.record_id}' has no depth image "
                            "for the depth context"
                        )
                    context = compute_depth_context(self.depth_m, union_mask)
                elif kind == ContextKind.SEG_MASK:
                    context = compute_mask_context(union_mask)
                else:
                    raise ValueError(f"unknown context kind {kind}")
            self._context_cache[kind] = context
        return self._context_cache[kind]


@dataclass
class SynthesizedScene:
    record: SceneRecord
    rgb: np.ndarray
    masks: dict[int, BinaryMask]


@dataclass
class SynthesisStats:
    accepted: int = 0
    skipped: int = 0
    attempted: int = 0
    placement_fallbacks: int = 0


def _resolve_masks(
    source: LoadedScene, services: ModelServices
) -> dict[int, BinaryMask]:
    """Stored masks where annotated, segmentation service otherwise."""
    masks = dict(source.masks)
    for index, entry in enumerate(source.record.objects):
        if index not in masks:
            masks[index] = services.segment(source.rgb, entry.descriptor)
    return masks


def _resolve_descriptors(source: LoadedScene, services: ModelServices) -> list[str]:
    """Annotated descriptors are ground truth; the service fills gaps only."""
    descriptors = [entry.descriptor for entry in source.record.objects]
    if all(d.strip() for d in descriptors):
        return descriptors
    described = services.describe_objects(source.rgb, source.record.instruction)
    for index, descriptor in enumerate(descriptors):
        if not descriptor.strip() and index < len(described):
            descriptors[index] = described[index]
    return descriptors


def _keypoints_of_object(keypoints: KeypointSet, object_index: int):
    return [(role, b) for role, b in keypoints.items() if b.object_index == object_index]


def _pick_transform(
    config: SynthesisConfig,
    object_seed: int,
    mask: BinaryMask,
    others: list[BinaryMask],
    object_points: list[PixelPoint],
    size: tuple[int, int],
    stats: SynthesisStats,
    shared_spec: TransformSpec | None = None,
) -> TransformSpec:
    """Placement-checked transform with bounded retries, identity fallback."""
    width, height = size
    center = PixelPoint(*mask.centroid())

    def acceptable(spec: TransformSpec) -> bool:
        if not check_placement(spec, mask, others, margin=config.collision_margin):
            return False
        for p in object_points:
            q = apply_to_point(spec, p)
            if not q.in_bounds(width, height):
                return False
        return True

    if shared_spec is not None:
        if acceptable(shared_spec):
            return shared_spec
        stats.placement_fallbacks += 1
        return identity_spec(center=center, seed=derive_seed(object_seed, "identity"))

    for attempt in range(config.max_placement_retries):
        spec = sample_transform(
            config.transform, derive_seed(object_seed, "transform", attempt), center=center
        )
        if acceptable(spec):
            return spec
    stats.placement_fallbacks += 1
    return identity_spec(center=center, seed=derive_seed(object_seed, "identity"))


def synthesize_record(
    source: LoadedScene,
    services: ModelServices,
    config: SynthesisConfig,
    record_seed: int,
    record_id: str,
    schema=None,
    stats: SynthesisStats | None = None,
) -> SynthesizedScene:
    """Run the per-object transform-and-inpaint recurrence over one source."""
    stats = stats if stats is not None else SynthesisStats()
    height, width = source.rgb.shape[:2]
    size = (width, height)

    descriptors = _resolve_descriptors(source, services)
    masks = _resolve_masks(source, services)
    context = source.scene_context(config.context_kind, masks)

    shared_spec: TransformSpec | None = None
    if not config.per_object_independent_transform:
        union = np.zeros(source.rgb.shape[:2], dtype=bool)
        for mask in masks.values():
            union |= mask.bits
        shared_spec = sample_transform(
            config.transform,
            derive_seed(record_seed, "shared-transform"),
            center=PixelPoint(*BinaryMask(union).centroid()),
        )

    running = np.array(source.rgb)
    warped_masks: dict[int, BinaryMask] = {}
    new_entries: dict = {}
    provenance_objects: list[ObjectSynthesis] = []
    new_objects: list[ObjectEntry] = []

    n_objects = len(source.record.objects)
    for index in range(n_objects):
        object_seed = derive_seed(record_seed, "object", index)
        mask = masks[index]
        others = [warped_masks[j] if j in warped_masks else masks[j]
                  for j in range(n_objects) if j != index]
        object_points = [b.point for _, b in _keypoints_of_object(source.record.keypoints, index)]

        spec = _pick_transform(
            config, object_seed, mask, others, object_points, size, stats,
            shared_spec=shared_spec,
        )

        prompt = services.resample_description(
            descriptors[index], seed=derive_seed(record_seed, "redescribe", index)
        )
        region = compose_inpaint_region(mask, spec)
        piece = masked_context(context, mask)
        warped_context = apply_to_context(spec, piece, mask=mask)
        inpaint_seed = derive_seed(record_seed, "inpaint", index)
        running = services.inpaint(
            InpaintRequest(
                image=running,
                region=region,
                context=warped_context,
                prompt=prompt,
                seed=inpaint_seed,
            )
        )
        warped_masks[index] = apply_to_mask(spec, mask)
        for role, binding in _keypoints_of_object(source.record.keypoints, index):
            moved = apply_to_point(spec, binding.point, bounds=size, out_of_bounds="reject")
            new_entries[role] = KeypointBinding(moved, binding.object_index)
        provenance_objects.append(
            ObjectSynthesis(
                object_index=index, prompt=prompt, transform=spec, inpaint_seed=inpaint_seed
            )
        )
        new_objects.append(ObjectEntry(descriptor=prompt))

    record = SceneRecord(
        record_id=record_id,
        task_id=source.record.task_id,
        rgb_ref="",
        instruction=source.record.instruction,
        objects=tuple(new_objects),
        keypoints=KeypointSet(new_entries),
        provenance=SyntheticProvenance(
            parent_id=source.record.record_id,
            inpaint_seed=record_seed,
            objects=tuple(provenance_objects),
        ),
        object_set=source.record.object_set,
    )
    if schema is not None:
        report = validate_record(record, schema, image_size=size)
        if not report.ok or report.draft:
            raise RecordRejectedError(
                f"synthesized record invalid: "
                f"{[v.message for v in report.violations] or 'no keypoints'}"
            )
    return SynthesizedScene(record=record, rgb=running, masks=warped_masks)


def synthesize_dataset(
    store: DatasetStore,
    out_store: DatasetStore,
    services: ModelServices,
    config: SynthesisConfig,
    progress_every: int = 50,
) -> SynthesisStats:
    """Grow the output dataset to ``config.target_size`` synthetic records.

    Source records are sampled uniformly with per-output sub-seeds, so the
    result is independent of execution order and reproducible byte for byte.
    Service failures skip the record; more than ``failure_budget_frac * N``
    skips abort the run with the partial output preserved on disk.
    """
    stats = SynthesisStats()
    source_ids = store.record_ids()
    if config.target_size == 0:
        return stats
    if not source_ids:
        raise SynthesisError("source dataset is empty")

    for task_id in store.task_ids():
        out_store.put_schema(store.get_schema(task_id))

    budget = math.floor(config.failure_budget_frac * config.target_size)
    cache: dict[str, LoadedScene] = {}
    output_index = 0
    while stats.accepted < config.target_size:
        record_seed = derive_seed(config.master_seed, "record", output_index)
        picker = np.random.default_rng(derive_seed(config.master_seed, "source", output_index))
        source_id = source_ids[int(picker.integers(0, len(source_ids)))]
        if source_id not in cache:
            cache[source_id] = LoadedScene.from_store(store, source_id)
        source = cache[source_id]
        schema = store.get_schema(source.record.task_id)
        record_id = f"syn-{output_index:05d}"
        stats.attempted += 1
        try:
            scene = synthesize_record(
                source, services, config, record_seed, record_id, schema=schema, stats=stats
            )
            out_store.add_record(scene.record, scene.rgb, depth_m=None, masks=scene.masks)
            stats.accepted += 1
        except (ServiceError, RecordRejectedError) as err:
            stats.skipped += 1
            logger.warning("skipped %s (source %s): %s", record_id, source_id, err)
            if stats.skipped > budget:
                raise SynthesisAbortedError(
                    f"aborted after {stats.skipped} skipped records "
                    f"(budget {budget}); partial output preserved",
                    stats,
                ) from err
        output_index += 1
        if progress_every and stats.attempted % progress_every == 0:
            logger.info(
                "synthesis progress: %d/%d accepted, %d skipped",
                stats.accepted, config.target_size, stats.skipped,
            )
    return stats


class ReviewQueue:
    """Human curation over synthetic records: pending -> accepted/rejected."""

    def __init__(self, store: DatasetStore):
        self.store = store

    def _synthetic_ids(self) -> list[str]:
        return [
            record_id
            for record_id in self.store.record_ids()
            if self.store.get_record(record_id).is_synthetic
        ]

    def pending_ids(self) -> list[str]:
        states = self.store.review_states()
        return [rid for rid in self._synthetic_ids() if states.get(rid, "pending") == "pending"]

    def next_pending(self) -> SceneRecord | None:
        pending = self.pending_ids()
        return self.store.get_record(pending[0]) if pending else None

    def record_verdict(self, record_id: str, verdict: str, note: str = "") -> None:
        if verdict not in ("accepted", "rejected"):
            raise ValueError(f"verdict must be accepted or rejected, got {verdict!r}")
        self.store.set_review(record_id, verdict, note)

    def counts(self) -> dict[str, int]:
        states = self.store.review_states()
        out = {"pending": 0, "accepted": 0, "rejected": 0}
        for rid in self._synthetic_ids():
            out[states.get(rid, "pending")] += 1
        return out

    def export_ids(self, accepted_only: bool = False) -> list[str]:
        """All record ids for export; optionally only accepted synthetics.

        Human records always export; synthetic records are filtered by their
        review state when ``accepted_only`` is set.
        """
        states = self.store.review_states()
        ids = []
        for record_id in self.store.record_ids():
            record = self.store.get_record(record_id)
            if record.is_synthetic and accepted_only:
                if states.get(record_id, "pending") != "accepted":
                    continue
            ids.append(record_id)
        return ids
