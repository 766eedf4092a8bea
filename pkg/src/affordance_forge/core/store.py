"""Dataset persistence.

Directory layout::

    <root>/
      schemas.json                 task_id -> task schema
      dataset.jsonl                one record summary per line, append order
      review.jsonl                 append-only review verdict log
      scenes/<record_id>/
        rgb.png                    8-bit RGB
        depth.png                  16-bit grayscale, millimeters (optional)
        masks/<object_index>.png   8-bit, 0/255 (optional per object)
        record.json                full SceneRecord, schema_version mandatory

Reads are lock-free; mutations are serialized through a per-store lock and
record.json is replaced atomically (temp file + rename).
"""

from __future__ import annotations

import json
import threading
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .. import images
from ..rasters import BinaryMask
from ..transform import spec_from_json, spec_to_json
from .coords import PixelPoint
from .types import (
    ROLE_ORDER,
    FixedHeight,
    FromDepthOffset,
    HumanProvenance,
    KeypointBinding,
    KeypointRole,
    KeypointSet,
    ObjectEntry,
    ObjectSynthesis,
    SceneRecord,
    SyntheticProvenance,
    TaskSchema,
    TopDownFixedYaw,
    YawFromGraspToFunction,
)
from .validation import ValidationReport, validate_record

__all__ = [
    "SCHEMA_VERSION",
    "StoreError",
    "UnknownRecordError",
    "VersionConflictError",
    "record_to_json",
    "record_from_json",
    "schema_to_json",
    "schema_from_json",
    "DatasetStore",
    "DatasetView",
    "validate_dataset",
]

SCHEMA_VERSION = 1


class StoreError(RuntimeError):
    pass


class UnknownRecordError(StoreError):
    pass


class VersionConflictError(StoreError):
    def __init__(self, record_id: str, expected: int, current: int):
        super().__init__(
            f"record '{record_id}': version token {expected} does not match current {current}"
        )
        self.current = current


def _keypoints_to_json(keypoints: KeypointSet) -> dict:
    return {
        role.value: {"x": b.point.x, "y": b.point.y, "object_index": b.object_index}
        for role, b in keypoints.items()
    }


def _keypoints_from_json(doc: dict) -> KeypointSet:
    entries = {}
    for role in ROLE_ORDER:
        if role.value in doc:
            item = doc[role.value]
            entries[role] = KeypointBinding(
                point=PixelPoint(float(item["x"]), float(item["y"])),
                object_index=int(item["object_index"]),
            )
    return KeypointSet(entries)


def _provenance_to_json(record: SceneRecord) -> dict:
    prov = record.provenance
    if isinstance(prov, HumanProvenance):
        return {"kind": "human"}
    assert isinstance(prov, SyntheticProvenance)
    return {
        "kind": "synthetic",
        "parent_id": prov.parent_id,
        "inpaint_seed": prov.inpaint_seed,
        "objects": [
            {
                "object_index": obj.object_index,
                "prompt": obj.prompt,
                "inpaint_seed": obj.inpaint_seed,
                "transform": spec_to_json(obj.transform),
            }
            for obj in prov.objects
        ],
    }


def _provenance_from_json(doc: dict):
    if doc["kind"] == "human":
        return HumanProvenance()
    if doc["kind"] == "synthetic":
        return SyntheticProvenance(
            parent_id=doc["parent_id"],
            inpaint_seed=int(doc["inpaint_seed"]),
            objects=tuple(
                ObjectSynthesis(
                    object_index=int(obj["object_index"]),
                    prompt=obj["prompt"],
                    inpaint_seed=int(obj["inpaint_seed"]),
                    transform=spec_from_json(obj["transform"]),
                )
                for obj in doc["objects"]
            ),
        )
    raise ValueError(f"unknown provenance kind {doc['kind']!r}")


def record_to_json(record: SceneRecord) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "record_id": record.record_id,
        "task_id": record.task_id,
        "instruction": record.instruction,
        "rgb_ref": record.rgb_ref,
        "depth_ref": record.depth_ref,
        "object_set": record.object_set,
        "objects": [
            {"descriptor": o.descriptor, "segmentation_mask_ref": o.segmentation_mask_ref}
            for o in record.objects
        ],
        "keypoints": _keypoints_to_json(record.keypoints),
        "provenance": _provenance_to_json(record),
        "version": record.version,
    }


def record_from_json(doc: dict) -> SceneRecord:
    if "schema_version" not in doc:
        raise ValueError("record.json missing mandatory schema_version")
    if doc["schema_version"] != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema_version {doc['schema_version']}")
    return SceneRecord(
        record_id=doc["record_id"],
        task_id=doc["task_id"],
        rgb_ref=doc["rgb_ref"],
        instruction=doc["instruction"],
        objects=tuple(
            ObjectEntry(
                descriptor=o["descriptor"],
                segmentation_mask_ref=o.get("segmentation_mask_ref"),
            )
            for o in doc["objects"]
        ),
        keypoints=_keypoints_from_json(doc["keypoints"]),
        provenance=_provenance_from_json(doc["provenance"]),
        depth_ref=doc.get("depth_ref"),
        object_set=doc.get("object_set"),
        version=int(doc.get("version", 1)),
    )


def schema_to_json(schema: TaskSchema) -> dict:
    if isinstance(schema.gripper_height_mode, FromDepthOffset):
        height = {"mode": "from_depth_offset", "offset": schema.gripper_height_mode.offset}
    else:
        height = {"mode": "fixed", "z": schema.gripper_height_mode.z}
    if isinstance(schema.gripper_orientation_mode, TopDownFixedYaw):
        orientation = {"mode": "top_down_fixed_yaw", "yaw": schema.gripper_orientation_mode.yaw}
    else:
        orientation = {"mode": "yaw_from_grasp_to_function"}
    return {
        "task_id": schema.task_id,
        "instruction_template": schema.instruction_template,
        "required_roles": [r.value for r in ROLE_ORDER if r in schema.required_roles],
        "gripper_height_mode": height,
        "gripper_orientation_mode": orientation,
    }


def schema_from_json(doc: dict) -> TaskSchema:
    height_doc = doc["gripper_height_mode"]
    if height_doc["mode"] == "from_depth_offset":
        height = FromDepthOffset(float(height_doc["offset"]))
    elif height_doc["mode"] == "fixed":
        height = FixedHeight(float(height_doc["z"]))
    else:
        raise ValueError(f"unknown gripper height mode {height_doc['mode']!r}")
    orient_doc = doc["gripper_orientation_mode"]
    if orient_doc["mode"] == "top_down_fixed_yaw":
        orientation = TopDownFixedYaw(float(orient_doc.get("yaw", 0.0)))
    elif orient_doc["mode"] == "yaw_from_grasp_to_function":
        orientation = YawFromGraspToFunction()
    else:
        raise ValueError(f"unknown gripper orientation mode {orient_doc['mode']!r}")
    return TaskSchema(
        task_id=doc["task_id"],
        instruction_template=doc["instruction_template"],
        required_roles=frozenset(KeypointRole(r) for r in doc["required_roles"]),
        gripper_height_mode=height,
        gripper_orientation_mode=orientation,
    )


def _dump_json(doc: dict) -> str:
    return json.dumps(doc, ensure_ascii=False, separators=(", ", ": "))


class DatasetStore:
    """Single dataset directory. Concurrent reads, serialized writes."""

    def __init__(self, root: str | Path, create: bool = False):
        self.root = Path(root)
        self._lock = threading.Lock()
        if create:
            self.root.mkdir(parents=True, exist_ok=True)
            (self.root / "scenes").mkdir(exist_ok=True)
            if not self._index_path.exists():
                self._index_path.touch()
            if not self._schemas_path.exists():
                self._schemas_path.write_text("{}", encoding="utf-8")
        elif not self._index_path.exists():
            raise StoreError(f"{self.root} is not a dataset directory (no dataset.jsonl)")

    # -- paths ------------------------------------------------------------

    @property
    def _index_path(self) -> Path:
        return self.root / "dataset.jsonl"

    @property
    def _schemas_path(self) -> Path:
        return self.root / "schemas.json"

    @property
    def _review_path(self) -> Path:
        return self.root / "review.jsonl"

    def scene_dir(self, record_id: str) -> Path:
        return self.root / "scenes" / record_id

    def _record_path(self, record_id: str) -> Path:
        return self.scene_dir(record_id) / "record.json"

    # -- schemas ----------------------------------------------------------

    def put_schema(self, schema: TaskSchema) -> None:
        with self._lock:
            schemas = self._read_schemas()
            schemas[schema.task_id] = schema_to_json(schema)
            tmp = self._schemas_path.with_suffix(".json.tmp")
            tmp.write_text(_dump_json(schemas), encoding="utf-8")
            tmp.replace(self._schemas_path)

    def get_schema(self, task_id: str) -> TaskSchema:
        schemas = self._read_schemas()
        if task_id not in schemas:
            raise StoreError(f"no schema for task '{task_id}'")
        return schema_from_json(schemas[task_id])

    def task_ids(self) -> list[str]:
        return sorted(self._read_schemas())

    def _read_schemas(self) -> dict:
        if not self._schemas_path.exists():
            return {}
        return json.loads(self._schemas_path.read_text(encoding="utf-8"))

    # -- records ----------------------------------------------------------

    def record_ids(self) -> list[str]:
        ids = []
        with self._index_path.open(encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    ids.append(json.loads(line)["record_id"])
        return ids

    def has_record(self, record_id: str) -> bool:
        return self._record_path(record_id).exists()

    def get_record(self, record_id: str) -> SceneRecord:
        path = self._record_path(record_id)
        if not path.exists():
            raise UnknownRecordError(f"no record '{record_id}' in {self.root}")
        return record_from_json(json.loads(path.read_text(encoding="utf-8")))

    def iter_records(self) -> Iterator[SceneRecord]:
        for record_id in self.record_ids():
            yield self.get_record(record_id)

    def add_record(
        self,
        record: SceneRecord,
        rgb: np.ndarray,
        depth_m: np.ndarray | None = None,
        masks: dict[int, BinaryMask] | None = None,
    ) -> SceneRecord:
        """Persist a new record; refs are rewritten to the canonical layout."""
        masks = masks or {}
        with self._lock:
            if self.has_record(record.record_id):
                raise StoreError(f"record '{record.record_id}' already exists")
            scene = self.scene_dir(record.record_id)
            scene.mkdir(parents=True)
            rel = f"scenes/{record.record_id}"
            images.save_rgb(scene / "rgb.png", rgb)
            depth_ref = None
            if depth_m is not None:
                images.save_depth(scene / "depth.png", depth_m)
                depth_ref = f"{rel}/depth.png"
            objects = []
            if masks:
                (scene / "masks").mkdir()
            for index, entry in enumerate(record.objects):
                mask_ref = None
                if index in masks:
                    images.save_mask(scene / "masks" / f"{index}.png", masks[index])
                    mask_ref = f"{rel}/masks/{index}.png"
                objects.append(
                    ObjectEntry(descriptor=entry.descriptor, segmentation_mask_ref=mask_ref)
                )
            stored = SceneRecord(
                record_id=record.record_id,
                task_id=record.task_id,
                rgb_ref=f"{rel}/rgb.png",
                instruction=record.instruction,
                objects=tuple(objects),
                keypoints=record.keypoints,
                provenance=record.provenance,
                depth_ref=depth_ref,
                object_set=record.object_set,
                version=record.version,
            )
            self._write_record_json(stored)
            summary = {
                "record_id": stored.record_id,
                "task_id": stored.task_id,
                "kind": "synthetic" if stored.is_synthetic else "human",
                "object_set": stored.object_set,
                "parent_id": stored.parent_id,
            }
            with self._index_path.open("a", encoding="utf-8") as fh:
                fh.write(_dump_json(summary) + "\n")
            return stored

    def _write_record_json(self, record: SceneRecord) -> None:
        path = self._record_path(record.record_id)
        tmp = path.with_suffix(".json.tmp")
        tmp.write_text(_dump_json(record_to_json(record)), encoding="utf-8")
        tmp.replace(path)

    def update_keypoints(
        self, record_id: str, keypoints: KeypointSet, expected_version: int
    ) -> SceneRecord:
        """Replace a record's keypoints under optimistic concurrency."""
        with self._lock:
            record = self.get_record(record_id)
            if record.version != expected_version:
                raise VersionConflictError(record_id, expected_version, record.version)
            updated = record.with_keypoints(keypoints, version=record.version + 1)
            self._write_record_json(updated)
            return updated

    # -- pixel data ---------------------------------------------------------

    def resolve(self, ref: str) -> Path:
        return self.root / ref

    def load_rgb(self, record_id: str) -> np.ndarray:
        return images.load_rgb(self.resolve(self.get_record(record_id).rgb_ref))

    def load_depth(self, record_id: str) -> np.ndarray | None:
        record = self.get_record(record_id)
        if record.depth_ref is None:
            return None
        return images.load_depth(self.resolve(record.depth_ref))

    def load_mask(self, record_id: str, object_index: int) -> BinaryMask | None:
        record = self.get_record(record_id)
        if object_index >= len(record.objects):
            raise IndexError(f"record '{record_id}' has no object {object_index}")
        ref = record.objects[object_index].segmentation_mask_ref
        if ref is None:
            return None
        return images.load_mask(self.resolve(ref))

    def image_size(self, record_id: str) -> tuple[int, int]:
        return images.png_size(self.resolve(self.get_record(record_id).rgb_ref))

    # -- review log ---------------------------------------------------------

    def set_review(self, record_id: str, verdict: str, note: str = "") -> None:
        if verdict not in ("accepted", "rejected", "pending"):
            raise ValueError(f"unknown review verdict {verdict!r}")
        if not self.has_record(record_id):
            raise UnknownRecordError(f"no record '{record_id}' in {self.root}")
        with self._lock:
            entry = {"record_id": record_id, "verdict": verdict, "note": note}
            with self._review_path.open("a", encoding="utf-8") as fh:
                fh.write(_dump_json(entry) + "\n")

    def review_states(self) -> dict[str, str]:
        """Latest verdict per record; records never reviewed are absent."""
        states: dict[str, str] = {}
        if not self._review_path.exists():
            return states
        with self._review_path.open(encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    entry = json.loads(line)
                    states[entry["record_id"]] = entry["verdict"]
        return states

    def review_state(self, record_id: str) -> str:
        return self.review_states().get(record_id, "pending")


class DatasetView:
    """Read-only union of one or more dataset stores."""

    def __init__(self, stores: Iterable[DatasetStore]):
        self.stores = list(stores)
        if not self.stores:
            raise ValueError("DatasetView needs at least one store")

    def record_ids(self) -> list[str]:
        ids: list[str] = []
        for store in self.stores:
            ids.extend(store.record_ids())
        return ids

    def store_of(self, record_id: str) -> DatasetStore:
        for store in self.stores:
            if store.has_record(record_id):
                return store
        raise UnknownRecordError(f"no record '{record_id}' in any store")

    def get_record(self, record_id: str) -> SceneRecord:
        return self.store_of(record_id).get_record(record_id)

    def iter_records(self) -> Iterator[SceneRecord]:
        for store in self.stores:
            yield from store.iter_records()

    def get_schema(self, task_id: str) -> TaskSchema:
        last_error: Exception | None = None
        for store in self.stores:
            try:
                return store.get_schema(task_id)
            except StoreError as err:
                last_error = err
        raise last_error or StoreError(f"no schema for task '{task_id}'")

    def load_rgb(self, record_id: str) -> np.ndarray:
        return self.store_of(record_id).load_rgb(record_id)

    def image_size(self, record_id: str) -> tuple[int, int]:
        return self.store_of(record_id).image_size(record_id)


def validate_dataset(view: DatasetStore | DatasetView, strict_drafts: bool = False) -> list[ValidationReport]:
    """Validate every record in the dataset (or union of datasets).

    Returns one report per record; reports are produced even for records that
    fail to load. With ``strict_drafts`` unannotated records are violations.
    """
    if isinstance(view, DatasetStore):
        view = DatasetView([view])
    known_ids = frozenset(view.record_ids())
    reports: list[ValidationReport] = []
    for record_id in sorted(known_ids):
        store = view.store_of(record_id)
        try:
            record = store.get_record(record_id)
            schema = store.get_schema(record.task_id)
        except Exception as err:  # noqa: BLE001 - validation must be total
            report = ValidationReport(record_id=record_id)
            report.add("unreadable_record", str(err))
            reports.append(report)
            continue
        try:
            size = store.image_size(record_id)
        except Exception as err:  # noqa: BLE001
            report = ValidationReport(record_id=record_id)
            report.add("unreadable_image", str(err))
            reports.append(report)
            continue
        report = validate_record(record, schema, image_size=size, known_ids=known_ids)
        if report.draft and strict_drafts:
            report.add("draft", "record has no keypoints")
        for index, entry in enumerate(record.objects):
            if entry.segmentation_mask_ref is not None:
                if not store.resolve(entry.segmentation_mask_ref).exists():
                    report.add("missing_mask_file",
                               f"mask file for object {index} is missing",
                               object_index=index)
        reports.append(report)
    return reports
