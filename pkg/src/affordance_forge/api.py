"""REST API backing the annotation/review UI.

All validation is server-authoritative: keypoint writes run through record
validation and come back as machine-readable violation lists, and concurrent
edits are fenced with version tokens (no last-writer-wins). Mutations are
atomic on the dataset store.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, Query, Response
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import images
from .context import compute_depth_context, compute_mask_context, compute_soft_edge
from .core.coords import PixelPoint
from .core.store import (
    DatasetStore,
    DatasetView,
    UnknownRecordError,
    VersionConflictError,
    schema_to_json,
    StoreError,
)
from .core.types import (
    HumanProvenance,
    KeypointBinding,
    KeypointRole,
    KeypointSet,
    ObjectEntry,
    SceneRecord,
)
from .core.validation import validate_record
from .rasters import BinaryMask, ContextKind
from .synthesis import ReviewQueue

__all__ = ["create_annotation_app"]


class KeypointIn(BaseModel):
    x: float
    y: float
    object_index: int = 0


class PutKeypointsBody(BaseModel):
    version: int
    keypoints: dict[str, KeypointIn]


class NewSceneBody(BaseModel):
    task_id: str
    instruction: str
    objects: list[str]
    image: str = Field(description="base64 PNG")
    depth: str | None = None
    object_set: str | None = None
    record_id: str | None = None


class ReviewBody(BaseModel):
    verdict: str
    note: str = ""


def _scene_summary(view: DatasetView, record: SceneRecord, review: str) -> dict:
    return {
        "record_id": record.record_id,
        "task_id": record.task_id,
        "kind": "synthetic" if record.is_synthetic else "human",
        "parent_id": record.parent_id,
        "object_set": record.object_set,
        "instruction": record.instruction,
        "objects": [o.descriptor for o in record.objects],
        "keypoints": {
            role.value: {
                "x": b.point.x,
                "y": b.point.y,
                "object_index": b.object_index,
            }
            for role, b in record.keypoints.items()
        },
        "annotated": len(record.keypoints) > 0,
        "version": record.version,
        "review": review,
    }


def create_annotation_app(
    stores: list[DatasetStore], upload_store: DatasetStore | None = None
) -> FastAPI:
    """API over one or more dataset stores; uploads land in ``upload_store``
    (default: the first store)."""
    view = DatasetView(stores)
    upload_store = upload_store or stores[0]
    app = FastAPI(title="affordance-forge annotation API")

    def review_state(record_id: str) -> str:
        return view.store_of(record_id).review_state(record_id)

    @app.exception_handler(UnknownRecordError)
    async def _unknown(_, exc: UnknownRecordError):
        return JSONResponse(status_code=404, content={"error": "unknown_record",
                                                      "message": str(exc)})

    @app.exception_handler(VersionConflictError)
    async def _conflict(_, exc: VersionConflictError):
        return JSONResponse(
            status_code=409,
            content={
                "error": "version_conflict",
                "message": str(exc),
                "current_version": exc.current,
            },
        )

    @app.get("/scenes")
    def list_scenes(
        page: int = Query(1, ge=1),
        page_size: int = Query(50, ge=1, le=500),
        kind: str | None = Query(None, pattern="^(human|synthetic)$"),
    ):
        ids = view.record_ids()
        records = []
        for record_id in ids:
            record = view.get_record(record_id)
            if kind == "human" and record.is_synthetic:
                continue
            if kind == "synthetic" and not record.is_synthetic:
                continue
            records.append(record)
        start = (page - 1) * page_size
        png_page = records[start : start + page_size]
        return {
            "total": len(records),
            "page": page,
            "page_size": page_size,
            "scenes": [
                _scene_summary(view, r, review_state(r.record_id)) for r in png_page
            ],
        }

    @app.get("/scenes/{record_id}")
    def get_scene(record_id: str):
        record = view.get_record(record_id)
        summary = _scene_summary(view, record, review_state(record_id))
        width, height = view.image_size(record_id)
        summary["width"] = width
        summary["height"] = height
        return summary

    @app.get("/scenes/{record_id}/image")
    def get_image(record_id: str):
        store = view.store_of(record_id)
        record = store.get_record(record_id)
        data = store.resolve(record.rgb_ref).read_bytes()
        return Response(content=data, media_type="image/png")

    @app.get("/scenes/{record_id}/depth")
    def get_depth(record_id: str):
        store = view.store_of(record_id)
        record = store.get_record(record_id)
        if record.depth_ref is None:
            return JSONResponse(status_code=404, content={"error": "no_depth"})
        data = store.resolve(record.depth_ref).read_bytes()
        return Response(content=data, media_type="image/png")

    @app.get("/scenes/{record_id}/context")
    def get_context(record_id: str, kind: str = Query("soft_edge")):
        store = view.store_of(record_id)
        record = store.get_record(record_id)
        rgb = store.load_rgb(record_id)
        context_kind = ContextKind(kind)
        if context_kind == ContextKind.SOFT_EDGE:
            context = compute_soft_edge(rgb)
        else:
            union = np.zeros(rgb.shape[:2], dtype=bool)
            for index in range(len(record.objects)):
                mask = store.load_mask(record_id, index)
                if mask is not None:
                    union |= mask.bits
            if not union.any():
                return JSONResponse(
                    status_code=404, content={"error": "no_masks",
                                              "message": "record has no stored masks"}
                )
            if context_kind == ContextKind.DEPTH:
                depth = store.load_depth(record_id)
                if depth is None:
                    return JSONResponse(status_code=404, content={"error": "no_depth"})
                context = compute_depth_context(depth, BinaryMask(union))
            else:
                context = compute_mask_context(BinaryMask(union))
        return Response(
            content=images.encode_context_png(context), media_type="image/png"
        )

    @app.put("/scenes/{record_id}/keypoints")
    def put_keypoints(record_id: str, body: PutKeypointsBody):
        store = view.store_of(record_id)
        record = store.get_record(record_id)
        schema = store.get_schema(record.task_id)
        try:
            entries = {
                KeypointRole(role): KeypointBinding(
                    PixelPoint(item.x, item.y), item.object_index
                )
                for role, item in body.keypoints.items()
            }
            keypoints = KeypointSet(entries)
        except ValueError as err:
            return JSONResponse(
                status_code=400,
                content={"violations": [{"code": "malformed", "message": str(err)}]},
            )
        candidate = record.with_keypoints(keypoints)
        report = validate_record(
            candidate, schema, image_size=view.image_size(record_id)
        )
        if not report.ok:
            return JSONResponse(
                status_code=400,
                content={"violations": [v.to_json() for v in report.violations]},
            )
        updated = store.update_keypoints(record_id, keypoints, body.version)
        return {"record_id": record_id, "version": updated.version}

    @app.post("/scenes", status_code=201)
    def post_scene(body: NewSceneBody):
        try:
            upload_store.get_schema(body.task_id)
        except StoreError:
            return JSONResponse(
                status_code=400,
                content={"violations": [{"code": "unknown_task",
                                          "message": f"no schema for task '{body.task_id}'"}]},
            )
        rgb = images.decode_rgb_png(images.b64decode_png(body.image))
        depth = (
            images.decode_depth_png(images.b64decode_png(body.depth))
            if body.depth is not None
            else None
        )
        record_id = body.record_id or f"scene-{len(view.record_ids()):05d}"
        if any(s.has_record(record_id) for s in stores):
            return JSONResponse(
                status_code=409,
                content={"error": "duplicate_id",
                         "message": f"record '{record_id}' already exists"},
            )
        record = SceneRecord(
            record_id=record_id,
            task_id=body.task_id,
            rgb_ref="",
            instruction=body.instruction,
            objects=tuple(ObjectEntry(descriptor=d) for d in body.objects),
            keypoints=KeypointSet.empty(),
            provenance=HumanProvenance(),
            object_set=body.object_set,
        )
        stored = upload_store.add_record(record, rgb, depth_m=depth)
        return {"record_id": stored.record_id, "version": stored.version}

    @app.get("/review/next")
    def review_next():
        for store in stores:
            queue = ReviewQueue(store)
            record = queue.next_pending()
            if record is not None:
                return {"record": _scene_summary(view, record, "pending")}
        return {"record": None}

    @app.post("/review/{record_id}")
    def review_verdict(record_id: str, body: ReviewBody):
        verdict_map = {"accept": "accepted", "reject": "rejected"}
        if body.verdict not in verdict_map:
            return JSONResponse(
                status_code=400,
                content={"error": "bad_verdict",
                         "message": "verdict must be accept or reject"},
            )
        store = view.store_of(record_id)
        ReviewQueue(store).record_verdict(record_id, verdict_map[body.verdict], body.note)
        return {"record_id": record_id, "review": verdict_map[body.verdict]}

    @app.get("/schema/{task_id}")
    def get_schema(task_id: str):
        try:
            schema = view.get_schema(task_id)
        except StoreError as err:
            return JSONResponse(status_code=404, content={"error": "unknown_task",
                                                          "message": str(err)})
        return schema_to_json(schema)

    @app.get("/tasks")
    def list_tasks():
        tasks: list[str] = []
        for store in stores:
            for task_id in store.task_ids():
                if task_id not in tasks:
                    tasks.append(task_id)
        return {"tasks": tasks}

    return app
