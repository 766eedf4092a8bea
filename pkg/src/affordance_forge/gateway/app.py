"""FastAPI wrapper exposing the mock model services over the wire contract."""

from __future__ import annotations

from fastapi import FastAPI
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .. import images
from .client import EmptyResponseError, InpaintRequest, NoMatchError
from .mock import LocalMockServices
from .wire import request_hash

__all__ = ["create_mock_app"]


class DescribeBody(BaseModel):
    image: str
    instruction: str


class SegmentBody(BaseModel):
    image: str
    descriptor: str


class RedescribeBody(BaseModel):
    descriptor: str
    seed: int


class InpaintBody(BaseModel):
    image: str
    region: str
    context: str
    prompt: str
    seed: int
    strength: float = 1.0
    guidance: float = 7.5


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": code, "message": message})


def create_mock_app(services: LocalMockServices) -> FastAPI:
    app = FastAPI(title="affordance-forge mock model services")

    @app.exception_handler(NoMatchError)
    async def _no_match(_, exc: NoMatchError):
        return _error(404, "no_match", str(exc))

    @app.exception_handler(EmptyResponseError)
    async def _empty(_, exc: EmptyResponseError):
        return _error(404, "empty_response", str(exc))

    @app.exception_handler(ValueError)
    async def _bad_request(_, exc: ValueError):
        return _error(400, "bad_request", str(exc))

    @app.get("/health")
    def health():
        return {"status": "ok", "inpaint_mode": services.inpaint_mode}

    @app.post("/describe")
    def describe(body: DescribeBody):
        image = images.decode_rgb_png(images.b64decode_png(body.image))
        descriptors = services.describe_objects(image, body.instruction)
        return {
            "descriptors": descriptors,
            "model_id": "mock-describe-v1",
            "request_hash": request_hash(body.model_dump()),
        }

    @app.post("/segment")
    def segment(body: SegmentBody):
        image = images.decode_rgb_png(images.b64decode_png(body.image))
        mask = services.segment(image, body.descriptor)
        return {
            "mask": images.b64encode_png(images.encode_mask_png(mask)),
            "model_id": "mock-segment-v1",
            "request_hash": request_hash(body.model_dump()),
        }

    @app.post("/redescribe")
    def redescribe(body: RedescribeBody):
        descriptor = services.resample_description(body.descriptor, body.seed)
        return {
            "descriptor": descriptor,
            "model_id": "mock-redescribe-v1",
            "request_hash": request_hash(body.model_dump()),
        }

    @app.post("/inpaint")
    def inpaint(body: InpaintBody):
        image = images.decode_rgb_png(images.b64decode_png(body.image))
        region = images.decode_mask_png(images.b64decode_png(body.region))
        context = images.decode_context_png(images.b64decode_png(body.context))
        request = InpaintRequest(
            image=image,
            region=region,
            context=context,
            prompt=body.prompt,
            seed=body.seed,
            strength=body.strength,
            guidance=body.guidance,
        )
        painted = services.inpaint(request)
        return {
            "image": images.b64encode_png(images.encode_rgb_png(painted)),
            "model_id": "mock-inpaint-v1",
            "request_hash": request_hash(body.model_dump()),
        }

    return app
