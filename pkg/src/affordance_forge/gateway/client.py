"""Typed clients for the three external model services the pipeline uses.

The services (object description, open-vocabulary segmentation, inpainting)
are reached over a small versioned HTTP+JSON contract with base64-PNG image
payloads, so any real model can be adapted behind it and the deterministic
mocks can stand in for offline runs.

Error taxonomy mirrors the wire contract: HTTP 4xx responses are caller bugs
or data conditions and are never retried; 5xx and transport failures are
retried with exponential backoff up to ``max_retries``.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Protocol, runtime_checkable

import httpx
import numpy as np

from .. import images
from ..rasters import BinaryMask, ContextImage
from .wire import request_hash

__all__ = [
    "ServiceError",
    "ServiceUnavailableError",
    "ProtocolError",
    "NoMatchError",
    "EmptyResponseError",
    "ServiceEndpoint",
    "InpaintRequest",
    "ModelServices",
    "composite_outside_region",
    "HttpModelClient",
]


class ServiceError(RuntimeError):
    pass


class ServiceUnavailableError(ServiceError):
    """Transport failure or 5xx persisted beyond the retry budget."""


class ProtocolError(ServiceError):
    """The server flagged the request as malformed (HTTP 4xx)."""


class NoMatchError(ServiceError):
    """Segmentation found no object for the descriptor."""


class EmptyResponseError(ServiceError):
    """The description service returned no descriptors."""


@dataclass(frozen=True)
class ServiceEndpoint:
    base_url: str
    timeout: float = 30.0
    max_retries: int = 2
    backoff_initial: float = 0.05
    backoff_multiplier: float = 2.0

    def __post_init__(self) -> None:
        if self.timeout <= 0 or not math.isfinite(self.timeout):
            raise ValueError("timeout must be positive")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")
        if self.backoff_initial < 0 or self.backoff_multiplier < 1.0:
            raise ValueError("invalid backoff configuration")
        object.__setattr__(self, "base_url", self.base_url.rstrip("/"))


@dataclass(frozen=True)
class InpaintRequest:
    """Arguments of one inpainting call.

    ``image`` is the running scene image, ``region`` the area the model may
    repaint (original footprint united with the transformed silhouette),
    ``context`` the transformed masked guidance map, ``prompt`` the sampled
    object description.
    """

    image: np.ndarray
    region: BinaryMask
    context: ContextImage
    prompt: str
    seed: int
    strength: float = 1.0
    guidance: float = 7.5

    def __post_init__(self) -> None:
        if self.image.ndim != 3 or self.image.shape[2] != 3 or self.image.dtype != np.uint8:
            raise ValueError("image must be a uint8 HxWx3 array")
        shape = self.image.shape[:2]
        if self.region.shape != shape or self.context.shape != shape:
            raise ValueError(
                f"image {shape}, region {self.region.shape} and context "
                f"{self.context.shape} dimensions must match"
            )
        if not self.prompt or not self.prompt.strip():
            raise ValueError("prompt must be non-empty")


@runtime_checkable
class ModelServices(Protocol):
    """What the synthesis pipeline needs from the model backends."""

    def describe_objects(self, image: np.ndarray, instruction: str) -> list[str]: ...

    def segment(self, image: np.ndarray, descriptor: str) -> BinaryMask: ...

    def resample_description(self, descriptor: str, seed: int) -> str: ...

    def inpaint(self, request: InpaintRequest) -> np.ndarray: ...


def composite_outside_region(
    original: np.ndarray, painted: np.ndarray, region: BinaryMask
) -> np.ndarray:
    """Keep the original image everywhere outside the inpainting region.

    This is the client-side guarantee that protects keypoint validity even if
    a server repaints the whole frame.
    """
    if painted.shape != original.shape:
        raise ProtocolError(
            f"inpainted image shape {painted.shape} != input shape {original.shape}"
        )
    return np.where(region.bits[:, :, None], painted, original)


class HttpModelClient:
    """HTTP implementation of :class:`ModelServices`.

    A shareable handle; one endpoint config may be overridden per operation
    (``describe``, ``segment``, ``redescribe``, ``inpaint``). ``transport``
    is injectable for tests.
    """

    def __init__(
        self,
        endpoint: ServiceEndpoint,
        overrides: dict[str, ServiceEndpoint] | None = None,
        transport: httpx.BaseTransport | None = None,
        client: httpx.Client | None = None,
    ):
        self._default = endpoint
        self._overrides = dict(overrides or {})
        self._client = client if client is not None else httpx.Client(transport=transport)
        self._owns_client = client is None

    def close(self) -> None:
        if self._owns_client:
            self._client.close()

    def __enter__(self) -> "HttpModelClient":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def _endpoint(self, op: str) -> ServiceEndpoint:
        return self._overrides.get(op, self._default)

    def _post(self, op: str, path: str, payload: dict) -> dict:
        endpoint = self._endpoint(op)
        url = f"{endpoint.base_url}{path}"
        attempts = endpoint.max_retries + 1
        delay = endpoint.backoff_initial
        last_error: Exception | None = None
        for attempt in range(attempts):
            try:
                response = self._client.post(url, json=payload, timeout=endpoint.timeout)
            except httpx.HTTPError as err:
                last_error = err
            else:
                if response.status_code < 400:
                    return response.json()
                if response.status_code < 500:
                    self._raise_caller_error(response)
                last_error = ServiceUnavailableError(
                    f"{url} returned {response.status_code}: {response.text[:200]}"
                )
            if attempt + 1 < attempts:
                if delay > 0:
                    time.sleep(delay)
                delay *= endpoint.backoff_multiplier
        raise ServiceUnavailableError(
            f"{url} unreachable after {attempts} attempts: {last_error}"
        )

    @staticmethod
    def _raise_caller_error(response: httpx.Response) -> None:
        try:
            body = response.json()
        except ValueError:
            body = {}
        code = body.get("error", "protocol_error")
        message = body.get("message", response.text[:200])
        if code == "no_match":
            raise NoMatchError(message)
        if code == "empty_response":
            raise EmptyResponseError(message)
        raise ProtocolError(f"{code}: {message}")

    # -- operations ---------------------------------------------------------

    def describe_objects(self, image: np.ndarray, instruction: str) -> list[str]:
        if not instruction or not instruction.strip():
            raise ValueError("instruction must be non-empty")
        payload = {
            "image": images.b64encode_png(images.encode_rgb_png(image)),
            "instruction": instruction,
        }
        body = self._post("describe", "/describe", payload)
        descriptors = list(body.get("descriptors", []))
        if not descriptors:
            raise EmptyResponseError("description service returned no descriptors")
        return descriptors

    def segment(self, image: np.ndarray, descriptor: str) -> BinaryMask:
        if not descriptor or not descriptor.strip():
            raise ValueError("descriptor must be non-empty")
        payload = {
            "image": images.b64encode_png(images.encode_rgb_png(image)),
            "descriptor": descriptor,
        }
        body = self._post("segment", "/segment", payload)
        mask = images.decode_mask_png(images.b64decode_png(body["mask"]))
        if mask.shape != image.shape[:2]:
            raise ProtocolError(
                f"mask dimensions {mask.shape} != image dimensions {image.shape[:2]}"
            )
        if mask.is_empty():
            raise NoMatchError(f"service returned an empty mask for {descriptor!r}")
        return mask

    def resample_description(self, descriptor: str, seed: int) -> str:
        if not descriptor or not descriptor.strip():
            raise ValueError("descriptor must be non-empty")
        body = self._post("redescribe", "/redescribe", {"descriptor": descriptor, "seed": seed})
        variant = body.get("descriptor", "")
        if not variant:
            raise EmptyResponseError("redescription service returned an empty descriptor")
        return variant

    def inpaint(self, request: InpaintRequest) -> np.ndarray:
        payload = {
            "image": images.b64encode_png(images.encode_rgb_png(request.image)),
            "region": images.b64encode_png(images.encode_mask_png(request.region)),
            "context": images.b64encode_png(images.encode_context_png(request.context)),
            "prompt": request.prompt,
            "seed": request.seed,
            "strength": request.strength,
            "guidance": request.guidance,
        }
        body = self._post("inpaint", "/inpaint", payload)
        painted = images.decode_rgb_png(images.b64decode_png(body["image"]))
        return composite_outside_region(request.image, painted, request.region)

    @staticmethod
    def payload_hash(payload: dict) -> str:
        return request_hash(payload)
