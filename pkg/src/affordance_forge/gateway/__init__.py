"""Clients and deterministic mocks for the external model services."""

from .app import create_mock_app
from .client import (
    EmptyResponseError,
    HttpModelClient,
    InpaintRequest,
    ModelServices,
    NoMatchError,
    ProtocolError,
    ServiceEndpoint,
    ServiceError,
    ServiceUnavailableError,
    composite_outside_region,
)
from .mock import (
    DESCRIPTOR_VARIANTS,
    GENERIC_ADJECTIVES,
    LocalMockServices,
    MockRegistry,
    registry_from_stores,
)
from .wire import WIRE_VERSION, request_hash

__all__ = [
    "EmptyResponseError",
    "HttpModelClient",
    "InpaintRequest",
    "ModelServices",
    "NoMatchError",
    "ProtocolError",
    "ServiceEndpoint",
    "ServiceError",
    "ServiceUnavailableError",
    "composite_outside_region",
    "DESCRIPTOR_VARIANTS",
    "GENERIC_ADJECTIVES",
    "LocalMockServices",
    "MockRegistry",
    "registry_from_stores",
    "WIRE_VERSION",
    "request_hash",
    "create_mock_app",
]
