"""Shared pieces of the HTTP+JSON model-service contract."""

from __future__ import annotations

import hashlib
import json

__all__ = ["WIRE_VERSION", "request_hash"]

WIRE_VERSION = "v1"


def request_hash(payload: dict) -> str:
    """Deterministic hash of a canonical-JSON request body.

    Both client and server compute it, which makes retries idempotent and
    lets responses be matched to requests regardless of completion order.
    """
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
