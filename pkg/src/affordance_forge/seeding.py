"""Deterministic seed derivation for the synthesis pipeline.

Every stochastic step in the pipeline draws from a sub-seed derived from the
master seed plus a structural path (output index, object index, purpose tag).
Derivation is a pure hash, so parallel workers and re-runs produce identical
streams regardless of execution order.
"""

from __future__ import annotations

import hashlib
import struct

__all__ = ["derive_seed"]

_MASK64 = (1 << 64) - 1


def derive_seed(*parts: int | str) -> int:
    """Hash a sequence of ints/strings into a stable 64-bit unsigned seed."""
    if not parts:
        raise ValueError("derive_seed needs at least one part")
    h = hashlib.blake2b(digest_size=8)
    for part in parts:
        if isinstance(part, bool):
            raise TypeError("bool is ambiguous as seed material")
        if isinstance(part, int):
            h.update(b"i")
            h.update(struct.pack("<Q", part & _MASK64))
        elif isinstance(part, str):
            data = part.encode("utf-8")
            h.update(b"s")
            h.update(struct.pack("<I", len(data)))
            h.update(data)
        else:
            raise TypeError(f"unsupported seed part type: {type(part).__name__}")
    return int.from_bytes(h.digest(), "little")
