"""Render and parse the natural-language keypoint affordance format.

Canonical form is one line per role, in canonical role order::

    grasp: (512, 340)
    target: (100, 900)

Coordinates are integers on the 0-999 grid. Rendering is byte-deterministic.
Parsing is tolerant by default: it accepts surrounding prose, varied
whitespace, hyphen/space role spellings and bracket styles ``(x,y)``,
``[x,y]`` and ``[[x,y]]``. Strict mode accepts only the canonical form.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .coords import GRID, NormalizedCoord, denormalize_point, normalize_point
from .types import ROLE_ORDER, KeypointBinding, KeypointRole, KeypointSet, TaskSchema

__all__ = [
    "AffordanceParseError",
    "MissingRoleError",
    "DuplicateRoleError",
    "CoordinateRangeError",
    "UnparseableTextError",
    "StrictFormatError",
    "SchemaMismatchError",
    "render_affordance_text",
    "parse_affordance_text",
]


class SchemaMismatchError(ValueError):
    """Keypoint set roles do not match the task schema."""


@dataclass(frozen=True)
class Span:
    """Character range [start, end) of the offending text."""

    start: int
    end: int
    text: str


class AffordanceParseError(ValueError):
    """Base class for affordance-text parse failures."""

    def __init__(self, message: str, span: Span | None = None):
        super().__init__(message)
        self.span = span


class MissingRoleError(AffordanceParseError):
    def __init__(self, role: KeypointRole, text: str):
        super().__init__(f"required role '{role.value}' not found", Span(0, len(text), text))
        self.role = role


class DuplicateRoleError(AffordanceParseError):
    def __init__(self, role: KeypointRole, span: Span):
        super().__init__(f"role '{role.value}' appears more than once", span)
        self.role = role


class CoordinateRangeError(AffordanceParseError):
    def __init__(self, role: KeypointRole, axis: str, value: int, span: Span):
        super().__init__(
            f"{axis}={value} for role '{role.value}' outside [0, {GRID - 1}]", span
        )
        self.role = role
        self.axis = axis
        self.value = value


class UnparseableTextError(AffordanceParseError):
    pass


class StrictFormatError(AffordanceParseError):
    """Text deviates from the canonical rendered form."""


def render_affordance_text(
    keypoints: KeypointSet, schema: TaskSchema, width: int, height: int
) -> str:
    """Serialize a keypoint set into the canonical text form."""
    if keypoints.roles != schema.required_roles:
        raise SchemaMismatchError(
            f"keypoint roles {sorted(r.value for r in keypoints.roles)} do not match "
            f"schema roles {sorted(r.value for r in schema.required_roles)}"
        )
    lines = []
    for role in ROLE_ORDER:
        binding = keypoints.get(role)
        if binding is None:
            continue
        n = normalize_point(binding.point, width, height)
        lines.append(f"{role.value}: ({n.nx}, {n.ny})")
    return "\n".join(lines)


_ROLE_PATTERNS: tuple[tuple[KeypointRole, re.Pattern[str]], ...] = tuple(
    (role, re.compile(pattern, re.IGNORECASE))
    for role, pattern in (
        (KeypointRole.GRASP, r"\bgrasp\b"),
        (KeypointRole.FUNCTION, r"\bfunction\b"),
        (KeypointRole.TARGET, r"\btarget\b"),
        (KeypointRole.PRE_CONTACT, r"\bpre[\s_-]?contact\b"),
        (KeypointRole.POST_CONTACT, r"\bpost[\s_-]?contact\b"),
    )
)

_COORD_RE = re.compile(r"[\[(]{1,2}\s*(-?\d+)\s*,\s*(-?\d+)\s*[\])]{1,2}")

# How far past a role mention we look for its coordinate pair.
_COORD_WINDOW = 64

_STRICT_LINE_RE = re.compile(r"^(grasp|function|target|pre_contact|post_contact): \((\d+), (\d+)\)$")


def _checked_coord(
    role: KeypointRole, raw_x: str, raw_y: str, span: Span
) -> NormalizedCoord:
    nx, ny = int(raw_x), int(raw_y)
    if not 0 <= nx < GRID:
        raise CoordinateRangeError(role, "nx", nx, span)
    if not 0 <= ny < GRID:
        raise CoordinateRangeError(role, "ny", ny, span)
    return NormalizedCoord(nx, ny)


def _parse_tolerant(text: str) -> dict[KeypointRole, NormalizedCoord]:
    mentions: list[tuple[int, int, KeypointRole]] = []
    for role, pattern in _ROLE_PATTERNS:
        for m in pattern.finditer(text):
            mentions.append((m.start(), m.end(), role))
    mentions.sort()

    found: dict[KeypointRole, NormalizedCoord] = {}
    for i, (start, end, role) in enumerate(mentions):
        # Stop the search window at the next role mention so one role cannot
        # steal the coordinates that belong to the following one.
        limit = end + _COORD_WINDOW
        if i + 1 < len(mentions):
            limit = min(limit, mentions[i + 1][0])
        coord_match = _COORD_RE.search(text, end, limit)
        if coord_match is None:
            continue
        span = Span(start, coord_match.end(), text[start : coord_match.end()])
        coord = _checked_coord(role, coord_match.group(1), coord_match.group(2), span)
        if role in found:
            if found[role] != coord:
                raise DuplicateRoleError(role, span)
            continue
        found[role] = coord
    return found


def _parse_strict(
    text: str, schema: TaskSchema
) -> dict[KeypointRole, NormalizedCoord]:
    expected_roles = [r for r in ROLE_ORDER if r in schema.required_roles]
    lines = text.split("\n")
    if len(lines) != len(expected_roles):
        raise StrictFormatError(
            f"expected {len(expected_roles)} lines, got {len(lines)}",
            Span(0, len(text), text),
        )
    found: dict[KeypointRole, NormalizedCoord] = {}
    offset = 0
    for line, role in zip(lines, expected_roles):
        span = Span(offset, offset + len(line), line)
        m = _STRICT_LINE_RE.match(line)
        if m is None or m.group(1) != role.value:
            raise StrictFormatError(
                f"line {len(found) + 1} is not canonical '{role.value}: (nx, ny)'", span
            )
        found[role] = _checked_coord(role, m.group(2), m.group(3), span)
        offset += len(line) + 1
    return found


def parse_affordance_text(
    text: str,
    schema: TaskSchema,
    width: int,
    height: int,
    strict: bool = False,
) -> KeypointSet:
    """Recover a keypoint set from model text output.

    Parsed coordinates are denormalized to bin-center pixel points; object
    bindings are unknown at parse time and default to object 0.
    """
    if not isinstance(text, str) or not text.strip():
        raise UnparseableTextError("empty affordance text", Span(0, 0, ""))
    found = _parse_strict(text, schema) if strict else _parse_tolerant(text)
    entries: dict[KeypointRole, KeypointBinding] = {}
    for role in ROLE_ORDER:
        if role not in schema.required_roles:
            continue
        if role not in found:
            raise MissingRoleError(role, text)
        point = denormalize_point(found[role], width, height)
        entries[role] = KeypointBinding(point=point, object_index=0)
    return KeypointSet(entries)
