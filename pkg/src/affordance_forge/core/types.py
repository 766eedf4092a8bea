"""Domain types for keypoint-affordance scenes.

A scene pairs an RGB(D) observation with a free-form instruction, a list of
task-relevant objects, and a set of role-typed keypoints bound to those
objects. Task schemas declare which roles a task needs and how the gripper
height and orientation are derived when turning predicted keypoints into
motion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Iterator, Mapping, Union

from .coords import PixelPoint

if TYPE_CHECKING:
    from ..transform import TransformSpec

__all__ = [
    "KeypointRole",
    "ROLE_ORDER",
    "KeypointBinding",
    "KeypointSet",
    "FromDepthOffset",
    "FixedHeight",
    "GripperHeightMode",
    "TopDownFixedYaw",
    "YawFromGraspToFunction",
    "GripperOrientationMode",
    "TaskSchema",
    "ObjectEntry",
    "HumanProvenance",
    "ObjectSynthesis",
    "SyntheticProvenance",
    "Provenance",
    "SceneRecord",
    "PromptTemplate",
]


class KeypointRole(str, Enum):
    GRASP = "grasp"
    FUNCTION = "function"
    TARGET = "target"
    PRE_CONTACT = "pre_contact"
    POST_CONTACT = "post_contact"


# Canonical ordering used everywhere roles are serialized or rendered.
ROLE_ORDER: tuple[KeypointRole, ...] = (
    KeypointRole.GRASP,
    KeypointRole.FUNCTION,
    KeypointRole.TARGET,
    KeypointRole.PRE_CONTACT,
    KeypointRole.POST_CONTACT,
)


@dataclass(frozen=True)
class KeypointBinding:
    """One keypoint: its pixel location and the object it rides with."""

    point: PixelPoint
    object_index: int = 0

    def __post_init__(self) -> None:
        if self.object_index < 0:
            raise ValueError(f"object_index must be >= 0, got {self.object_index}")


class KeypointSet:
    """Immutable role -> keypoint mapping with at most one entry per role.

    Iteration and :meth:`items` follow :data:`ROLE_ORDER`.
    """

    __slots__ = ("_entries",)

    def __init__(self, entries: Mapping[KeypointRole, KeypointBinding]):
        ordered: dict[KeypointRole, KeypointBinding] = {}
        for role in ROLE_ORDER:
            if role in entries:
                binding = entries[role]
                if not isinstance(binding, KeypointBinding):
                    raise TypeError(f"entry for {role.value} is not a KeypointBinding")
                ordered[role] = binding
        unknown = set(entries) - set(ordered)
        if unknown:
            raise ValueError(f"unknown keypoint roles: {sorted(r for r in unknown)}")
        self._entries = ordered

    @classmethod
    def empty(cls) -> "KeypointSet":
        return cls({})

    @property
    def roles(self) -> frozenset[KeypointRole]:
        return frozenset(self._entries)

    def items(self) -> Iterator[tuple[KeypointRole, KeypointBinding]]:
        return iter(self._entries.items())

    def get(self, role: KeypointRole) -> KeypointBinding | None:
        return self._entries.get(role)

    def __getitem__(self, role: KeypointRole) -> KeypointBinding:
        return self._entries[role]

    def __contains__(self, role: KeypointRole) -> bool:
        return role in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[KeypointRole]:
        return iter(self._entries)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, KeypointSet):
            return NotImplemented
        return self._entries == other._entries

    def __hash__(self) -> int:
        return hash(tuple(self._entries.items()))

    def __repr__(self) -> str:
        inner = ", ".join(
            f"{role.value}=({b.point.x}, {b.point.y})@{b.object_index}"
            for role, b in self._entries.items()
        )
        return f"KeypointSet({inner})"


@dataclass(frozen=True)
class FromDepthOffset:
    """Gripper height = deprojected keypoint height plus a fixed offset."""

    offset: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.offset):
            raise ValueError("offset must be finite")


@dataclass(frozen=True)
class FixedHeight:
    """Gripper height pinned to a constant z in the robot base frame."""

    z: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.z):
            raise ValueError("z must be finite")


GripperHeightMode = Union[FromDepthOffset, FixedHeight]


@dataclass(frozen=True)
class TopDownFixedYaw:
    """Top-down gripper with a constant yaw (radians)."""

    yaw: float = 0.0

    def __post_init__(self) -> None:
        if not math.isfinite(self.yaw):
            raise ValueError("yaw must be finite")


@dataclass(frozen=True)
class YawFromGraspToFunction:
    """Yaw aligned with the grasp -> function direction in the image plane."""


GripperOrientationMode = Union[TopDownFixedYaw, YawFromGraspToFunction]


@dataclass(frozen=True)
class TaskSchema:
    """Per-task contract: required keypoint roles and gripper conventions."""

    task_id: str
    instruction_template: str
    required_roles: frozenset[KeypointRole]
    gripper_height_mode: GripperHeightMode
    gripper_orientation_mode: GripperOrientationMode

    def __post_init__(self) -> None:
        if not self.task_id:
            raise ValueError("task_id must be non-empty")
        if not self.required_roles:
            raise ValueError("required_roles must be non-empty")
        if KeypointRole.TARGET not in self.required_roles:
            raise ValueError("required_roles must include the target role")
        object.__setattr__(self, "required_roles", frozenset(self.required_roles))


@dataclass(frozen=True)
class ObjectEntry:
    """One task-relevant object: a free-text descriptor plus optional mask ref."""

    descriptor: str
    segmentation_mask_ref: str | None = None

    def __post_init__(self) -> None:
        if not self.descriptor or not self.descriptor.strip():
            raise ValueError("object descriptor must be non-empty")


@dataclass(frozen=True)
class HumanProvenance:
    kind: str = field(default="human", init=False)


@dataclass(frozen=True)
class ObjectSynthesis:
    """How one object of a synthetic record was produced."""

    object_index: int
    prompt: str
    transform: "TransformSpec"
    inpaint_seed: int


@dataclass(frozen=True)
class SyntheticProvenance:
    kind: str = field(default="synthetic", init=False)
    parent_id: str = ""
    inpaint_seed: int = 0
    objects: tuple[ObjectSynthesis, ...] = ()

    def __post_init__(self) -> None:
        if not self.parent_id:
            raise ValueError("synthetic provenance must reference a parent record")


Provenance = Union[HumanProvenance, SyntheticProvenance]


@dataclass(frozen=True)
class SceneRecord:
    """One (image, instruction, objects, keypoints, provenance) datum."""

    record_id: str
    task_id: str
    rgb_ref: str
    instruction: str
    objects: tuple[ObjectEntry, ...]
    keypoints: KeypointSet
    provenance: Provenance
    depth_ref: str | None = None
    object_set: str | None = None
    version: int = 1

    def __post_init__(self) -> None:
        if not self.record_id:
            raise ValueError("record_id must be non-empty")
        if not self.task_id:
            raise ValueError("task_id must be non-empty")
        if not self.instruction or not self.instruction.strip():
            raise ValueError("instruction must be non-empty")
        object.__setattr__(self, "objects", tuple(self.objects))

    @property
    def is_synthetic(self) -> bool:
        return isinstance(self.provenance, SyntheticProvenance)

    @property
    def parent_id(self) -> str | None:
        if isinstance(self.provenance, SyntheticProvenance):
            return self.provenance.parent_id
        return None

    def with_keypoints(self, keypoints: KeypointSet, version: int | None = None) -> "SceneRecord":
        return SceneRecord(
            record_id=self.record_id,
            task_id=self.task_id,
            rgb_ref=self.rgb_ref,
            instruction=self.instruction,
            objects=self.objects,
            keypoints=keypoints,
            provenance=self.provenance,
            depth_ref=self.depth_ref,
            object_set=self.object_set,
            version=self.version if version is None else version,
        )


@dataclass(frozen=True)
class PromptTemplate:
    """System plus per-task question text with an instruction slot."""

    system_text: str
    question_text: str

    def __post_init__(self) -> None:
        if "{instruction}" not in self.question_text:
            raise ValueError("question_text must contain an {instruction} slot")

    def render(self, instruction: str) -> str:
        if not instruction or not instruction.strip():
            raise ValueError("instruction must be non-empty")
        text = self.system_text.strip()
        question = self.question_text.format(instruction=instruction).strip()
        rendered = f"{text}\n{question}" if text else question
        if not rendered.strip():
            raise ValueError("prompt rendered to empty text")
        return rendered
