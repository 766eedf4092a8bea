"""Keypoints + depth -> SE(3) waypoint plans.

A plan has up to two phases. The grasping phase (only when the task schema
requires a grasp point) approaches above the grasp keypoint, closes the
gripper at it, and lifts. The manipulation phase visits the pre-contact,
contact (at the target keypoint) and post-contact positions, then retreats.
Graspless tasks (drawer closing and the like) keep the gripper closed
throughout and execute contact with the closed gripper tip.

Pixel keypoints become 3D positions through pinhole deprojection at the
median depth of a 5x5 window (holes skipped), mapped through the camera
extrinsics; heights and yaw follow the schema's gripper modes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.spatial.transform import Rotation

from .core.coords import PixelPoint
from .core.types import (
    FixedHeight,
    FromDepthOffset,
    KeypointRole,
    KeypointSet,
    TaskSchema,
    TopDownFixedYaw,
    YawFromGraspToFunction,
)

__all__ = [
    "MotionError",
    "DepthReadError",
    "WorkspaceError",
    "CameraModel",
    "GripperState",
    "Phase",
    "WaypointLabel",
    "Waypoint",
    "MotionPlan",
    "PlanConfig",
    "median_depth_at",
    "deproject",
    "compute_plan_yaw",
    "top_down_orientation",
    "plan_motion",
    "validate_plan",
    "plan_to_json",
]


class MotionError(RuntimeError):
    pass


class DepthReadError(MotionError):
    """No valid depth reading in the sampling window."""


class WorkspaceError(MotionError):
    """A waypoint left the configured workspace box."""


@dataclass(frozen=True)
class CameraModel:
    """Pinhole intrinsics plus the camera-to-base rigid transform."""

    fx: float
    fy: float
    cx: float
    cy: float
    rotation_quat: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 1.0)  # x, y, z, w
    translation: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self) -> None:
        if self.fx <= 0 or self.fy <= 0:
            raise ValueError("focal lengths must be positive")
        norm = math.sqrt(sum(q * q for q in self.rotation_quat))
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"rotation quaternion norm {norm} != 1 (tolerance 1e-9)")

    def base_rotation(self) -> Rotation:
        return Rotation.from_quat(self.rotation_quat)


class GripperState(str, Enum):
    OPEN = "open"
    CLOSED = "closed"


class Phase(str, Enum):
    GRASP = "grasp"
    MANIPULATION = "manipulation"


class WaypointLabel(str, Enum):
    APPROACH = "approach"
    GRASP = "grasp"
    LIFT = "lift"
    PRE_CONTACT = "pre_contact"
    CONTACT = "contact"
    POST_CONTACT = "post_contact"
    RETREAT = "retreat"


LABEL_ORDER: tuple[WaypointLabel, ...] = (
    WaypointLabel.APPROACH,
    WaypointLabel.GRASP,
    WaypointLabel.LIFT,
    WaypointLabel.PRE_CONTACT,
    WaypointLabel.CONTACT,
    WaypointLabel.POST_CONTACT,
    WaypointLabel.RETREAT,
)

_GRASP_PHASE_LABELS = {WaypointLabel.APPROACH, WaypointLabel.GRASP, WaypointLabel.LIFT}


@dataclass(frozen=True)
class Waypoint:
    position: tuple[float, float, float]
    orientation: tuple[float, float, float, float]  # quaternion x, y, z, w
    gripper: GripperState
    phase: Phase
    label: WaypointLabel

    def __post_init__(self) -> None:
        if not all(math.isfinite(v) for v in self.position):
            raise ValueError("waypoint position must be finite")


@dataclass(frozen=True)
class MotionPlan:
    waypoints: tuple[Waypoint, ...]

    def __post_init__(self) -> None:
        problems = validate_plan(self)
        if problems:
            raise ValueError("invalid motion plan: " + "; ".join(problems))

    def labels(self) -> list[WaypointLabel]:
        return [w.label for w in self.waypoints]


def validate_plan(plan: "MotionPlan | tuple[Waypoint, ...]") -> list[str]:
    """Check phase/label ordering and gripper transition rules; total."""
    waypoints = plan.waypoints if isinstance(plan, MotionPlan) else tuple(plan)
    problems: list[str] = []
    indices = []
    for w in waypoints:
        indices.append(LABEL_ORDER.index(w.label))
        expected_phase = Phase.GRASP if w.label in _GRASP_PHASE_LABELS else Phase.MANIPULATION
        if w.phase != expected_phase:
            problems.append(f"label {w.label.value} carries phase {w.phase.value}")
    if indices != sorted(indices):
        problems.append("waypoint labels out of canonical order")
    if len(set(indices)) != len(indices):
        problems.append("duplicate waypoint labels")
    saw_manipulation = False
    for w in waypoints:
        if w.phase == Phase.MANIPULATION:
            saw_manipulation = True
        elif saw_manipulation:
            problems.append("grasp-phase waypoint after manipulation phase")
            break
    for prev, cur in zip(waypoints, waypoints[1:]):
        if prev.gripper != cur.gripper and cur.label not in (
            WaypointLabel.GRASP,
            WaypointLabel.RETREAT,
        ):
            problems.append(
                f"gripper transition at {cur.label.value}; only grasp and retreat may switch"
            )
    return problems


@dataclass(frozen=True)
class PlanConfig:
    """Clearances and the workspace safety box (base frame, meters)."""

    approach_clearance: float = 0.10
    lift_clearance: float = 0.10
    retreat_clearance: float = 0.10
    workspace_min: tuple[float, float, float] = (-1.5, -1.5, -0.5)
    workspace_max: tuple[float, float, float] = (1.5, 1.5, 1.5)
    depth_window: int = 5


def median_depth_at(depth_m: np.ndarray, p: PixelPoint, window: int = 5) -> float:
    """Median depth over a window around the point, skipping holes.

    Holes are non-finite or non-positive readings. Raises
    :class:`DepthReadError` when the whole window is holes.
    """
    height, width = depth_m.shape
    half = window // 2
    col = int(round(p.x))
    row = int(round(p.y))
    r0, r1 = max(row - half, 0), min(row + half + 1, height)
    c0, c1 = max(col - half, 0), min(col + half + 1, width)
    patch = depth_m[r0:r1, c0:c1]
    valid = patch[np.isfinite(patch) & (patch > 0)]
    if valid.size == 0:
        raise DepthReadError(f"no valid depth in {window}x{window} window at ({p.x}, {p.y})")
    return float(np.median(valid))


def deproject(p: PixelPoint, depth_at_p: float, cam: CameraModel) -> np.ndarray:
    """Pixel + depth -> 3D point in the robot base frame."""
    if not (math.isfinite(depth_at_p) and depth_at_p > 0):
        raise DepthReadError(f"invalid depth {depth_at_p}")
    camera_point = np.array(
        [
            (p.x - cam.cx) / cam.fx * depth_at_p,
            (p.y - cam.cy) / cam.fy * depth_at_p,
            depth_at_p,
        ]
    )
    return cam.base_rotation().apply(camera_point) + np.array(cam.translation)


def compute_plan_yaw(keypoints: KeypointSet, schema: TaskSchema) -> float:
    """Gripper yaw in radians, per the schema's orientation mode."""
    mode = schema.gripper_orientation_mode
    if isinstance(mode, TopDownFixedYaw):
        return mode.yaw
    assert isinstance(mode, YawFromGraspToFunction)
    grasp = keypoints.get(KeypointRole.GRASP)
    function = keypoints.get(KeypointRole.FUNCTION)
    if grasp is None or function is None:
        raise MotionError(
            "yaw_from_grasp_to_function needs both grasp and function keypoints"
        )
    return math.atan2(
        function.point.y - grasp.point.y, function.point.x - grasp.point.x
    )


def top_down_orientation(yaw: float) -> tuple[float, float, float, float]:
    """Quaternion (x, y, z, w) of a top-down gripper with the given yaw."""
    rot = Rotation.from_euler("z", yaw) * Rotation.from_euler("x", math.pi)
    q = rot.as_quat()
    return (float(q[0]), float(q[1]), float(q[2]), float(q[3]))


def _apply_height(z: float, schema: TaskSchema) -> float:
    mode = schema.gripper_height_mode
    if isinstance(mode, FromDepthOffset):
        return z + mode.offset
    assert isinstance(mode, FixedHeight)
    return mode.z


def plan_motion(
    keypoints: KeypointSet,
    depth_m: np.ndarray,
    cam: CameraModel,
    schema: TaskSchema,
    cfg: PlanConfig = PlanConfig(),
) -> MotionPlan:
    """Build the canonical waypoint plan for a predicted keypoint set."""
    missing = schema.required_roles - keypoints.roles
    if missing:
        raise MotionError(
            f"keypoints missing required roles: {sorted(r.value for r in missing)}"
        )

    def locate(role: KeypointRole) -> np.ndarray:
        binding = keypoints[role]
        depth = median_depth_at(depth_m, binding.point, cfg.depth_window)
        point = deproject(binding.point, depth, cam)
        return np.array([point[0], point[1], _apply_height(point[2], schema)])

    orientation = top_down_orientation(compute_plan_yaw(keypoints, schema))
    has_grasp = KeypointRole.GRASP in schema.required_roles
    carried = GripperState.CLOSED  # graspless tasks push with the closed tip
    waypoints: list[Waypoint] = []

    def add(label: WaypointLabel, position: np.ndarray, gripper: GripperState,
            phase: Phase) -> None:
        pos = (float(position[0]), float(position[1]), float(position[2]))
        for axis, (lo, hi, v) in enumerate(zip(cfg.workspace_min, cfg.workspace_max, pos)):
            if not lo <= v <= hi:
                raise WorkspaceError(
                    f"waypoint {label.value} leaves the workspace on axis {axis}: "
                    f"{v:.3f} not in [{lo}, {hi}]"
                )
        waypoints.append(Waypoint(pos, orientation, gripper, phase, label))

    up = np.array([0.0, 0.0, 1.0])
    if has_grasp:
        grasp_pos = locate(KeypointRole.GRASP)
        add(WaypointLabel.APPROACH, grasp_pos + cfg.approach_clearance * up,
            GripperState.OPEN, Phase.GRASP)
        add(WaypointLabel.GRASP, grasp_pos, GripperState.CLOSED, Phase.GRASP)
        add(WaypointLabel.LIFT, grasp_pos + cfg.lift_clearance * up,
            GripperState.CLOSED, Phase.GRASP)

    last_contact = None
    if KeypointRole.PRE_CONTACT in keypoints:
        pre = locate(KeypointRole.PRE_CONTACT)
        add(WaypointLabel.PRE_CONTACT, pre, carried, Phase.MANIPULATION)
        last_contact = pre
    contact = locate(KeypointRole.TARGET)
    add(WaypointLabel.CONTACT, contact, carried, Phase.MANIPULATION)
    last_contact = contact
    if KeypointRole.POST_CONTACT in keypoints:
        post = locate(KeypointRole.POST_CONTACT)
        add(WaypointLabel.POST_CONTACT, post, carried, Phase.MANIPULATION)
        last_contact = post

    retreat_gripper = GripperState.OPEN if has_grasp else carried
    add(WaypointLabel.RETREAT, last_contact + cfg.retreat_clearance * up,
        retreat_gripper, Phase.MANIPULATION)
    return MotionPlan(tuple(waypoints))


def plan_to_json(plan: MotionPlan) -> list[dict]:
    return [
        {
            "position": list(w.position),
            "quaternion": list(w.orientation),
            "gripper": w.gripper.value,
            "phase": w.phase.value,
            "label": w.label.value,
        }
        for w in plan.waypoints
    ]


def plan_to_table(plan: MotionPlan) -> str:
    """Human-readable rendering for the CLI."""
    header = f"{'label':<13}{'phase':<14}{'gripper':<9}{'x':>8}{'y':>8}{'z':>8}"
    lines = [header, "-" * len(header)]
    for w in plan.waypoints:
        x, y, z = w.position
        lines.append(
            f"{w.label.value:<13}{w.phase.value:<14}{w.gripper.value:<9}"
            f"{x:>8.3f}{y:>8.3f}{z:>8.3f}"
        )
    return "\n".join(lines)


def plan_json_text(plan: MotionPlan) -> str:
    return json.dumps(plan_to_json(plan), indent=2)
