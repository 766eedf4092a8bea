"""From predicted keypoints to an SE(3) waypoint plan."""

from affordance_forge.fixtures import (
    drawer_schema,
    make_drawer_scene,
    make_sweeping_scene,
    sweeping_schema,
)
from affordance_forge.motion import CameraModel, plan_motion, plan_to_table

cam = CameraModel(fx=600.0, fy=600.0, cx=320.0, cy=240.0)

scene = make_sweeping_scene(0, seed=2024)
plan = plan_motion(scene.record.keypoints, scene.depth_m, cam, sweeping_schema())
print("table sweeping (grasp a tool, then sweep):")
print(plan_to_table(plan))

drawer = make_drawer_scene()
drawer_plan = plan_motion(drawer.record.keypoints, drawer.depth_m, cam, drawer_schema())
print("\ndrawer closing (graspless: the closed gripper tip pushes):")
print(plan_to_table(drawer_plan))
