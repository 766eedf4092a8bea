"""Per-keypoint MSE reporting and the physical-trial ledger."""

import tempfile
from pathlib import Path

from affordance_forge.core.coords import NormalizedCoord, denormalize_point
from affordance_forge.core.types import KeypointBinding, KeypointRole, KeypointSet
from affordance_forge.evaluation import TrialLedger, TrialOutcome, keypoint_mse
from affordance_forge.fixtures import sweeping_schema

W = H = 1000


def kps(offset_grasp=(0, 0)) -> KeypointSet:
    base = {
        KeypointRole.GRASP: (200, 300),
        KeypointRole.FUNCTION: (230, 380),
        KeypointRole.TARGET: (600, 420),
        KeypointRole.PRE_CONTACT: (540, 400),
        KeypointRole.POST_CONTACT: (660, 440),
    }
    entries = {}
    for role, (nx, ny) in base.items():
        if role == KeypointRole.GRASP:
            nx, ny = nx + offset_grasp[0], ny + offset_grasp[1]
        entries[role] = KeypointBinding(denormalize_point(NormalizedCoord(nx, ny), W, H), 0)
    return KeypointSet(entries)


truth = {"scene-a": kps(), "scene-b": kps()}
pred = {"scene-a": kps(offset_grasp=(3, 4)), "scene-b": kps()}
report = keypoint_mse(pred, truth, sweeping_schema(), {k: (W, H) for k in truth})
print(report.table())
print(f"\ngrasp role: one record off by (3,4) -> mean {report.per_role['grasp'].mse} "
      f"(hand check: ((9+16)/2 + 0) / 2 = 6.25)\n")

ledger = TrialLedger(Path(tempfile.mkdtemp(prefix="forge-demo-eval-")) / "trials.jsonl")
for i in range(15):
    ledger.append(TrialOutcome("table_sweeping", f"object-set-{i % 3}", success=(i != 7)))
for i in range(15):
    ledger.append(TrialOutcome("drawer_closing", f"object-set-{i % 3}", success=True))
print(ledger.table())
