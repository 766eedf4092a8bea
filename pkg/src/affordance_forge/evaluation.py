"""Per-keypoint MSE on held-out sets and the manual success-rate trial ledger.

MSE is computed in the normalized 0-999 coordinate space; each compared point
contributes ((dnx)^2 + (dny)^2) / 2, averaged over records per role (the /2
averaging convention is declared in the report metadata). Missing predicted
roles are counted separately and never silently folded into the average; an
optional penalty produces a second, clearly labeled figure. Raw-pixel MSE is
reported alongside for interpretability when image sizes are known.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .core.coords import normalize_point
from .core.types import ROLE_ORDER, KeypointSet, TaskSchema

__all__ = [
    "EvaluationError",
    "RoleMetrics",
    "MseReport",
    "keypoint_mse",
    "TrialOutcome",
    "TrialLedger",
]

METRIC_NOTE = "normalized 0-999 space; per point ((dnx)^2 + (dny)^2) / 2, mean over records"


class EvaluationError(ValueError):
    pass


@dataclass
class RoleMetrics:
    role: str
    sum_sq: float = 0.0
    sum_sq_px: float = 0.0
    count: int = 0
    missing: int = 0

    @property
    def mse(self) -> float | None:
        return self.sum_sq / self.count if self.count else None

    @property
    def mse_pixels(self) -> float | None:
        return self.sum_sq_px / self.count if self.count else None

    def mse_with_penalty(self, penalty: float) -> float | None:
        total = self.count + self.missing
        if total == 0:
            return None
        return (self.sum_sq + self.missing * penalty) / total


@dataclass
class MseReport:
    per_role: dict[str, RoleMetrics]
    compared_records: int
    missing_penalty: float | None = None

    @property
    def overall(self) -> float | None:
        count = sum(m.count for m in self.per_role.values())
        if count == 0:
            return None
        return sum(m.sum_sq for m in self.per_role.values()) / count

    @property
    def overall_pixels(self) -> float | None:
        count = sum(m.count for m in self.per_role.values())
        if count == 0:
            return None
        return sum(m.sum_sq_px for m in self.per_role.values()) / count

    @property
    def total_missing(self) -> int:
        return sum(m.missing for m in self.per_role.values())

    def to_json(self) -> dict:
        roles = {}
        for role, m in self.per_role.items():
            entry = {
                "mse": m.mse,
                "mse_pixels": m.mse_pixels,
                "count": m.count,
                "missing": m.missing,
            }
            if self.missing_penalty is not None:
                entry["mse_with_penalty"] = m.mse_with_penalty(self.missing_penalty)
            roles[role] = entry
        return {
            "metric": METRIC_NOTE,
            "compared_records": self.compared_records,
            "per_role": roles,
            "overall": {
                "mse": self.overall,
                "mse_pixels": self.overall_pixels,
                "missing": self.total_missing,
            },
            "missing_penalty": self.missing_penalty,
        }

    def table(self) -> str:
        header = f"{'role':<14}{'mse':>12}{'mse_px':>12}{'count':>8}{'missing':>9}"
        lines = [header, "-" * len(header)]

        def fmt(value: float | None) -> str:
            return f"{value:>12.3f}" if value is not None else f"{'-':>12}"

        for role in [r.value for r in ROLE_ORDER] :
            if role not in self.per_role:
                continue
            m = self.per_role[role]
            lines.append(f"{role:<14}{fmt(m.mse)}{fmt(m.mse_pixels)}{m.count:>8}{m.missing:>9}")
        lines.append("-" * len(header))
        lines.append(
            f"{'overall':<14}{fmt(self.overall)}{fmt(self.overall_pixels)}"
            f"{sum(m.count for m in self.per_role.values()):>8}{self.total_missing:>9}"
        )
        return "\n".join(lines)


def keypoint_mse(
    predictions: dict[str, KeypointSet],
    ground_truth: dict[str, KeypointSet],
    schema: TaskSchema,
    image_sizes: dict[str, tuple[int, int]],
    missing_penalty: float | None = None,
) -> MseReport:
    """Per-role and overall MSE of predictions against ground truth.

    ``predictions`` may cover a subset of records; ids not present in the
    ground truth are an error. A required role absent from a prediction
    counts toward that role's ``missing`` column.
    """
    unknown = set(predictions) - set(ground_truth)
    if unknown:
        raise EvaluationError(f"predictions for unknown record ids: {sorted(unknown)[:5]}")
    if not ground_truth:
        raise EvaluationError("empty evaluation set")

    roles = [r for r in ROLE_ORDER if r in schema.required_roles]
    metrics = {role.value: RoleMetrics(role.value) for role in roles}
    for record_id, truth in sorted(ground_truth.items()):
        width, height = image_sizes[record_id]
        predicted = predictions.get(record_id)
        for role in roles:
            true_binding = truth.get(role)
            if true_binding is None:
                continue
            m = metrics[role.value]
            pred_binding = predicted.get(role) if predicted is not None else None
            if pred_binding is None:
                m.missing += 1
                continue
            t = normalize_point(true_binding.point, width, height)
            p = normalize_point(pred_binding.point, width, height)
            m.sum_sq += ((p.nx - t.nx) ** 2 + (p.ny - t.ny) ** 2) / 2.0
            dx = pred_binding.point.x - true_binding.point.x
            dy = pred_binding.point.y - true_binding.point.y
            m.sum_sq_px += (dx * dx + dy * dy) / 2.0
            m.count += 1
    return MseReport(
        per_role=metrics,
        compared_records=len(ground_truth),
        missing_penalty=missing_penalty,
    )


# -- success-rate trial ledger ---------------------------------------------------


@dataclass(frozen=True)
class TrialOutcome:
    task_id: str
    object_set: str
    success: bool
    note: str = ""


class TrialLedger:
    """Append-only record of physical trial outcomes, rendered as k/n tables."""

    def __init__(self, path: str | Path):
        self.path = Path(path)

    def append(self, outcome: TrialOutcome) -> None:
        doc = {
            "task_id": outcome.task_id,
            "object_set": outcome.object_set,
            "success": outcome.success,
            "note": outcome.note,
        }
        with self.path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(doc, ensure_ascii=False) + "\n")

    def outcomes(self) -> list[TrialOutcome]:
        if not self.path.exists():
            return []
        result = []
        with self.path.open(encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    doc = json.loads(line)
                    result.append(
                        TrialOutcome(
                            task_id=doc["task_id"],
                            object_set=doc["object_set"],
                            success=bool(doc["success"]),
                            note=doc.get("note", ""),
                        )
                    )
        return result

    @staticmethod
    def _ratio(successes: int, total: int) -> str:
        return f"{successes}/{total}"

    def success_rates(self, task_id: str | None = None) -> dict[str, dict[str, str]]:
        """{task_id: {"overall": "k/n", "<object_set>": "k/n", ...}}"""
        table: dict[str, dict[str, list[int]]] = {}
        for outcome in self.outcomes():
            if task_id is not None and outcome.task_id != task_id:
                continue
            per_task = table.setdefault(outcome.task_id, {})
            for key in ("overall", outcome.object_set):
                bucket = per_task.setdefault(key, [0, 0])
                bucket[0] += int(outcome.success)
                bucket[1] += 1
        rendered: dict[str, dict[str, str]] = {}
        for tid, buckets in table.items():
            rendered[tid] = {key: self._ratio(s, n) for key, (s, n) in buckets.items()}
        if task_id is not None and task_id not in rendered:
            rendered[task_id] = {"overall": "0/0"}
        return rendered

    def table(self, task_id: str | None = None) -> str:
        rates = self.success_rates(task_id)
        if not rates or all(v.get("overall") == "0/0" for v in rates.values()):
            return "warning: trial ledger is empty (0/0)"
        lines = [f"{'task':<20}{'object set':<18}{'success':>9}",
                 "-" * 47]
        for tid in sorted(rates):
            buckets = rates[tid]
            lines.append(f"{tid:<20}{'overall':<18}{buckets['overall']:>9}")
            for key in sorted(k for k in buckets if k != "overall"):
                lines.append(f"{'':<20}{key:<18}{buckets[key]:>9}")
        return "\n".join(lines)
