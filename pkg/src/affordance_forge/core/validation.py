"""Total validation of scene records: reports, never raises."""

from __future__ import annotations

from dataclasses import dataclass, field

from .types import SceneRecord, SyntheticProvenance, TaskSchema

__all__ = ["Violation", "ValidationReport", "validate_record"]


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    role: str | None = None
    object_index: int | None = None

    def to_json(self) -> dict:
        doc: dict = {"code": self.code, "message": self.message}
        if self.role is not None:
            doc["role"] = self.role
        if self.object_index is not None:
            doc["object_index"] = self.object_index
        return doc


@dataclass
class ValidationReport:
    record_id: str
    violations: list[Violation] = field(default_factory=list)
    draft: bool = False

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, code: str, message: str, role: str | None = None,
            object_index: int | None = None) -> None:
        self.violations.append(Violation(code, message, role, object_index))

    def to_json(self) -> dict:
        return {
            "record_id": self.record_id,
            "draft": self.draft,
            "violations": [v.to_json() for v in self.violations],
        }


def validate_record(
    record: SceneRecord,
    schema: TaskSchema,
    image_size: tuple[int, int] | None = None,
    known_ids: frozenset[str] | set[str] | None = None,
) -> ValidationReport:
    """Check every record invariant and list all violations found.

    A record with no keypoints at all is reported as a draft (an annotation
    in progress), not as a violation. ``image_size`` enables bounds checks;
    ``known_ids`` enables the synthetic parent-link check.
    """
    report = ValidationReport(record_id=record.record_id)

    if record.task_id != schema.task_id:
        report.add("schema_mismatch",
                   f"record task '{record.task_id}' validated against schema '{schema.task_id}'")

    if len(record.keypoints) == 0:
        report.draft = True
    else:
        present = record.keypoints.roles
        for role in sorted(schema.required_roles, key=lambda r: r.value):
            if role not in present:
                report.add("missing_role", f"required role '{role.value}' absent", role=role.value)
        for role in sorted(present - schema.required_roles, key=lambda r: r.value):
            report.add("unexpected_role",
                       f"role '{role.value}' not in the task schema", role=role.value)

    n_objects = len(record.objects)
    for role, binding in record.keypoints.items():
        if binding.object_index >= n_objects:
            report.add(
                "dangling_object",
                f"role '{role.value}' references object {binding.object_index} "
                f"but the record has {n_objects} objects",
                role=role.value,
                object_index=binding.object_index,
            )
        if image_size is not None:
            width, height = image_size
            if not binding.point.in_bounds(width, height):
                report.add(
                    "out_of_bounds",
                    f"role '{role.value}' at ({binding.point.x:.2f}, {binding.point.y:.2f}) "
                    f"outside {width}x{height}",
                    role=role.value,
                )

    if isinstance(record.provenance, SyntheticProvenance):
        prov = record.provenance
        if known_ids is not None and prov.parent_id not in known_ids:
            report.add("bad_parent", f"parent record '{prov.parent_id}' does not exist")
        seen_objects = {obj.object_index for obj in prov.objects}
        for obj in prov.objects:
            if obj.object_index >= n_objects:
                report.add(
                    "dangling_object",
                    f"provenance references object {obj.object_index} "
                    f"but the record has {n_objects} objects",
                    object_index=obj.object_index,
                )
        missing = set(range(n_objects)) - seen_objects
        if missing:
            report.add(
                "incomplete_provenance",
                f"objects {sorted(missing)} have no recorded transform",
            )
    return report
