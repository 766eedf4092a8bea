"""Domain types, coordinate normalization, text I/O and dataset persistence."""

from .coords import (
    GRID,
    CoordinateBoundsError,
    NormalizedCoord,
    PixelPoint,
    denormalize_point,
    normalize_point,
)
from .store import (
    SCHEMA_VERSION,
    DatasetStore,
    DatasetView,
    StoreError,
    UnknownRecordError,
    VersionConflictError,
    record_from_json,
    record_to_json,
    schema_from_json,
    schema_to_json,
    validate_dataset,
)
from .textio import (
    AffordanceParseError,
    CoordinateRangeError,
    DuplicateRoleError,
    MissingRoleError,
    SchemaMismatchError,
    StrictFormatError,
    UnparseableTextError,
    parse_affordance_text,
    render_affordance_text,
)
from .types import (
    ROLE_ORDER,
    FixedHeight,
    FromDepthOffset,
    GripperHeightMode,
    GripperOrientationMode,
    HumanProvenance,
    KeypointBinding,
    KeypointRole,
    KeypointSet,
    ObjectEntry,
    ObjectSynthesis,
    PromptTemplate,
    Provenance,
    SceneRecord,
    SyntheticProvenance,
    TaskSchema,
    TopDownFixedYaw,
    YawFromGraspToFunction,
)
from .validation import ValidationReport, Violation, validate_record

__all__ = [
    "GRID",
    "CoordinateBoundsError",
    "NormalizedCoord",
    "PixelPoint",
    "denormalize_point",
    "normalize_point",
    "SCHEMA_VERSION",
    "DatasetStore",
    "DatasetView",
    "StoreError",
    "UnknownRecordError",
    "VersionConflictError",
    "record_from_json",
    "record_to_json",
    "schema_from_json",
    "schema_to_json",
    "validate_dataset",
    "AffordanceParseError",
    "CoordinateRangeError",
    "DuplicateRoleError",
    "MissingRoleError",
    "SchemaMismatchError",
    "StrictFormatError",
    "UnparseableTextError",
    "parse_affordance_text",
    "render_affordance_text",
    "ROLE_ORDER",
    "FixedHeight",
    "FromDepthOffset",
    "GripperHeightMode",
    "GripperOrientationMode",
    "HumanProvenance",
    "KeypointBinding",
    "KeypointRole",
    "KeypointSet",
    "ObjectEntry",
    "ObjectSynthesis",
    "PromptTemplate",
    "Provenance",
    "SceneRecord",
    "SyntheticProvenance",
    "TaskSchema",
    "TopDownFixedYaw",
    "YawFromGraspToFunction",
    "ValidationReport",
    "Violation",
    "validate_record",
]
