"""Scenes, keypoint roles, and the text form of affordances.

Builds a small fixture corpus, inspects one record, renders its keypoints
into the canonical 0-999 text format, and parses a sloppy model-style reply
back into pixel coordinates.
"""

import tempfile
from pathlib import Path

from affordance_forge.core.coords import normalize_point
from affordance_forge.core.store import validate_dataset
from affordance_forge.core.textio import parse_affordance_text, render_affordance_text
from affordance_forge.fixtures import build_corpus

root = Path(tempfile.mkdtemp(prefix="forge-demo-"))
store = build_corpus(root / "human", n=3, novel_count=1)
print(f"built {len(store.record_ids())} scenes under {store.root}\n")

record = store.get_record("human-0000")
width, height = store.image_size(record.record_id)
schema = store.get_schema(record.task_id)

print(f"instruction: {record.instruction}")
print(f"objects:     {[o.descriptor for o in record.objects]}")
for role, binding in record.keypoints.items():
    n = normalize_point(binding.point, width, height)
    print(f"  {role.value:<13} pixel ({binding.point.x:6.1f}, {binding.point.y:6.1f})"
          f"  normalized ({n.nx}, {n.ny})  object {binding.object_index}")

text = render_affordance_text(record.keypoints, schema, width, height)
print("\ncanonical affordance text:")
print(text)

sloppy = "Sure thing! " + text.replace("\n", ", ").replace("(", "[[").replace(")", "]]")
print("\nparsing a sloppy reply:")
print(f"  {sloppy[:90]}...")
parsed = parse_affordance_text(sloppy, schema, width, height)
match = all(
    normalize_point(parsed[r].point, width, height)
    == normalize_point(record.keypoints[r].point, width, height)
    for r in record.keypoints
)
print(f"  recovered all roles, coordinates match: {match}")

reports = validate_dataset(store)
print(f"\nvalidation: {sum(r.ok for r in reports)}/{len(reports)} records clean")
