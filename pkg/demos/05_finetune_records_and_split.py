"""Fine-tuning record serialization for both heads, plus leak-free splitting."""

import json
import tempfile
from pathlib import Path

from affordance_forge.core.store import DatasetStore, DatasetView
from affordance_forge.fixtures import build_corpus
from affordance_forge.gateway import LocalMockServices, registry_from_stores
from affordance_forge.records import (
    AugmentationConfig,
    HoldoutSpec,
    build_records,
    export_jsonl,
    split_dataset,
)
from affordance_forge.synthesis import SynthesisConfig, synthesize_dataset
from affordance_forge.transform import TransformConfig

root = Path(tempfile.mkdtemp(prefix="forge-demo-records-"))
human = build_corpus(root / "human", n=6, novel_count=2)
out = DatasetStore(root / "synthetic", create=True)
synthesize_dataset(
    human, out,
    LocalMockServices(registry_from_stores([human]), inpaint_mode="texture"),
    SynthesisConfig(target_size=8,
                    transform=TransformConfig.defaults_for_image(640, 480),
                    master_seed=3),
)
view = DatasetView([human, out])

result = split_dataset(view, HoldoutSpec(object_set="novel"))
print(f"split: {len(result.train_ids)} train / {len(result.test_ids)} test "
      f"/ {len(result.excluded_ids)} excluded (descendants of held-out scenes)\n")

aug = AugmentationConfig(replicas=2, rotation_max_deg=10.0, hflip=True, color_jitter=0.2)
for head in ("nl", "regression"):
    records, stats = build_records(
        view, result.train_ids, head, aug, seed=1, out_dir=root / f"records-{head}"
    )
    path = root / f"records-{head}" / "train.jsonl"
    export_jsonl(records, path)
    row = json.loads(path.read_text().splitlines()[0])
    print(f"{head} head: {stats.emitted} records "
          f"({stats.dropped_replicas} replicas dropped)")
    if head == "nl":
        print(f"  sample response: {row['response'].splitlines()[0]} ...")
    else:
        print(f"  sample targets: {row['targets']}")
        print(f"  presence mask:  {row['mask']}")
    print()
