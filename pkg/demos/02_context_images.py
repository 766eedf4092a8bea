"""The three context image kinds that guide inpainting.

Soft edges are the default; depth and segmentation-mask variants exist for
ablations. Writes all three as PNGs next to the script output directory.
"""

import tempfile
from pathlib import Path

import numpy as np

from affordance_forge import images
from affordance_forge.context import (
    compute_depth_context,
    compute_mask_context,
    compute_soft_edge,
    masked_context,
)
from affordance_forge.fixtures import make_sweeping_scene
from affordance_forge.rasters import BinaryMask

out = Path(tempfile.mkdtemp(prefix="forge-demo-ctx-"))
scene = make_sweeping_scene(0, seed=2024)
union = BinaryMask(scene.masks[0].bits | scene.masks[1].bits)

edge = compute_soft_edge(scene.rgb)
depth = compute_depth_context(scene.depth_m, union)
seg = compute_mask_context(union)

for name, ctx in (("soft_edge", edge), ("depth", depth), ("seg_mask", seg)):
    path = out / f"{name}.png"
    path.write_bytes(images.encode_context_png(ctx))
    print(f"{name:<10} values in [{ctx.values.min():.3f}, {ctx.values.max():.3f}]"
          f"  nonzero {np.count_nonzero(ctx.values):6d} px  -> {path}")

piece = masked_context(edge, scene.masks[0])
print(f"\nmasked soft edge for object 0 (brush): "
      f"{np.count_nonzero(piece.values)} px inside the mask, "
      f"zero outside: {bool(np.all(piece.values[~scene.masks[0].bits] == 0))}")
