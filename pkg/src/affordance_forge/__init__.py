"""affordance_forge: affordance-aware synthetic data pipeline for keypoint
manipulation learning.

Library layout:
  core        domain types, normalization, affordance text I/O, dataset store
  transform   seeded similarity + elastic transforms, mask/context/keypoint coherence
  context     soft-edge / depth / segmentation-mask guidance images
  gateway     typed clients for description/segmentation/inpainting services + mocks
  synthesis   the transform-and-inpaint dataset growth loop
  records     fine-tuning record serialization, augmentation and splitting
  motion      keypoints + depth -> SE(3) waypoint plans
  evaluation  per-keypoint MSE and the manual trial ledger
  api, cli    REST annotation/review API and the `forge` command line
"""

__version__ = "0.1.0"
