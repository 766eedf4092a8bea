"""Deterministic stand-ins for the description/segmentation/inpainting models.

The mocks are pure functions of their requests: descriptions and masks come
from a registry built out of a fixture dataset (keyed by pixel-content hash),
description resampling indexes an authored per-category variant table, and
inpainting fills the region with a seed-hashed smooth texture modulated by
the context values (or passes the image through untouched in ``passthrough``
mode, which is what the identity checks of the pipeline use).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from ..core.store import DatasetStore
from ..rasters import BinaryMask
from ..seeding import derive_seed
from .client import (
    EmptyResponseError,
    InpaintRequest,
    NoMatchError,
    composite_outside_region,
)

__all__ = [
    "DESCRIPTOR_VARIANTS",
    "GENERIC_ADJECTIVES",
    "MockRegistry",
    "registry_from_stores",
    "LocalMockServices",
]

# Authored per-category variant lists for description resampling. Index is
# seed modulo list length, so ("brush", seed=1) -> "red dustpan brush".
DESCRIPTOR_VARIANTS: dict[str, list[str]] = {
    "brush": [
        "blue sweeping brush",
        "red dustpan brush",
        "wooden scrub brush",
        "green broom head",
    ],
    "snack package": [
        "shiny foil chip bag",
        "crumpled candy wrapper",
        "green tea carton",
        "striped cookie packet",
    ],
    "drawer": [
        "white plastic drawer",
        "dark walnut drawer",
        "metal filing drawer",
    ],
    "towel": [
        "striped kitchen towel",
        "plain gray hand towel",
        "waffle-weave dish towel",
    ],
    "trowel": [
        "steel garden trowel",
        "orange-handled trowel",
    ],
    "usb cable": [
        "braided usb cable",
        "white charging cable",
    ],
}

GENERIC_ADJECTIVES = [
    "crimson",
    "teal",
    "striped",
    "wooden",
    "matte black",
    "glossy",
    "tiny",
    "oversized",
]


def _pixel_hash(image: np.ndarray) -> str:
    arr = np.ascontiguousarray(image)
    h = hashlib.sha256()
    h.update(str(arr.shape).encode())
    h.update(arr.tobytes())
    return h.hexdigest()


@dataclass
class MockRegistry:
    """Scene knowledge the mocks answer from, keyed by image content hash."""

    descriptors: dict[str, list[str]] = field(default_factory=dict)
    masks: dict[tuple[str, str], np.ndarray] = field(default_factory=dict)

    def add_scene(self, image: np.ndarray, descriptors: list[str],
                  masks: dict[str, BinaryMask]) -> None:
        key = _pixel_hash(image)
        self.descriptors[key] = list(descriptors)
        for descriptor, mask in masks.items():
            self.masks[(key, descriptor)] = np.array(mask.bits)

    def lookup_descriptors(self, image: np.ndarray) -> list[str] | None:
        return self.descriptors.get(_pixel_hash(image))

    def lookup_mask(self, image: np.ndarray, descriptor: str) -> np.ndarray | None:
        return self.masks.get((_pixel_hash(image), descriptor))


def registry_from_stores(stores: list[DatasetStore]) -> MockRegistry:
    """Index every record's image hash to its descriptors and stored masks."""
    registry = MockRegistry()
    for store in stores:
        for record in store.iter_records():
            rgb = store.load_rgb(record.record_id)
            masks: dict[str, BinaryMask] = {}
            for index, entry in enumerate(record.objects):
                mask = store.load_mask(record.record_id, index)
                if mask is not None:
                    masks[entry.descriptor] = mask
            registry.add_scene(rgb, [o.descriptor for o in record.objects], masks)
    return registry


def _scan_instruction(instruction: str, vocabulary: list[str]) -> list[str]:
    """Known object nouns mentioned in the instruction, in order of mention."""
    lowered = instruction.lower()
    hits: list[tuple[int, str]] = []
    claimed: list[tuple[int, int]] = []
    for noun in sorted(vocabulary, key=len, reverse=True):
        pos = lowered.find(noun.lower())
        if pos < 0:
            continue
        if any(pos < end and pos + len(noun) > start for start, end in claimed):
            continue  # substring of an already matched, longer noun
        hits.append((pos, noun))
        claimed.append((pos, pos + len(noun)))
    hits.sort()
    return [noun for _, noun in hits]


class LocalMockServices:
    """In-process deterministic implementation of the model-services protocol."""

    def __init__(self, registry: MockRegistry | None = None, inpaint_mode: str = "texture"):
        if inpaint_mode not in ("texture", "passthrough"):
            raise ValueError(f"unknown inpaint mode {inpaint_mode!r}")
        self.registry = registry or MockRegistry()
        self.inpaint_mode = inpaint_mode

    # -- protocol -------------------------------------------------------------

    def describe_objects(self, image: np.ndarray, instruction: str) -> list[str]:
        if not instruction or not instruction.strip():
            raise ValueError("instruction must be non-empty")
        known = self.registry.lookup_descriptors(image)
        if known:
            return list(known)
        vocabulary = sorted(
            set(DESCRIPTOR_VARIANTS) | {d for ds in self.registry.descriptors.values() for d in ds}
        )
        hits = _scan_instruction(instruction, vocabulary)
        if not hits:
            raise EmptyResponseError(
                "mock has no scene entry for this image and the instruction "
                "names no known objects"
            )
        return hits

    def segment(self, image: np.ndarray, descriptor: str) -> BinaryMask:
        if not descriptor or not descriptor.strip():
            raise ValueError("descriptor must be non-empty")
        bits = self.registry.lookup_mask(image, descriptor)
        if bits is None:
            raise NoMatchError(f"mock has no mask for descriptor {descriptor!r}")
        return BinaryMask(bits)

    def resample_description(self, descriptor: str, seed: int) -> str:
        if not descriptor or not descriptor.strip():
            raise ValueError("descriptor must be non-empty")
        variants = DESCRIPTOR_VARIANTS.get(descriptor)
        if variants is None:
            adjective = GENERIC_ADJECTIVES[seed % len(GENERIC_ADJECTIVES)]
            return f"{adjective} {descriptor}"
        return variants[seed % len(variants)]

    def inpaint(self, request: InpaintRequest) -> np.ndarray:
        if self.inpaint_mode == "passthrough" or request.region.is_empty():
            return composite_outside_region(request.image, request.image, request.region)
        painted = np.array(request.image)
        texture = self._texture(request)
        painted[request.region.bits] = texture[request.region.bits]
        return composite_outside_region(request.image, painted, request.region)

    # -- texture ---------------------------------------------------------------

    @staticmethod
    def _texture(request: InpaintRequest) -> np.ndarray:
        """Smooth seeded color field brightened by the context values."""
        height, width = request.image.shape[:2]
        rng = np.random.default_rng(derive_seed(request.seed, request.prompt, "mock-inpaint"))
        color = rng.uniform(0.25, 0.95, size=3)
        coarse = rng.uniform(0.0, 1.0, size=(10, 10))
        ys = (np.arange(height) + 0.5) * 10 / height - 0.5
        xs = (np.arange(width) + 0.5) * 10 / width - 0.5
        grid_y, grid_x = np.meshgrid(ys, xs, indexing="ij")
        noise = ndimage.map_coordinates(coarse, [grid_y, grid_x], order=1, mode="nearest")
        value = np.clip(0.2 + 0.55 * request.context.values + 0.25 * noise, 0.0, 1.0)
        return np.clip(value[:, :, None] * color[None, None, :] * 255.0, 0, 255).astype(np.uint8)
