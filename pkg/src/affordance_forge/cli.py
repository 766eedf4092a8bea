"""The `forge` command line: every pipeline operation behind one entry point.

Every subcommand honors ``--seed`` and ``--config <file>``; the config file
is TOML with one section per subcommand plus a shared ``[transform]`` section
(see docs/config.md). Command-line flags win over config values. All commands
exit nonzero on any error.
"""

from __future__ import annotations

import functools
import json
import logging
import math
import sys
from pathlib import Path

import click
import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import images
from .context import compute_depth_context, compute_mask_context, compute_soft_edge
from .core.coords import PixelPoint
from .core.store import DatasetStore, DatasetView, validate_dataset
from .core.textio import AffordanceParseError, parse_affordance_text
from .core.types import (
    FromDepthOffset,
    KeypointBinding,
    KeypointRole,
    KeypointSet,
    TaskSchema,
    TopDownFixedYaw,
)
from .evaluation import keypoint_mse
from .gateway import (
    HttpModelClient,
    LocalMockServices,
    ServiceEndpoint,
    create_mock_app,
    registry_from_stores,
)
from .motion import CameraModel, PlanConfig, plan_json_text, plan_motion, plan_to_table
from .rasters import BinaryMask, ContextKind
from .records import (
    AugmentationConfig,
    HoldoutSpec,
    build_records,
    export_jsonl,
    read_split_manifest,
    split_dataset,
    write_split_manifest,
)
from .synthesis import SynthesisConfig, SynthesisError, synthesize_dataset
from .transform import TransformConfig, apply_to_mask, apply_to_point, sample_transform
from .seeding import derive_seed

logger = logging.getLogger("affordance_forge")


def _setup_logging(verbose: bool) -> None:
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    root = logging.getLogger("affordance_forge")
    root.handlers[:] = [handler]
    root.setLevel(logging.DEBUG if verbose else logging.INFO)


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    with open(path, "rb") as fh:
        return tomllib.load(fh)


class Settings:
    """Merged view of config-file values and CLI arguments."""

    def __init__(self, config: dict, section: str, seed: int | None):
        self.config = config
        self.section = config.get(section, {})
        shared_seed = config.get("seed")
        self.seed = seed if seed is not None else self.section.get("seed", shared_seed or 0)

    def get(self, key: str, cli_value, default=None):
        if cli_value is not None:
            return cli_value
        if key in self.section:
            return self.section[key]
        return default

    def transform_config(self, image_size: tuple[int, int]) -> TransformConfig:
        section = self.config.get("transform", {})
        width, height = image_size
        bound = float(section.get("translation_frac", 0.15)) * min(width, height)
        return TransformConfig(
            scale_range=(
                float(section.get("scale_min", 0.75)),
                float(section.get("scale_max", 1.25)),
            ),
            rotation_range=(
                -math.radians(float(section.get("rotation_max_deg", 30.0))),
                math.radians(float(section.get("rotation_max_deg", 30.0))),
            ),
            translation_range=(-bound, bound),
            elastic_enabled=bool(section.get("elastic", True)),
            elastic_alpha=float(section.get("elastic_alpha", 8.0)),
            elastic_sigma=float(section.get("elastic_sigma", 12.0)),
            elastic_grid=(
                int(section.get("elastic_grid", 8)),
                int(section.get("elastic_grid", 8)),
            ),
            image_size=image_size,
        )


def common_options(section: str):
    def decorate(fn):
        fn = click.option("--seed", type=int, default=None, help="Master random seed.")(fn)
        fn = click.option(
            "--config", "config_path", type=click.Path(exists=True, dir_okay=False),
            default=None, help="TOML config file (see docs/config.md).",
        )(fn)
        fn = click.option("--verbose", is_flag=True, help="Debug logging to stderr.")(fn)

        @functools.wraps(fn)
        def wrapper(*args, seed=None, config_path=None, verbose=False, **kwargs):
            _setup_logging(verbose)
            settings = Settings(_load_config(config_path), section, seed)
            return fn(*args, settings=settings, **kwargs)

        return wrapper

    return decorate


def _open_stores(paths: tuple[str, ...]) -> list[DatasetStore]:
    if not paths:
        raise click.UsageError("at least one --dataset is required")
    return [DatasetStore(p) for p in paths]


def _services_from_spec(spec: str, inpaint_mode_default: str = "texture"):
    """Build model services from `mock://<dataset-dir>[?inpaint=mode]` or an
    endpoints TOML file path."""
    if spec.startswith("mock://"):
        rest = spec[len("mock://"):]
        mode = inpaint_mode_default
        if "?" in rest:
            rest, query = rest.split("?", 1)
            for pair in query.split("&"):
                key, _, value = pair.partition("=")
                if key == "inpaint":
                    mode = value
        registry = registry_from_stores([DatasetStore(rest)]) if rest else None
        return LocalMockServices(registry, inpaint_mode=mode)
    with open(spec, "rb") as fh:
        doc = tomllib.load(fh)
    section = doc.get("services", {})

    def endpoint_of(table: dict) -> ServiceEndpoint:
        return ServiceEndpoint(
            base_url=table["base_url"],
            timeout=float(table.get("timeout", 30.0)),
            max_retries=int(table.get("max_retries", 2)),
            backoff_initial=float(table.get("backoff_initial", 0.05)),
            backoff_multiplier=float(table.get("backoff_multiplier", 2.0)),
        )

    base = endpoint_of(section)
    overrides = {}
    for op in ("describe", "segment", "redescribe", "inpaint"):
        if op in section and isinstance(section[op], dict):
            merged = {**{k: v for k, v in section.items() if not isinstance(v, dict)},
                      **section[op]}
            overrides[op] = endpoint_of(merged)
    return HttpModelClient(base, overrides)


@click.group()
@click.version_option(package_name="affordance-forge")
def main() -> None:
    """Affordance-aware synthetic data pipeline."""


@main.command()
@click.option("--dataset", "datasets", multiple=True, required=True,
              type=click.Path(exists=True, file_okay=False))
@click.option("--strict", is_flag=True, help="Treat unannotated drafts as failures.")
@common_options("validate")
def validate(datasets, strict, settings) -> None:
    """Validate every record of the dataset(s)."""
    stores = _open_stores(datasets)
    reports = validate_dataset(DatasetView(stores), strict_drafts=strict)
    bad = [r for r in reports if not r.ok]
    drafts = sum(1 for r in reports if r.draft)
    for report in bad:
        for violation in report.violations:
            click.echo(f"{report.record_id}: {violation.code}: {violation.message}", err=True)
    click.echo(
        f"validated {len(reports)} records: {len(reports) - len(bad)} ok, "
        f"{len(bad)} invalid, {drafts} drafts"
    )
    if bad:
        sys.exit(1)


@main.command()
@click.option("--dataset", "dataset", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--n", "target", type=int, default=None, help="Synthetic records to produce.")
@click.option("--context", "context_kind", default=None,
              type=click.Choice([k.value for k in ContextKind]))
@click.option("--services", "services_spec", default=None,
              help="Endpoints TOML or mock://<dataset-dir>[?inpaint=texture|passthrough].")
@click.option("--margin", type=int, default=None, help="Collision margin in pixels.")
@click.option("--retries", type=int, default=None, help="Placement retries per object.")
@click.option("--shared-transform", is_flag=True,
              help="One transform per scene instead of one per object.")
@common_options("synthesize")
def synthesize(dataset, out_dir, target, context_kind, services_spec, margin, retries,
               shared_transform, settings) -> None:
    """Grow a synthetic dataset from a human example dataset."""
    store = DatasetStore(dataset)
    ids = store.record_ids()
    if not ids:
        raise click.ClickException("source dataset is empty")
    width, height = store.image_size(ids[0])

    target = settings.get("n", target, 500)
    context_kind = ContextKind(settings.get("context", context_kind, "soft_edge"))
    services_spec = settings.get("services", services_spec, f"mock://{dataset}")
    config = SynthesisConfig(
        target_size=int(target),
        transform=settings.transform_config((width, height)),
        context_kind=context_kind,
        per_object_independent_transform=not shared_transform,
        collision_margin=int(settings.get("margin", margin, 4)),
        max_placement_retries=int(settings.get("retries", retries, 20)),
        master_seed=int(settings.seed),
    )
    services = _services_from_spec(services_spec)
    out_store = DatasetStore(out_dir, create=True)
    try:
        stats = synthesize_dataset(store, out_store, services, config)
    except SynthesisError as err:
        raise click.ClickException(str(err))
    click.echo(
        f"synthesized {stats.accepted} records ({stats.skipped} skipped, "
        f"{stats.placement_fallbacks} identity fallbacks) -> {out_dir}"
    )
    if stats.accepted != config.target_size:
        sys.exit(1)


@main.command()
@click.option("--dataset", "dataset", type=click.Path(exists=True, file_okay=False))
@click.option("--id", "record_id", default=None, help="Record to compute context for.")
@click.option("--image", "image_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Standalone image (soft_edge only).")
@click.option("--kind", default=None, type=click.Choice([k.value for k in ContextKind]))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@common_options("context")
def context(dataset, record_id, image_path, kind, out_path, settings) -> None:
    """Emit a context image as an 8-bit grayscale PNG."""
    kind = ContextKind(settings.get("kind", kind, "soft_edge"))
    if image_path is not None:
        if kind != ContextKind.SOFT_EDGE:
            raise click.UsageError("--image supports only the soft_edge kind")
        ctx = compute_soft_edge(images.load_rgb(image_path))
    else:
        if dataset is None or record_id is None:
            raise click.UsageError("provide --dataset and --id, or --image")
        store = DatasetStore(dataset)
        record = store.get_record(record_id)
        rgb = store.load_rgb(record_id)
        if kind == ContextKind.SOFT_EDGE:
            ctx = compute_soft_edge(rgb)
        else:
            union = np.zeros(rgb.shape[:2], dtype=bool)
            for index in range(len(record.objects)):
                mask = store.load_mask(record_id, index)
                if mask is not None:
                    union |= mask.bits
            if not union.any():
                raise click.ClickException("record has no stored masks")
            if kind == ContextKind.DEPTH:
                depth = store.load_depth(record_id)
                if depth is None:
                    raise click.ClickException("record has no depth image")
                ctx = compute_depth_context(depth, BinaryMask(union))
            else:
                ctx = compute_mask_context(BinaryMask(union))
    Path(out_path).write_bytes(images.encode_context_png(ctx))
    click.echo(f"wrote {kind.value} context -> {out_path}")


_ROLE_COLORS = {
    KeypointRole.GRASP: (255, 64, 64),
    KeypointRole.FUNCTION: (255, 170, 0),
    KeypointRole.TARGET: (64, 200, 64),
    KeypointRole.PRE_CONTACT: (70, 130, 255),
    KeypointRole.POST_CONTACT: (200, 90, 255),
}


@main.command("transform-preview")
@click.option("--dataset", "dataset", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--id", "record_id", required=True)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@common_options("transform_preview")
def transform_preview(dataset, record_id, out_path, settings) -> None:
    """Sample a transform per object and render an overlay image."""
    from PIL import Image, ImageDraw

    store = DatasetStore(dataset)
    record = store.get_record(record_id)
    rgb = store.load_rgb(record_id)
    height, width = rgb.shape[:2]
    config = settings.transform_config((width, height))

    overlay = rgb.astype(np.float64)
    moved = {}
    for index in range(len(record.objects)):
        mask = store.load_mask(record_id, index)
        if mask is None:
            continue
        spec = sample_transform(
            config, derive_seed(int(settings.seed), "object", index),
            center=PixelPoint(*mask.centroid()),
        )
        warped = apply_to_mask(spec, mask)
        tint = np.array([80.0, 160.0, 255.0]) if index % 2 == 0 else np.array([255.0, 200.0, 60.0])
        overlay[warped.bits] = 0.55 * overlay[warped.bits] + 0.45 * tint
        for role, binding in record.keypoints.items():
            if binding.object_index == index:
                moved[role] = apply_to_point(spec, binding.point)

    img = Image.fromarray(overlay.round().clip(0, 255).astype(np.uint8))
    draw = ImageDraw.Draw(img)
    for role, binding in record.keypoints.items():
        x, y = binding.point.x, binding.point.y
        color = _ROLE_COLORS[role]
        draw.ellipse([x - 4, y - 4, x + 4, y + 4], outline=color, width=2)
    for role, point in moved.items():
        x, y = point.x, point.y
        color = _ROLE_COLORS[role]
        draw.line([x - 5, y, x + 5, y], fill=color, width=2)
        draw.line([x, y - 5, x, y + 5], fill=color, width=2)
    img.save(out_path, format="PNG")
    click.echo(f"wrote transform preview -> {out_path}")


@main.command()
@click.option("--dataset", "datasets", multiple=True, required=True,
              type=click.Path(exists=True, file_okay=False))
@click.option("--holdout-tag", default=None, help="Hold out records with this object-set tag.")
@click.option("--holdout-ids", type=click.Path(exists=True, dir_okay=False), default=None,
              help="File with one held-out record id per line.")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@common_options("split")
def split(datasets, holdout_tag, holdout_ids, out_path, settings) -> None:
    """Write a train/test split manifest with parent-child leakage excluded."""
    holdout_tag = settings.get("holdout_tag", holdout_tag)
    if (holdout_tag is None) == (holdout_ids is None):
        raise click.UsageError("provide exactly one of --holdout-tag / --holdout-ids")
    if holdout_tag is not None:
        spec = HoldoutSpec(object_set=holdout_tag)
    else:
        ids = frozenset(
            line.strip() for line in Path(holdout_ids).read_text().splitlines() if line.strip()
        )
        spec = HoldoutSpec(record_ids=ids)
    view = DatasetView(_open_stores(datasets))
    result = split_dataset(view, spec)
    write_split_manifest(result, out_path)
    click.echo(
        f"split: {len(result.train_ids)} train, {len(result.test_ids)} test, "
        f"{len(result.excluded_ids)} excluded -> {out_path}"
    )


@main.command("build-records")
@click.option("--dataset", "datasets", multiple=True, required=True,
              type=click.Path(exists=True, file_okay=False))
@click.option("--split", "split_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--head", type=click.Choice(["nl", "regression"]), default=None)
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--replicas", type=int, default=None)
@click.option("--rotation-deg", type=float, default=None)
@click.option("--crop/--no-crop", default=None)
@click.option("--hflip/--no-hflip", default=None)
@click.option("--vflip/--no-vflip", default=None)
@click.option("--color-jitter", type=float, default=None)
@common_options("build_records")
def build_records_cmd(datasets, split_path, head, out_dir, replicas, rotation_deg, crop,
                      hflip, vflip, color_jitter, settings) -> None:
    """Serialize train/test fine-tuning records from a split manifest."""
    head = settings.get("head", head, "nl")
    aug = AugmentationConfig(
        replicas=int(settings.get("replicas", replicas, 1)),
        rotation_max_deg=float(settings.get("rotation_deg", rotation_deg, 0.0)),
        crop=bool(settings.get("crop", crop, False)),
        hflip=bool(settings.get("hflip", hflip, False)),
        vflip=bool(settings.get("vflip", vflip, False)),
        color_jitter=float(settings.get("color_jitter", color_jitter, 0.0)),
    )
    view = DatasetView(_open_stores(datasets))
    manifest = read_split_manifest(split_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    identity = AugmentationConfig()
    for side, ids, side_aug in (
        ("train", manifest.train_ids, aug),
        ("test", manifest.test_ids, identity),  # never augment the test side
    ):
        records, stats = build_records(
            view, ids, head, side_aug, seed=int(settings.seed), out_dir=out
        )
        export_jsonl(records, out / f"{side}.jsonl")
        click.echo(
            f"{side}: {stats.emitted} records ({stats.dropped_replicas} replicas dropped) "
            f"-> {out / (side + '.jsonl')}"
        )


def _camera_from_config(settings: Settings, width: int, height: int) -> CameraModel:
    section = settings.config.get("camera", {})
    return CameraModel(
        fx=float(section.get("fx", 600.0)),
        fy=float(section.get("fy", 600.0)),
        cx=float(section.get("cx", width / 2.0)),
        cy=float(section.get("cy", height / 2.0)),
        rotation_quat=tuple(section.get("rotation_quat", (0.0, 0.0, 0.0, 1.0))),
        translation=tuple(section.get("translation", (0.0, 0.0, 0.0))),
    )


@main.command()
@click.option("--dataset", "dataset", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--id", "record_id", required=True)
@click.option("--json", "as_json", is_flag=True, help="Emit the JSON waypoint list.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None)
@common_options("plan")
def plan(dataset, record_id, as_json, out_path, settings) -> None:
    """Plan SE(3) waypoints for a record's annotated keypoints."""
    store = DatasetStore(dataset)
    record = store.get_record(record_id)
    schema = store.get_schema(record.task_id)
    depth = store.load_depth(record_id)
    if depth is None:
        raise click.ClickException(f"record '{record_id}' has no depth image")
    width, height = store.image_size(record_id)
    cam = _camera_from_config(settings, width, height)
    motion_plan = plan_motion(record.keypoints, depth, cam, schema, PlanConfig())
    text = plan_json_text(motion_plan) if as_json else plan_to_table(motion_plan)
    if out_path:
        Path(out_path).write_text(text + "\n", encoding="utf-8")
        click.echo(f"wrote plan -> {out_path}")
    else:
        click.echo(text)


def _schema_for_eval(settings: Settings, roles: set[KeypointRole]) -> TaskSchema:
    return TaskSchema(
        task_id="eval",
        instruction_template="{object0}",
        required_roles=frozenset(roles),
        gripper_height_mode=FromDepthOffset(0.0),
        gripper_orientation_mode=TopDownFixedYaw(0.0),
    )


def _load_ground_truth(test_path: Path):
    """Ground truth keypoint sets + image sizes from a test.jsonl file."""
    from .core.coords import NormalizedCoord, denormalize_point
    from .core.types import ROLE_ORDER

    truth: dict[str, KeypointSet] = {}
    sizes: dict[str, tuple[int, int]] = {}
    roles_seen: set[KeypointRole] = set()
    rows = [json.loads(line) for line in test_path.read_text().splitlines() if line.strip()]
    if not rows:
        raise click.ClickException(f"{test_path} is empty")
    for row in rows:
        record_id = row.get("record_id") or Path(row["image"]).parent.name
        image_path = (test_path.parent / row["image"]).resolve()
        size = images.png_size(image_path) if image_path.exists() else (1000, 1000)
        width, height = size
        entries = {}
        if "response" in row:
            matches = _parse_gt_text(row["response"])
            for role, (nx, ny) in matches.items():
                point = denormalize_point(NormalizedCoord(nx, ny), width, height)
                entries[role] = KeypointBinding(point, 0)
        else:
            targets, mask = row["targets"], row["mask"]
            for i, role in enumerate(ROLE_ORDER):
                if mask[2 * i]:
                    point = denormalize_point(
                        NormalizedCoord(int(targets[2 * i]), int(targets[2 * i + 1])),
                        width, height,
                    )
                    entries[role] = KeypointBinding(point, 0)
        if record_id in truth:
            continue  # first replica of a record is its ground truth
        truth[record_id] = KeypointSet(entries)
        sizes[record_id] = size
        roles_seen |= set(entries)
    return truth, sizes, roles_seen


def _parse_gt_text(text: str) -> dict:
    import re

    from .core.types import ROLE_ORDER

    out = {}
    for role in ROLE_ORDER:
        m = re.search(rf"{role.value}: \((\d+), (\d+)\)", text)
        if m:
            out[role] = (int(m.group(1)), int(m.group(2)))
    return out


@main.command("eval")
@click.option("--pred", "pred_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--test", "test_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "report_path", type=click.Path(dir_okay=False), default=None,
              help="Where to write report.json (default: alongside predictions).")
@click.option("--missing-penalty", type=float, default=None)
@common_options("eval")
def eval_cmd(pred_path, test_path, report_path, missing_penalty, settings) -> None:
    """Per-keypoint MSE of predictions against a test set."""
    from .core.coords import NormalizedCoord, denormalize_point

    truth, sizes, roles_seen = _load_ground_truth(Path(test_path))
    schema = _schema_for_eval(settings, roles_seen)

    predictions: dict[str, KeypointSet] = {}
    parse_failures = 0
    for line in Path(pred_path).read_text().splitlines():
        if not line.strip():
            continue
        row = json.loads(line)
        record_id = row["record_id"]
        if record_id not in sizes:
            raise click.ClickException(f"prediction for unknown record id '{record_id}'")
        width, height = sizes[record_id]
        if "keypoints" in row:
            entries = {}
            for role_name, (nx, ny) in row["keypoints"].items():
                point = denormalize_point(NormalizedCoord(int(nx), int(ny)), width, height)
                entries[KeypointRole(role_name)] = KeypointBinding(point, 0)
            predictions[record_id] = KeypointSet(entries)
        else:
            try:
                predictions[record_id] = parse_affordance_text(
                    row["text"], schema, width, height
                )
            except AffordanceParseError as err:
                parse_failures += 1
                logger.warning("unparseable prediction for %s: %s", record_id, err)
                predictions[record_id] = KeypointSet.empty()

    report = keypoint_mse(
        predictions, truth, schema, sizes,
        missing_penalty=settings.get("missing_penalty", missing_penalty),
    )
    click.echo(report.table())
    if parse_failures:
        click.echo(f"({parse_failures} predictions failed to parse)", err=True)
    out = Path(report_path) if report_path else Path(pred_path).with_name("report.json")
    out.write_text(json.dumps(report.to_json(), indent=2) + "\n", encoding="utf-8")
    click.echo(f"wrote {out}")


@main.command("mock-serve")
@click.option("--dataset", "datasets", multiple=True,
              type=click.Path(exists=True, file_okay=False))
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8008)
@click.option("--inpaint-mode", type=click.Choice(["texture", "passthrough"]), default=None)
@common_options("mock_serve")
def mock_serve(datasets, host, port, inpaint_mode, settings) -> None:
    """Serve the deterministic mock model services over localhost HTTP."""
    import uvicorn

    inpaint_mode = settings.get("inpaint_mode", inpaint_mode, "texture")
    registry = registry_from_stores(_open_stores(datasets)) if datasets else None
    services = LocalMockServices(registry, inpaint_mode=inpaint_mode)
    app = create_mock_app(services)
    click.echo(f"mock model services on http://{host}:{port} (inpaint={inpaint_mode})", err=True)
    uvicorn.run(app, host=host, port=port, log_level="warning")


@main.command("annotate-serve")
@click.option("--dataset", "datasets", multiple=True, required=True,
              type=click.Path(exists=True, file_okay=False))
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8787)
@click.option("--ui-dir", type=click.Path(file_okay=False), default=None,
              help="Static UI bundle to host at /ui (default: ./frontend/dist).")
@common_options("annotate_serve")
def annotate_serve(datasets, host, port, ui_dir, settings) -> None:
    """Serve the annotation REST API plus the static studio UI."""
    import uvicorn
    from fastapi.staticfiles import StaticFiles

    from .api import create_annotation_app

    stores = _open_stores(datasets)
    app = create_annotation_app(stores)
    ui_path = Path(ui_dir) if ui_dir else Path.cwd() / "frontend" / "dist"
    if ui_path.is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui_path), html=True), name="ui")
        click.echo(f"studio UI at http://{host}:{port}/ui/", err=True)
    else:
        click.echo("no UI bundle found; serving API only", err=True)
    click.echo(f"annotation API on http://{host}:{port}", err=True)
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
