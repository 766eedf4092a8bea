// Entry point: a hash-routed two-view studio (annotate, review) over the
// annotation REST API. All dataset writes go through ApiClient; this file is
// DOM wiring only.

import { AnnotateController } from "./annotate.js";
import { ApiClient } from "./api.js";
import {
  clientToImage,
  fitTransform,
  inBounds,
  panBy,
  ViewTransform,
  zoomAt,
} from "./coords.js";
import { drawScene, loadImage } from "./render.js";
import { ReviewController } from "./review.js";
import type { RoleName, SceneSummary } from "./types.js";
import { ROLE_COLORS } from "./types.js";

const api = new ApiClient("");
const app = document.getElementById("app") as HTMLDivElement;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className = "",
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}

function navBar(active: string): HTMLElement {
  const nav = el("nav", "topnav");
  for (const [label, hash] of [
    ["scenes", "#/"],
    ["review", "#/review"],
  ] as const) {
    const link = el("a", active === label ? "active" : "");
    link.textContent = label;
    link.href = hash;
    nav.appendChild(link);
  }
  return nav;
}

// ---- scene list ------------------------------------------------------------

async function renderList(): Promise<void> {
  app.replaceChildren(navBar("scenes"));
  const list = await api.listScenes({ pageSize: 200 });
  const table = el("table", "scene-table");
  const head = el("tr");
  for (const col of ["record", "kind", "annotated", "review", "instruction"]) {
    head.appendChild(el("th", "", col));
  }
  table.appendChild(head);
  for (const scene of list.scenes) {
    const row = el("tr");
    const link = el("a");
    link.textContent = scene.record_id;
    link.href = `#/annotate/${scene.record_id}`;
    row.appendChild(el("td")).appendChild(link);
    row.appendChild(el("td", "", scene.kind));
    row.appendChild(el("td", "", scene.annotated ? "yes" : "draft"));
    row.appendChild(el("td", `review-${scene.review}`, scene.review));
    row.appendChild(el("td", "muted", scene.instruction));
    table.appendChild(row);
  }
  app.appendChild(el("h1", "", `scenes (${list.total})`));
  app.appendChild(table);
}

// ---- annotate view ----------------------------------------------------------

interface CanvasView {
  canvas: HTMLCanvasElement;
  transform: ViewTransform;
}

function sizeCanvas(canvas: HTMLCanvasElement): void {
  const dpr = window.devicePixelRatio || 1;
  const rect = canvas.getBoundingClientRect();
  canvas.width = Math.round(rect.width * dpr);
  canvas.height = Math.round(rect.height * dpr);
}

async function renderAnnotate(recordId: string): Promise<void> {
  app.replaceChildren(navBar("scenes"));
  const scene = await api.getScene(recordId);
  const schema = await api.getSchema(scene.task_id);
  const controller = new AnnotateController(scene, schema);
  const image = await loadImage(api.imageUrl(recordId));

  app.appendChild(el("h1", "", recordId));
  app.appendChild(el("p", "muted", scene.instruction));

  const layout = el("div", "annotate-layout");
  const side = el("div", "sidebar");
  const canvasWrap = el("div", "canvas-wrap");
  const canvas = el("canvas", "scene-canvas");
  canvasWrap.appendChild(canvas);
  layout.append(side, canvasWrap);
  app.appendChild(layout);

  const status = el("div", "status");
  const violationBox = el("ul", "violations");
  const roleButtons = new Map<RoleName, HTMLButtonElement>();
  const objectButtons: HTMLButtonElement[] = [];

  const roleBox = el("div", "panel");
  roleBox.appendChild(el("h2", "", "roles"));
  for (const role of controller.requiredRoles) {
    const button = el("button", "role-btn");
    button.style.borderColor = ROLE_COLORS[role];
    button.textContent = role;
    button.onclick = () => {
      controller.selectRole(role);
      refresh();
    };
    const clear = el("button", "clear-btn", "x");
    clear.title = `clear ${role}`;
    clear.onclick = (event) => {
      event.stopPropagation();
      controller.clearRole(role);
      refresh();
    };
    const row = el("div", "role-row");
    row.append(button, clear);
    roleBox.appendChild(row);
    roleButtons.set(role, button);
  }

  const objectBox = el("div", "panel");
  objectBox.appendChild(el("h2", "", "bind to object"));
  scene.objects.forEach((descriptor, index) => {
    const button = el("button", "object-btn", `${index}: ${descriptor}`);
    button.onclick = () => {
      controller.selectObject(index);
      refresh();
    };
    objectBox.appendChild(button);
    objectButtons.push(button);
  });

  const submit = el("button", "submit-btn", "submit");
  submit.onclick = async () => {
    submit.disabled = true;
    const outcome = await controller.submit(api);
    status.textContent =
      outcome === "saved"
        ? `saved (version ${controller.version})`
        : `submit ${outcome}`;
    refresh();
  };

  side.append(roleBox, objectBox, submit, status, violationBox);

  sizeCanvas(canvas);
  const view: CanvasView = {
    canvas,
    transform: fitTransform(
      scene.width,
      scene.height,
      canvas.getBoundingClientRect().width,
      canvas.getBoundingClientRect().height,
      window.devicePixelRatio || 1,
    ),
  };

  const ctx = canvas.getContext("2d")!;

  function refresh(): void {
    for (const [role, button] of roleButtons) {
      button.classList.toggle("active", controller.activeRole === role);
      button.classList.toggle("placed", controller.placed.has(role));
    }
    objectButtons.forEach((button, index) =>
      button.classList.toggle("active", controller.activeObject === index),
    );
    submit.disabled = !controller.canSubmit;
    violationBox.replaceChildren(
      ...controller.violations.map((v) =>
        el("li", "violation", v.role ? `${v.role}: ${v.message}` : v.message),
      ),
    );
    drawScene(ctx, image, view.transform, Object.fromEntries(controller.placed), {
      highlight: controller.violatedRoles(),
    });
  }

  canvas.addEventListener("click", (event) => {
    const rect = canvas.getBoundingClientRect();
    const point = clientToImage(
      view.transform,
      event.clientX - rect.left,
      event.clientY - rect.top,
    );
    if (!inBounds(point, scene.width, scene.height)) return;
    controller.placeAt(point.x, point.y);
    refresh();
  });

  canvas.addEventListener("wheel", (event) => {
    event.preventDefault();
    const rect = canvas.getBoundingClientRect();
    view.transform = zoomAt(
      view.transform,
      event.clientX - rect.left,
      event.clientY - rect.top,
      event.deltaY < 0 ? 1.2 : 1 / 1.2,
    );
    refresh();
  });

  let dragging: { x: number; y: number } | null = null;
  canvas.addEventListener("mousedown", (event) => {
    if (event.button === 1 || event.shiftKey) {
      dragging = { x: event.clientX, y: event.clientY };
      event.preventDefault();
    }
  });
  window.addEventListener("mousemove", (event) => {
    if (dragging) {
      view.transform = panBy(
        view.transform,
        event.clientX - dragging.x,
        event.clientY - dragging.y,
      );
      dragging = { x: event.clientX, y: event.clientY };
      refresh();
    }
  });
  window.addEventListener("mouseup", () => {
    dragging = null;
  });

  refresh();
}

// ---- review view -------------------------------------------------------------

async function renderReview(): Promise<void> {
  app.replaceChildren(navBar("review"));
  const controller = new ReviewController(api);
  app.appendChild(el("h1", "", "review queue"));
  const info = el("p", "muted");
  const panes = el("div", "review-layout");
  const parentPane = el("div", "pane");
  const syntheticPane = el("div", "pane");
  const contextPane = el("div", "pane");
  panes.append(parentPane, syntheticPane, contextPane);
  const controls = el("div", "review-controls");
  const acceptButton = el("button", "submit-btn", "accept (a)");
  const rejectButton = el("button", "danger-btn", "reject (r)");
  const overlayToggle = el("button", "object-btn", "toggle overlays");
  controls.append(acceptButton, rejectButton, overlayToggle);
  app.append(info, controls, panes);

  let overlays = true;

  async function paneCanvas(
    pane: HTMLDivElement,
    title: string,
    url: string,
    keypoints: Record<string, { x: number; y: number; object_index: number }>,
    cross: boolean,
  ): Promise<void> {
    pane.replaceChildren(el("h2", "", title));
    const canvas = el("canvas", "review-canvas");
    pane.appendChild(canvas);
    sizeCanvas(canvas);
    const image = await loadImage(url);
    const rect = canvas.getBoundingClientRect();
    const transform = fitTransform(
      image.naturalWidth,
      image.naturalHeight,
      rect.width,
      rect.height,
      window.devicePixelRatio || 1,
    );
    const ctx = canvas.getContext("2d")!;
    drawScene(ctx, image, transform, overlays ? keypoints : {}, { cross });
  }

  async function show(scene: SceneSummary | null): Promise<void> {
    if (scene === null) {
      info.textContent = `queue empty; reviewed ${controller.reviewed} this session`;
      parentPane.replaceChildren();
      syntheticPane.replaceChildren();
      contextPane.replaceChildren();
      return;
    }
    info.textContent = `${scene.record_id} (parent ${scene.parent_id}) — a accept, r reject`;
    const jobs = [
      paneCanvas(syntheticPane, "synthetic", api.imageUrl(scene.record_id),
                 scene.keypoints, true),
      paneCanvas(contextPane, "context (soft edge)",
                 api.contextUrl(scene.record_id, "soft_edge"), {}, false),
    ];
    if (scene.parent_id) {
      const parent = await api.getScene(scene.parent_id);
      jobs.push(paneCanvas(parentPane, `parent ${parent.record_id}`,
                           api.imageUrl(parent.record_id), parent.keypoints, false));
    }
    await Promise.all(jobs);
  }

  acceptButton.onclick = async () => show(await controller.recordVerdict("accept"));
  rejectButton.onclick = async () => show(await controller.recordVerdict("reject"));
  overlayToggle.onclick = async () => {
    overlays = !overlays;
    await show(controller.current);
  };
  window.onkeydown = async (event) => {
    if (await controller.handleKey(event.key)) {
      await show(controller.current);
    }
  };

  await show(await controller.advance());
}

// ---- router -------------------------------------------------------------------

async function route(): Promise<void> {
  const hash = window.location.hash || "#/";
  try {
    if (hash.startsWith("#/annotate/")) {
      await renderAnnotate(decodeURIComponent(hash.slice("#/annotate/".length)));
    } else if (hash.startsWith("#/review")) {
      await renderReview();
    } else {
      await renderList();
    }
  } catch (err) {
    app.replaceChildren(
      navBar(""),
      el("p", "violation", err instanceof Error ? err.message : String(err)),
    );
  }
}

window.addEventListener("hashchange", route);
void route();
