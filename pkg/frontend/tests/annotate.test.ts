import { describe, expect, it } from "vitest";

import { AnnotateController } from "../src/annotate.js";
import { ApiClient } from "../src/api.js";
import { makeFakeServer, makeScene, SWEEPING_SCHEMA } from "./fakes.js";

function controllerWithServer() {
  const server = makeFakeServer();
  const api = new ApiClient("", server.fetch);
  const controller = new AnnotateController(makeScene(), SWEEPING_SCHEMA);
  return { server, api, controller };
}

const PLACEMENTS: Array<[number, number, number]> = [
  [120, 210, 0], // grasp on the brush
  [120, 290, 0], // function on the brush
  [420, 260, 1], // target on the package
  [380, 250, 1],
  [460, 270, 1],
];

function placeAll(controller: AnnotateController): void {
  for (const [x, y, object] of PLACEMENTS) {
    controller.selectObject(object);
    controller.placeAt(x, y);
  }
}

describe("role selection and placement", () => {
  it("starts on the first missing role and auto-advances", () => {
    const { controller } = controllerWithServer();
    expect(controller.activeRole).toBe("grasp");
    controller.placeAt(10, 10);
    expect(controller.activeRole).toBe("function");
    expect(controller.placed.get("grasp")).toEqual({ x: 10, y: 10, object_index: 0 });
  });

  it("binds placements to the selected object", () => {
    const { controller } = controllerWithServer();
    controller.selectRole("target");
    controller.selectObject(1);
    controller.placeAt(400, 250);
    expect(controller.placed.get("target")?.object_index).toBe(1);
  });

  it("ignores clicks outside the image", () => {
    const { controller } = controllerWithServer();
    expect(controller.placeAt(-1, 10)).toBe(false);
    expect(controller.placeAt(640, 10)).toBe(false);
    expect(controller.placed.size).toBe(0);
  });

  it("submit stays gated until every required role is placed", () => {
    const { controller } = controllerWithServer();
    for (const [x, y, object] of PLACEMENTS.slice(0, 4)) {
      controller.selectObject(object);
      controller.placeAt(x, y);
    }
    expect(controller.complete).toBe(false);
    expect(controller.canSubmit).toBe(false);
    controller.selectObject(1);
    controller.placeAt(460, 270);
    expect(controller.complete).toBe(true);
    expect(controller.canSubmit).toBe(true);
  });

  it("clearing a role re-activates it and regates submit", () => {
    const { controller } = controllerWithServer();
    placeAll(controller);
    controller.clearRole("function");
    expect(controller.activeRole).toBe("function");
    expect(controller.canSubmit).toBe(false);
  });
});

describe("submission", () => {
  it("stores what was clicked, bumps the version, clears dirty", async () => {
    const { server, api, controller } = controllerWithServer();
    placeAll(controller);
    const outcome = await controller.submit(api);
    expect(outcome).toBe("saved");
    expect(controller.version).toBe(2);
    expect(controller.canSubmit).toBe(false);
    expect(server.scene.annotated).toBe(true);
    // click-to-stored round trip is exact
    expect(server.scene.keypoints["grasp"]).toEqual({ x: 120, y: 210, object_index: 0 });
  });

  it("surfaces server violations inline for out-of-bounds points", async () => {
    const { api, controller } = controllerWithServer();
    placeAll(controller);
    // bypass the client-side guard to prove the server verdict is rendered
    controller.placed.set("grasp", { x: 640, y: 10, object_index: 0 });
    controller.dirty = true;
    const outcome = await controller.submit(api);
    expect(outcome).toBe("invalid");
    expect(controller.violations.some((v) => v.code === "out_of_bounds")).toBe(true);
    expect(controller.violatedRoles().has("grasp")).toBe(true);
  });

  it("version conflicts adopt the server version for a retry", async () => {
    const { server, api, controller } = controllerWithServer();
    placeAll(controller);
    server.scene.version = 5; // someone else edited concurrently
    const outcome = await controller.submit(api);
    expect(outcome).toBe("conflict");
    expect(controller.version).toBe(5);
    expect(controller.violations[0]?.code).toBe("version_conflict");
    const retry = await controller.submit(api);
    expect(retry).toBe("saved");
  });

  it("sends the version token with every PUT", async () => {
    const { server, api, controller } = controllerWithServer();
    placeAll(controller);
    await controller.submit(api);
    const put = server.requests.find((r) => r.method === "PUT");
    expect(put).toBeDefined();
    expect((put!.body as { version: number }).version).toBe(1);
  });
});
