import { describe, expect, it } from "vitest";

import {
  clientToImage,
  fitTransform,
  imageToClient,
  inBounds,
  panBy,
  zoomAt,
  type ViewTransform,
} from "../src/coords.js";

const identity: ViewTransform = { zoom: 1, panX: 0, panY: 0, dpr: 1 };

describe("clientToImage / imageToClient", () => {
  it("round-trips within 0.5 px at 1:1 zoom", () => {
    for (const [cssX, cssY] of [
      [0, 0],
      [12.25, 99.75],
      [639.9, 479.1],
    ] as const) {
      const image = clientToImage(identity, cssX, cssY);
      const back = imageToClient(identity, image);
      expect(Math.abs(back.x - cssX)).toBeLessThan(0.5);
      expect(Math.abs(back.y - cssY)).toBeLessThan(0.5);
      // at 1:1 with no pan the mapping is the identity, exactly
      expect(image.x).toBeCloseTo(cssX, 12);
      expect(image.y).toBeCloseTo(cssY, 12);
    }
  });

  it("round-trips under arbitrary zoom and pan", () => {
    const t: ViewTransform = { zoom: 3.7, panX: -41.5, panY: 22.25, dpr: 2 };
    for (let i = 0; i < 50; i++) {
      const cssX = i * 13.37;
      const cssY = i * 7.11;
      const back = imageToClient(t, clientToImage(t, cssX, cssY));
      expect(back.x).toBeCloseTo(cssX, 9);
      expect(back.y).toBeCloseTo(cssY, 9);
    }
  });

  it("applies pan before zoom division", () => {
    const t: ViewTransform = { zoom: 2, panX: 10, panY: 20, dpr: 1 };
    expect(clientToImage(t, 10, 20)).toEqual({ x: 0, y: 0 });
    expect(clientToImage(t, 12, 24)).toEqual({ x: 1, y: 2 });
  });
});

describe("fitTransform", () => {
  it("fits the long side and centers the short side", () => {
    const t = fitTransform(640, 480, 320, 320);
    expect(t.zoom).toBeCloseTo(0.5, 12);
    expect(t.panX).toBeCloseTo(0, 12);
    expect(t.panY).toBeCloseTo((320 - 240) / 2, 12);
  });

  it("maps image corners inside the viewport", () => {
    const t = fitTransform(100, 400, 300, 300);
    for (const corner of [
      { x: 0, y: 0 },
      { x: 100, y: 400 },
    ]) {
      const css = imageToClient(t, corner);
      expect(css.x).toBeGreaterThanOrEqual(-1e-9);
      expect(css.y).toBeGreaterThanOrEqual(-1e-9);
      expect(css.x).toBeLessThanOrEqual(300 + 1e-9);
      expect(css.y).toBeLessThanOrEqual(300 + 1e-9);
    }
  });
});

describe("zoomAt", () => {
  it("keeps the image point under the cursor fixed", () => {
    let t = fitTransform(640, 480, 640, 480);
    const cursor = { x: 123.4, y: 345.6 };
    const before = clientToImage(t, cursor.x, cursor.y);
    t = zoomAt(t, cursor.x, cursor.y, 2.5);
    const after = clientToImage(t, cursor.x, cursor.y);
    expect(after.x).toBeCloseTo(before.x, 9);
    expect(after.y).toBeCloseTo(before.y, 9);
  });

  it("clamps to the zoom bounds", () => {
    let t = identity;
    for (let i = 0; i < 40; i++) t = zoomAt(t, 0, 0, 10);
    expect(t.zoom).toBeLessThanOrEqual(32);
    for (let i = 0; i < 80; i++) t = zoomAt(t, 0, 0, 0.01);
    expect(t.zoom).toBeGreaterThanOrEqual(0.1);
  });

  it("sub-pixel placement: a 0.3-px target is addressable at high zoom", () => {
    const t = zoomAt(identity, 0, 0, 16);
    const image = clientToImage(t, 0.3 * t.zoom, 0.7 * t.zoom);
    expect(image.x).toBeCloseTo(0.3, 9);
    expect(image.y).toBeCloseTo(0.7, 9);
  });
});

describe("panBy / inBounds", () => {
  it("pans in css pixels", () => {
    const t = panBy(identity, 5, -3);
    expect(clientToImage(t, 5, -3)).toEqual({ x: 0, y: 0 });
  });

  it("bounds are half-open", () => {
    expect(inBounds({ x: 0, y: 0 }, 640, 480)).toBe(true);
    expect(inBounds({ x: 639.999, y: 479.999 }, 640, 480)).toBe(true);
    expect(inBounds({ x: 640, y: 0 }, 640, 480)).toBe(false);
    expect(inBounds({ x: -0.001, y: 0 }, 640, 480)).toBe(false);
  });
});
