// Canvas drawing for scene images and keypoint overlays.

import { applyTransform, ViewTransform } from "./coords.js";
import type { KeypointPayload, RoleName } from "./types.js";
import { ROLE_COLORS } from "./types.js";

export interface MarkerOptions {
  cross?: boolean; // crosses mark transformed/synthetic points, circles originals
  highlight?: Set<RoleName>;
}

export function drawScene(
  ctx: CanvasRenderingContext2D,
  image: CanvasImageSource | null,
  transform: ViewTransform,
  keypoints: Record<string, KeypointPayload>,
  options: MarkerOptions = {},
): void {
  const canvas = ctx.canvas;
  ctx.setTransform(1, 0, 0, 1, 0, 0);
  ctx.fillStyle = "#15181d";
  ctx.fillRect(0, 0, canvas.width, canvas.height);
  applyTransform(ctx, transform);
  if (image !== null) {
    ctx.imageSmoothingEnabled = transform.zoom < 3;
    ctx.drawImage(image, 0, 0);
  }
  drawMarkers(ctx, transform, keypoints, options);
  ctx.setTransform(1, 0, 0, 1, 0, 0);
}

export function drawMarkers(
  ctx: CanvasRenderingContext2D,
  transform: ViewTransform,
  keypoints: Record<string, KeypointPayload>,
  options: MarkerOptions = {},
): void {
  const radius = 5 / transform.zoom; // constant size on screen
  ctx.lineWidth = 2 / transform.zoom;
  for (const [role, point] of Object.entries(keypoints)) {
    const color = ROLE_COLORS[role as RoleName] ?? "#ffffff";
    const violated = options.highlight?.has(role as RoleName) ?? false;
    ctx.strokeStyle = violated ? "#ff0000" : color;
    ctx.fillStyle = color;
    ctx.beginPath();
    if (options.cross) {
      ctx.moveTo(point.x - radius, point.y);
      ctx.lineTo(point.x + radius, point.y);
      ctx.moveTo(point.x, point.y - radius);
      ctx.lineTo(point.x, point.y + radius);
      ctx.stroke();
    } else {
      ctx.arc(point.x, point.y, radius, 0, Math.PI * 2);
      ctx.stroke();
      ctx.beginPath();
      ctx.arc(point.x, point.y, radius / 3, 0, Math.PI * 2);
      ctx.fill();
    }
    if (violated) {
      ctx.beginPath();
      ctx.arc(point.x, point.y, radius * 1.8, 0, Math.PI * 2);
      ctx.stroke();
    }
    ctx.font = `${12 / transform.zoom}px system-ui, sans-serif`;
    ctx.fillText(role, point.x + radius * 1.4, point.y - radius * 0.6);
  }
}

export function loadImage(url: string): Promise<HTMLImageElement> {
  return new Promise((resolve, reject) => {
    const img = new Image();
    img.onload = () => resolve(img);
    img.onerror = () => reject(new Error(`failed to load ${url}`));
    img.src = url;
  });
}
