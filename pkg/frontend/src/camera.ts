import { MapInfo, ScreenPoint, WorldPoint } from "./types.js";

// The server renders one map cell per raster pixel, image row 0 on top.
// The camera pans/zooms that raster on the canvas; world coordinates go
// through the map origin (x, y, yaw) like on the server.

export interface Camera {
  zoom: number; // screen pixels per raster pixel
  offsetX: number;
  offsetY: number;
}

export function makeCamera(zoom = 4, offsetX = 0, offsetY = 0): Camera {
  return { zoom, offsetX, offsetY };
}

export function screenToImage(cam: Camera, p: ScreenPoint): ScreenPoint {
  return { x: (p.x - cam.offsetX) / cam.zoom, y: (p.y - cam.offsetY) / cam.zoom };
}

export function imageToScreen(cam: Camera, p: ScreenPoint): ScreenPoint {
  return { x: p.x * cam.zoom + cam.offsetX, y: p.y * cam.zoom + cam.offsetY };
}

export function imageToWorld(map: MapInfo, p: ScreenPoint): WorldPoint {
  const gx = p.x * map.resolution;
  const gy = (map.height - p.y) * map.resolution;
  const [ox, oy, yaw] = map.origin;
  const c = Math.cos(yaw);
  const s = Math.sin(yaw);
  return { x: ox + c * gx - s * gy, y: oy + s * gx + c * gy };
}

export function worldToImage(map: MapInfo, p: WorldPoint): ScreenPoint {
  const [ox, oy, yaw] = map.origin;
  const c = Math.cos(yaw);
  const s = Math.sin(yaw);
  const dx = p.x - ox;
  const dy = p.y - oy;
  const gx = c * dx + s * dy;
  const gy = -s * dx + c * dy;
  return { x: gx / map.resolution, y: map.height - gy / map.resolution };
}

export function screenToWorld(cam: Camera, map: MapInfo, p: ScreenPoint): WorldPoint {
  return imageToWorld(map, screenToImage(cam, p));
}

export function worldToScreen(cam: Camera, map: MapInfo, p: WorldPoint): ScreenPoint {
  return imageToScreen(cam, worldToImage(map, p));
}

export function panBy(cam: Camera, dx: number, dy: number): Camera {
  return { ...cam, offsetX: cam.offsetX + dx, offsetY: cam.offsetY + dy };
}

/** Zoom by a factor while keeping the given screen point fixed. */
export function zoomAround(cam: Camera, factor: number, pivot: ScreenPoint): Camera {
  const zoom = Math.min(64, Math.max(0.25, cam.zoom * factor));
  const actual = zoom / cam.zoom;
  return {
    zoom,
    offsetX: pivot.x - (pivot.x - cam.offsetX) * actual,
    offsetY: pivot.y - (pivot.y - cam.offsetY) * actual,
  };
}

/** Fit the whole map raster into a canvas with a small margin. */
export function fitMap(map: MapInfo, canvasWidth: number, canvasHeight: number): Camera {
  const margin = 20;
  const zoom = Math.min(
    (canvasWidth - 2 * margin) / map.width,
    (canvasHeight - 2 * margin) / map.height,
  );
  return {
    zoom,
    offsetX: (canvasWidth - map.width * zoom) / 2,
    offsetY: (canvasHeight - map.height * zoom) / 2,
  };
}
