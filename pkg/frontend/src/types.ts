export interface MapInfo {
  width: number;
  height: number;
  resolution: number;
  origin: [number, number, number];
  free_thresh: number;
  occupied_thresh: number;
}

export interface DraftEcho {
  points: [number, number][];
  closed: boolean;
  seed: [number, number] | null;
  delta: number;
}

export interface SessionState {
  id: string;
  revision: number;
  applied: number;
  draft: DraftEcho;
  map: MapInfo;
}

export type ToolMode = "add-point" | "set-seed" | "plan-preview";

export interface WorldPoint {
  x: number;
  y: number;
}

export interface ScreenPoint {
  x: number;
  y: number;
}

export interface PlanMarkers {
  start: WorldPoint | null;
  goal: WorldPoint | null;
}

export interface RenderInfo {
  blob: Blob;
  revision: number;
  planFound: boolean | null;
  planCrosses: boolean | null;
}

export interface ApiErrorBody {
  class: string;
  message: string;
  detail: unknown;
}
