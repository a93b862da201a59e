import { TeachApi, ApiError } from "./api.js";
import { Camera, screenToWorld } from "./camera.js";
import { PlanMarkers, ScreenPoint, SessionState, ToolMode } from "./types.js";

// The server owns all map state. The controller only forwards clicks and
// re-syncs its echo of the draft from server responses, so whatever the
// view shows is always some server revision.

export class TeachController {
  state: SessionState | null = null;
  tool: ToolMode = "add-point";
  plan: PlanMarkers = { start: null, goal: null };
  lastError: string | null = null;
  onChange: () => void = () => {};

  constructor(private readonly api: TeachApi) {}

  get sessionId(): string {
    if (!this.state) {
      throw new Error("no active session");
    }
    return this.state.id;
  }

  async start(): Promise<void> {
    const created = await this.api.createSession();
    this.state = await this.api.getState(created.id);
    this.plan = { start: null, goal: null };
    this.lastError = null;
    this.onChange();
  }

  private async resync(): Promise<void> {
    if (this.state) {
      this.state = await this.api.getState(this.state.id);
      this.onChange();
    }
  }

  private async guarded(action: () => Promise<void>): Promise<boolean> {
    this.lastError = null;
    try {
      await action();
      return true;
    } catch (err) {
      this.lastError = err instanceof ApiError
        ? `${err.errorClass}: ${err.message}`
        : String(err);
      this.onChange();
      return false;
    }
  }

  /** Dispatch a canvas click according to the active tool. */
  async handleCanvasClick(cam: Camera, p: ScreenPoint): Promise<boolean> {
    if (!this.state) {
      return false;
    }
    const world = screenToWorld(cam, this.state.map, p);
    switch (this.tool) {
      case "add-point":
        return this.guarded(async () => {
          await this.api.addPoint(this.sessionId, world);
          await this.resync();
        });
      case "set-seed":
        return this.guarded(async () => {
          await this.api.setMeta(this.sessionId, { seed: [world.x, world.y] });
          await this.resync();
        });
      case "plan-preview":
        if (!this.plan.start || this.plan.goal) {
          this.plan = { start: world, goal: null };
        } else {
          this.plan = { start: this.plan.start, goal: world };
        }
        this.onChange();
        return true;
    }
  }

  async setClosed(closed: boolean): Promise<boolean> {
    return this.guarded(async () => {
      await this.api.setMeta(this.sessionId, { closed });
      await this.resync();
    });
  }

  async setDelta(delta: number): Promise<boolean> {
    return this.guarded(async () => {
      await this.api.setMeta(this.sessionId, { delta });
      await this.resync();
    });
  }

  /** Commit the draft; on failure the draft stays editable server-side. */
  async commitAndRefresh(): Promise<boolean> {
    return this.guarded(async () => {
      await this.api.commit(this.sessionId);
      await this.resync();
    });
  }

  async undoLast(): Promise<boolean> {
    return this.guarded(async () => {
      await this.api.undo(this.sessionId);
      await this.resync();
    });
  }

  exportScript(): Promise<string> {
    return this.api.exportScript(this.sessionId);
  }

  /** Where the view should pull its raster from right now. */
  renderUrl(): string {
    const revision = this.state?.revision ?? 0;
    const { start, goal } = this.plan;
    return this.api.renderUrl(
      this.sessionId, revision, start ?? undefined, goal ?? undefined);
  }
}
