import { ApiError } from "./api.js";
import { screenToWorld } from "./camera.js";
// The server owns all map state. The controller only forwards clicks and
// re-syncs its echo of the draft from server responses, so whatever the
// view shows is always some server revision.
export class TeachController {
    constructor(api) {
        this.api = api;
        this.state = null;
        this.tool = "add-point";
        this.plan = { start: null, goal: null };
        this.lastError = null;
        this.onChange = () => { };
    }
    get sessionId() {
        if (!this.state) {
            throw new Error("no active session");
        }
        return this.state.id;
    }
    async start() {
        const created = await this.api.createSession();
        this.state = await this.api.getState(created.id);
        this.plan = { start: null, goal: null };
        this.lastError = null;
        this.onChange();
    }
    async resync() {
        if (this.state) {
            this.state = await this.api.getState(this.state.id);
            this.onChange();
        }
    }
    async guarded(action) {
        this.lastError = null;
        try {
            await action();
            return true;
        }
        catch (err) {
            this.lastError = err instanceof ApiError
                ? `${err.errorClass}: ${err.message}`
                : String(err);
            this.onChange();
            return false;
        }
    }
    /** Dispatch a canvas click according to the active tool. */
    async handleCanvasClick(cam, p) {
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
                }
                else {
                    this.plan = { start: this.plan.start, goal: world };
                }
                this.onChange();
                return true;
        }
    }
    async setClosed(closed) {
        return this.guarded(async () => {
            await this.api.setMeta(this.sessionId, { closed });
            await this.resync();
        });
    }
    async setDelta(delta) {
        return this.guarded(async () => {
            await this.api.setMeta(this.sessionId, { delta });
            await this.resync();
        });
    }
    /** Commit the draft; on failure the draft stays editable server-side. */
    async commitAndRefresh() {
        return this.guarded(async () => {
            await this.api.commit(this.sessionId);
            await this.resync();
        });
    }
    async undoLast() {
        return this.guarded(async () => {
            await this.api.undo(this.sessionId);
            await this.resync();
        });
    }
    exportScript() {
        return this.api.exportScript(this.sessionId);
    }
    /** Where the view should pull its raster from right now. */
    renderUrl() {
        const revision = this.state?.revision ?? 0;
        const { start, goal } = this.plan;
        return this.api.renderUrl(this.sessionId, revision, start ?? undefined, goal ?? undefined);
    }
}
