export class ApiError extends Error {
    constructor(body) {
        super(body.message);
        this.errorClass = body.class;
        this.detail = body.detail;
    }
}
/** Thin client for the teach server; every mutation returns the new revision. */
export class TeachApi {
    constructor(baseUrl, fetchImpl = fetch.bind(globalThis)) {
        this.baseUrl = baseUrl;
        this.fetchImpl = fetchImpl;
    }
    async request(path, init) {
        const resp = await this.fetchImpl(this.baseUrl + path, init);
        if (!resp.ok) {
            let body;
            try {
                body = (await resp.json());
            }
            catch {
                body = { class: "http", message: `HTTP ${resp.status}`, detail: null };
            }
            throw new ApiError(body);
        }
        return resp;
    }
    async json(path, init) {
        return (await this.request(path, init)).json();
    }
    post(path, body) {
        return this.json(path, {
            method: "POST",
            headers: { "content-type": "application/json" },
            body: body === undefined ? undefined : JSON.stringify(body),
        });
    }
    createSession() {
        return this.post("/sessions");
    }
    getState(id) {
        return this.json(`/sessions/${id}`);
    }
    addPoint(id, p) {
        return this.post(`/sessions/${id}/points`, { x: p.x, y: p.y });
    }
    setMeta(id, meta) {
        return this.post(`/sessions/${id}/meta`, meta);
    }
    commit(id) {
        return this.post(`/sessions/${id}/commit`);
    }
    undo(id) {
        return this.post(`/sessions/${id}/undo`);
    }
    async exportScript(id) {
        return (await this.request(`/sessions/${id}/export`)).text();
    }
    renderUrl(id, revision, start, goal) {
        let url = `${this.baseUrl}/sessions/${id}/render.png?rev=${revision}`;
        if (start && goal) {
            url += `&start=${start.x},${start.y}&goal=${goal.x},${goal.y}`;
        }
        return url;
    }
    /** Fetch a render so the plan headers are readable alongside the pixels. */
    async fetchRender(id, revision, start, goal) {
        const resp = await this.request(`/sessions/${id}/render.png?rev=${revision}` +
            (start && goal ? `&start=${start.x},${start.y}&goal=${goal.x},${goal.y}` : ""));
        const found = resp.headers.get("x-plan-found");
        const crosses = resp.headers.get("x-plan-crosses");
        return {
            blob: await resp.blob(),
            revision: Number(resp.headers.get("x-revision") ?? revision),
            planFound: found === null ? null : found === "true",
            planCrosses: crosses === null ? null : crosses === "true",
        };
    }
    eventsUrl(id) {
        const ws = this.baseUrl.replace(/^http/, "ws");
        return `${ws}/sessions/${id}/events`;
    }
}
