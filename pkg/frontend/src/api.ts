import { ApiErrorBody, RenderInfo, SessionState, WorldPoint } from "./types.js";

export class ApiError extends Error {
  readonly errorClass: string;
  readonly detail: unknown;

  constructor(body: ApiErrorBody) {
    super(body.message);
    this.errorClass = body.class;
    this.detail = body.detail;
  }
}

type FetchLike = typeof fetch;

/** Thin client for the teach server; every mutation returns the new revision. */
export class TeachApi {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = fetch.bind(globalThis),
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const resp = await this.fetchImpl(this.baseUrl + path, init);
    if (!resp.ok) {
      let body: ApiErrorBody;
      try {
        body = (await resp.json()) as ApiErrorBody;
      } catch {
        body = { class: "http", message: `HTTP ${resp.status}`, detail: null };
      }
      throw new ApiError(body);
    }
    return resp;
  }

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    return (await this.request(path, init)).json() as Promise<T>;
  }

  private post<T>(path: string, body?: unknown): Promise<T> {
    return this.json<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
  }

  createSession(): Promise<{ id: string; revision: number }> {
    return this.post("/sessions");
  }

  getState(id: string): Promise<SessionState> {
    return this.json(`/sessions/${id}`);
  }

  addPoint(id: string, p: WorldPoint): Promise<{ revision: number }> {
    return this.post(`/sessions/${id}/points`, { x: p.x, y: p.y });
  }

  setMeta(
    id: string,
    meta: { closed?: boolean; seed?: [number, number] | null; delta?: number },
  ): Promise<{ revision: number }> {
    return this.post(`/sessions/${id}/meta`, meta);
  }

  commit(id: string): Promise<{ revision: number; cells_changed: number; connected_cells: number }> {
    return this.post(`/sessions/${id}/commit`);
  }

  undo(id: string): Promise<{ revision: number; applied: number }> {
    return this.post(`/sessions/${id}/undo`);
  }

  async exportScript(id: string): Promise<string> {
    return (await this.request(`/sessions/${id}/export`)).text();
  }

  renderUrl(id: string, revision: number, start?: WorldPoint, goal?: WorldPoint): string {
    let url = `${this.baseUrl}/sessions/${id}/render.png?rev=${revision}`;
    if (start && goal) {
      url += `&start=${start.x},${start.y}&goal=${goal.x},${goal.y}`;
    }
    return url;
  }

  /** Fetch a render so the plan headers are readable alongside the pixels. */
  async fetchRender(
    id: string,
    revision: number,
    start?: WorldPoint,
    goal?: WorldPoint,
  ): Promise<RenderInfo> {
    const resp = await this.request(
      `/sessions/${id}/render.png?rev=${revision}` +
        (start && goal ? `&start=${start.x},${start.y}&goal=${goal.x},${goal.y}` : ""),
    );
    const found = resp.headers.get("x-plan-found");
    const crosses = resp.headers.get("x-plan-crosses");
    return {
      blob: await resp.blob(),
      revision: Number(resp.headers.get("x-revision") ?? revision),
      planFound: found === null ? null : found === "true",
      planCrosses: crosses === null ? null : crosses === "true",
    };
  }

  eventsUrl(id: string): string {
    const ws = this.baseUrl.replace(/^http/, "ws");
    return `${ws}/sessions/${id}/events`;
  }
}
