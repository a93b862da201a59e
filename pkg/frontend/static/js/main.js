import { TeachApi } from "./api.js";
import { fitMap, panBy, zoomAround } from "./camera.js";
import { TeachController } from "./controller.js";
import { drawScene } from "./draw.js";
const api = new TeachApi("");
const controller = new TeachController(api);
const canvas = document.getElementById("map");
const ctx = canvas.getContext("2d");
const errorBanner = document.getElementById("error");
const statusBar = document.getElementById("status");
const planBadge = document.getElementById("plan-badge");
const deltaSlider = document.getElementById("delta");
const deltaLabel = document.getElementById("delta-value");
const closedToggle = document.getElementById("closed");
let cam = { zoom: 4, offsetX: 0, offsetY: 0 };
let raster = null;
let shownRevision = -1;
let fetching = false;
function resizeCanvas() {
    canvas.width = canvas.clientWidth;
    canvas.height = canvas.clientHeight;
    redraw();
}
function redraw() {
    if (!controller.state) {
        return;
    }
    drawScene(ctx, cam, controller.state.map, raster, controller.state.draft, controller.plan);
}
async function refreshRender() {
    if (!controller.state || fetching) {
        return;
    }
    fetching = true;
    try {
        const { start, goal } = controller.plan;
        const info = await api.fetchRender(controller.state.id, controller.state.revision, start ?? undefined, goal ?? undefined);
        raster = await createImageBitmap(info.blob);
        shownRevision = info.revision;
        if (info.planFound === null) {
            planBadge.textContent = "";
        }
        else if (!info.planFound) {
            planBadge.textContent = "no path";
            planBadge.className = "badge no-path";
        }
        else {
            planBadge.textContent = info.planCrosses ? "path crosses area" : "path clear";
            planBadge.className = info.planCrosses ? "badge crossing" : "badge clear";
        }
    }
    finally {
        fetching = false;
    }
    redraw();
    updateStatus();
}
function updateStatus() {
    const s = controller.state;
    if (!s) {
        return;
    }
    statusBar.textContent =
        `session ${s.id.slice(0, 8)} · revision ${s.revision} (showing ${shownRevision})` +
            ` · ${s.applied} committed border(s) · ${s.draft.points.length} draft point(s)`;
    errorBanner.textContent = controller.lastError ?? "";
    errorBanner.style.display = controller.lastError ? "block" : "none";
}
controller.onChange = () => {
    updateStatus();
    redraw();
    void refreshRender();
};
function activeTool() {
    const checked = document.querySelector('input[name="tool"]:checked');
    return checked?.value ?? "add-point";
}
// -- input wiring ------------------------------------------------------------
let dragging = false;
let moved = false;
let lastPos = { x: 0, y: 0 };
canvas.addEventListener("mousedown", (e) => {
    dragging = true;
    moved = false;
    lastPos = { x: e.offsetX, y: e.offsetY };
});
canvas.addEventListener("mousemove", (e) => {
    if (!dragging) {
        return;
    }
    const dx = e.offsetX - lastPos.x;
    const dy = e.offsetY - lastPos.y;
    if (Math.abs(dx) + Math.abs(dy) > 2) {
        moved = true;
        cam = panBy(cam, dx, dy);
        lastPos = { x: e.offsetX, y: e.offsetY };
        redraw();
    }
});
canvas.addEventListener("mouseup", (e) => {
    dragging = false;
    if (moved) {
        return; // it was a pan, not a click
    }
    controller.tool = activeTool();
    void controller.handleCanvasClick(cam, { x: e.offsetX, y: e.offsetY });
});
canvas.addEventListener("wheel", (e) => {
    e.preventDefault();
    cam = zoomAround(cam, e.deltaY < 0 ? 1.2 : 1 / 1.2, { x: e.offsetX, y: e.offsetY });
    redraw();
});
deltaSlider.addEventListener("change", () => {
    void controller.setDelta(Number(deltaSlider.value));
});
deltaSlider.addEventListener("input", () => {
    deltaLabel.textContent = Number(deltaSlider.value).toFixed(2);
});
for (const preset of document.querySelectorAll("button[data-delta]")) {
    preset.addEventListener("click", () => {
        deltaSlider.value = preset.dataset.delta;
        deltaLabel.textContent = Number(deltaSlider.value).toFixed(2);
        void controller.setDelta(Number(deltaSlider.value));
    });
}
closedToggle.addEventListener("change", () => {
    void controller.setClosed(closedToggle.checked);
});
document.getElementById("commit").addEventListener("click", () => {
    void controller.commitAndRefresh();
});
document.getElementById("undo").addEventListener("click", () => {
    void controller.undoLast();
});
document.getElementById("clear-plan").addEventListener("click", () => {
    controller.plan = { start: null, goal: null };
    controller.onChange();
});
document.getElementById("export").addEventListener("click", () => {
    void (async () => {
        const text = await controller.exportScript();
        const blob = new Blob([text], { type: "application/json" });
        const a = document.createElement("a");
        a.href = URL.createObjectURL(blob);
        a.download = "borders.json";
        a.click();
        URL.revokeObjectURL(a.href);
    })();
});
window.addEventListener("resize", resizeCanvas);
// -- live revision events ------------------------------------------------------
function subscribe(sessionId) {
    const ws = new WebSocket(`${location.protocol === "https:" ? "wss" : "ws"}://${location.host}` +
        `/sessions/${sessionId}/events`);
    ws.onmessage = (e) => {
        const msg = JSON.parse(e.data);
        if (controller.state && msg.revision > controller.state.revision) {
            void api.getState(sessionId).then((s) => {
                controller.state = s;
                controller.onChange();
            });
        }
    };
    ws.onclose = () => setTimeout(() => subscribe(sessionId), 2000);
}
void (async () => {
    await controller.start();
    cam = fitMap(controller.state.map, canvas.clientWidth || 900, canvas.clientHeight || 600);
    resizeCanvas();
    subscribe(controller.state.id);
    await refreshRender();
})();
