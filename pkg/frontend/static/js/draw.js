import { worldToScreen } from "./camera.js";
// red while drafting, green once the server has the border integrated
// (the green border cells arrive inside the raster)
const DRAFT_STROKE = "#e02020";
const SEED_FILL = "#ff8c00";
const START_FILL = "#0082c8";
const GOAL_FILL = "#8200c8";
export function drawScene(ctx, cam, map, raster, draft, plan) {
    const canvas = ctx.canvas;
    ctx.save();
    ctx.fillStyle = "#202229";
    ctx.fillRect(0, 0, canvas.width, canvas.height);
    if (raster) {
        ctx.imageSmoothingEnabled = false;
        ctx.setTransform(cam.zoom, 0, 0, cam.zoom, cam.offsetX, cam.offsetY);
        ctx.drawImage(raster, 0, 0);
        ctx.setTransform(1, 0, 0, 1, 0, 0);
    }
    // vector overlay: the uncommitted draft in red
    const pts = draft.points.map(([x, y]) => worldToScreen(cam, map, { x, y }));
    if (pts.length > 0) {
        ctx.strokeStyle = DRAFT_STROKE;
        ctx.fillStyle = DRAFT_STROKE;
        ctx.lineWidth = 2;
        ctx.beginPath();
        ctx.moveTo(pts[0].x, pts[0].y);
        for (const p of pts.slice(1)) {
            ctx.lineTo(p.x, p.y);
        }
        if (draft.closed && pts.length >= 3) {
            ctx.closePath();
        }
        ctx.stroke();
        for (const p of pts) {
            ctx.beginPath();
            ctx.arc(p.x, p.y, 3.5, 0, 2 * Math.PI);
            ctx.fill();
        }
    }
    if (draft.seed) {
        const s = worldToScreen(cam, map, { x: draft.seed[0], y: draft.seed[1] });
        drawMarker(ctx, s.x, s.y, SEED_FILL);
    }
    if (plan.start) {
        const p = worldToScreen(cam, map, plan.start);
        drawMarker(ctx, p.x, p.y, START_FILL);
    }
    if (plan.goal) {
        const p = worldToScreen(cam, map, plan.goal);
        drawMarker(ctx, p.x, p.y, GOAL_FILL);
    }
    ctx.restore();
}
function drawMarker(ctx, x, y, color) {
    ctx.fillStyle = color;
    ctx.strokeStyle = "#ffffff";
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    ctx.arc(x, y, 6, 0, 2 * Math.PI);
    ctx.fill();
    ctx.stroke();
}
