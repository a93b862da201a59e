"""Session-oriented HTTP/WebSocket service for interactive border teaching.

One session wraps one engine session plus an uncommitted draft (chain
points, seed, delta). Every mutation bumps a revision counter and is
broadcast to WebSocket subscribers; renders are consistent snapshots of
exactly one revision. Error responses always carry
``{"class", "message", "detail"}``.
"""

from __future__ import annotations

import asyncio
import uuid
from dataclasses import dataclass, field

import numpy as np
from fastapi import FastAPI, Request, WebSocket, WebSocketDisconnect
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, Response
from fastapi.staticfiles import StaticFiles

from . import engine, evaluation, planner, raster
from .errors import BorderForgeError, OutOfBoundsError
from .frames import FrameGraph, Pose3, Ray, ray_ground_intersection
from .geometry import LineSegment, PolygonalChain, extend_open_chain, rasterize_segment
from .gridmap import OccupancyGridMap, WorldPoint, load_map


class UnknownSessionError(BorderForgeError):
    code = "unknown_session"


class DraftIncompleteError(BorderForgeError):
    code = "draft_incomplete"


class BadRequestError(BorderForgeError):
    code = "bad_request"


@dataclass
class Draft:
    points: list[WorldPoint] = field(default_factory=list)
    closed: bool = False
    seed: WorldPoint | None = None
    delta: float = 1.0

    def to_dict(self) -> dict:
        return {
            "points": [[p.x, p.y] for p in self.points],
            "closed": self.closed,
            "seed": [self.seed.x, self.seed.y] if self.seed else None,
            "delta": self.delta,
        }


@dataclass
class TeachSession:
    id: str
    session: engine.BorderSession
    draft: Draft = field(default_factory=Draft)
    revision: int = 0
    lock: asyncio.Lock = field(default_factory=asyncio.Lock)
    subscribers: list[asyncio.Queue] = field(default_factory=list)

    def bump(self, event: str) -> int:
        self.revision += 1
        message = {"revision": self.revision, "event": event}
        for q in self.subscribers:
            q.put_nowait(message)
        return self.revision


def _require_xy(body: dict, key: str) -> WorldPoint:
    value = body.get(key)
    if not (isinstance(value, (list, tuple)) and len(value) == 2):
        raise BadRequestError(f"{key!r} must be [x, y]")
    try:
        return WorldPoint(float(value[0]), float(value[1]))
    except (TypeError, ValueError):
        raise BadRequestError(f"{key!r} must hold numbers") from None


def _parse_xy_param(value: str, name: str) -> WorldPoint:
    parts = value.split(",")
    if len(parts) != 2:
        raise BadRequestError(f"query parameter {name!r} must be x,y")
    try:
        return WorldPoint(float(parts[0]), float(parts[1]))
    except ValueError:
        raise BadRequestError(f"query parameter {name!r} must hold numbers") from None


def create_app(map_source: str | OccupancyGridMap, static_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="border-forge teach server")
    base_map = load_map(map_source) if isinstance(map_source, str) else map_source
    sessions: dict[str, TeachSession] = {}

    def get_session(session_id: str) -> TeachSession:
        if session_id not in sessions:
            raise UnknownSessionError(f"no session {session_id!r}")
        return sessions[session_id]

    @app.exception_handler(BorderForgeError)
    async def domain_error(_request, err: BorderForgeError):
        status = 404 if isinstance(err, UnknownSessionError) else 400
        return JSONResponse(
            status_code=status,
            content={"class": err.code, "message": str(err), "detail": err.detail},
        )

    @app.exception_handler(RequestValidationError)
    async def validation_error(_request, err: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"class": "bad_request", "message": "invalid request", "detail": {}},
        )

    @app.get("/healthz")
    async def healthz():
        return {"status": "ok"}

    @app.get("/sessions")
    async def list_sessions():
        return {"sessions": [
            {"id": s.id, "revision": s.revision, "applied": len(s.session.applied)}
            for s in sessions.values()
        ]}

    @app.post("/sessions", status_code=201)
    async def create_session(request: Request):
        body = {}
        if await request.body():
            body = await request.json()
            if not isinstance(body, dict):
                raise BadRequestError("body must be a JSON object")
        if "map" in body and body["map"] is not None:
            grid = load_map(str(body["map"]))
        else:
            grid = base_map.copy()
        ts = TeachSession(id=uuid.uuid4().hex, session=engine.BorderSession(prior=grid))
        sessions[ts.id] = ts
        return {"id": ts.id, "revision": ts.revision}

    def session_state(ts: TeachSession) -> dict:
        grid = ts.session.current
        return {
            "id": ts.id,
            "revision": ts.revision,
            "applied": len(ts.session.applied),
            "draft": ts.draft.to_dict(),
            "map": {
                "width": grid.width,
                "height": grid.height,
                "resolution": grid.resolution,
                "origin": list(grid.origin),
                "free_thresh": grid.free_thresh,
                "occupied_thresh": grid.occupied_thresh,
            },
        }

    @app.get("/sessions/{session_id}")
    async def get_state(session_id: str):
        return session_state(get_session(session_id))

    @app.post("/sessions/{session_id}/points")
    async def add_point(session_id: str, request: Request):
        ts = get_session(session_id)
        body = await request.json()
        x, y = body.get("x"), body.get("y")
        if not isinstance(x, (int, float)) or not isinstance(y, (int, float)):
            raise BadRequestError('body must carry numeric "x" and "y"')
        p = WorldPoint(float(x), float(y))
        async with ts.lock:
            if not ts.session.current.contains_world(p):
                raise OutOfBoundsError(f"point {tuple(p)} outside the map extent")
            ts.draft.points.append(p)
            revision = ts.bump("point_added")
        return {"revision": revision, "draft_points": len(ts.draft.points)}

    @app.post("/sessions/{session_id}/meta")
    async def set_meta(session_id: str, request: Request):
        ts = get_session(session_id)
        body = await request.json()
        if not isinstance(body, dict):
            raise BadRequestError("body must be a JSON object")
        async with ts.lock:
            if "closed" in body:
                ts.draft.closed = bool(body["closed"])
            if "seed" in body:
                if body["seed"] is None:
                    ts.draft.seed = None
                else:
                    seed = _require_xy(body, "seed")
                    if not ts.session.current.contains_world(seed):
                        raise OutOfBoundsError(f"seed {tuple(seed)} outside the map extent")
                    ts.draft.seed = seed
            if "delta" in body:
                try:
                    delta = float(body["delta"])
                except (TypeError, ValueError):
                    raise BadRequestError('"delta" must be a number') from None
                if not (0.0 <= delta <= 1.0):
                    raise BadRequestError(f"delta must lie in [0, 1], got {delta}")
                ts.draft.delta = delta
            revision = ts.bump("meta_updated")
        return {"revision": revision, "draft": ts.draft.to_dict()}

    @app.post("/sessions/{session_id}/commit")
    async def commit_draft(session_id: str):
        ts = get_session(session_id)
        async with ts.lock:
            if not ts.draft.points:
                raise DraftIncompleteError("draft has no points")
            if ts.draft.seed is None:
                raise DraftIncompleteError("draft has no seed point")
            border = engine.VirtualBorder(
                chain=PolygonalChain(points=list(ts.draft.points), closed=ts.draft.closed),
                seed=ts.draft.seed,
                delta=ts.draft.delta,
            )
            engine.apply_border(ts.session, border)
            entry = ts.session.applied[-1]
            ts.draft = Draft(delta=ts.draft.delta)
            revision = ts.bump("committed")
        return {
            "revision": revision,
            "cells_changed": entry.cells_changed,
            "connected_cells": entry.connected_count,
        }

    @app.post("/sessions/{session_id}/undo")
    async def undo_last(session_id: str):
        ts = get_session(session_id)
        async with ts.lock:
            engine.undo(ts.session)
            revision = ts.bump("undone")
        return {"revision": revision, "applied": len(ts.session.applied)}

    @app.get("/sessions/{session_id}/export")
    async def export_session(session_id: str):
        ts = get_session(session_id)
        async with ts.lock:
            text = engine.export_script(ts.session)
        return Response(content=text, media_type="application/json")

    @app.post("/sessions/{session_id}/device_point")
    async def device_point(session_id: str, request: Request):
        # simulated handheld device: place it in the world, cast its view
        # ray onto the ground, get the map point it designates
        get_session(session_id)
        body = await request.json()
        xyz = body.get("xyz")
        rpy = body.get("rpy", [0.0, 0.0, 0.0])
        ray_dir = body.get("ray", [0.0, 0.0, -1.0])
        if not (isinstance(xyz, (list, tuple)) and len(xyz) == 3):
            raise BadRequestError('"xyz" must be [x, y, z]')
        graph = FrameGraph()
        graph.set_edge("Map", "Tango", Pose3.from_xyz_rpy(xyz, rpy))
        direction = np.asarray(ray_dir, dtype=np.float64)
        norm = np.linalg.norm(direction)
        if norm == 0:
            raise BadRequestError('"ray" must be a non-zero vector')
        hit = ray_ground_intersection(graph, Ray(np.zeros(3), direction / norm))
        return {"x": hit.x, "y": hit.y}

    def draft_preview_region(ts: TeachSession) -> np.ndarray | None:
        """Cells the draft would claim if committed now, or None."""
        draft = ts.draft
        if draft.seed is None or len(draft.points) < (3 if draft.closed else 2):
            return None
        try:
            chain = PolygonalChain(points=list(draft.points), closed=draft.closed)
            working = chain if chain.closed else extend_open_chain(ts.session.current, chain)
            part = engine.partition(ts.session.current, working, draft.seed)
        except BorderForgeError:
            return None
        return part.connected | part.barrier

    def render_frame(ts: TeachSession, start: WorldPoint | None,
                     goal: WorldPoint | None) -> Response:
        grid = ts.session.current
        rgb = raster.map_to_rgb(grid)
        for entry in ts.session.applied:
            raster.paint_cells(rgb, entry.barrier, raster.COLOR_COMMITTED)

        for a, b in zip(ts.draft.points, ts.draft.points[1:]):
            if tuple(a) != tuple(b):
                raster.paint_cell_set(rgb, rasterize_segment(grid, LineSegment(a, b)),
                                      raster.COLOR_DRAFT)
        if ts.draft.closed and len(ts.draft.points) >= 3:
            a, b = ts.draft.points[-1], ts.draft.points[0]
            if tuple(a) != tuple(b):
                raster.paint_cell_set(rgb, rasterize_segment(grid, LineSegment(a, b)),
                                      raster.COLOR_DRAFT)
        for p in ts.draft.points:
            c = grid.world_to_cell(p)
            rgb[c.row, c.col] = raster.COLOR_DRAFT
        if ts.draft.seed is not None:
            raster.paint_marker(rgb, grid.world_to_cell(ts.draft.seed), raster.COLOR_SEED)

        headers = {"X-Revision": str(ts.revision)}
        if start is not None and goal is not None:
            changed = evaluation.extract_virtual_area(ts.session.prior, grid).cells
            preview = draft_preview_region(ts)
            region = changed if preview is None else (changed | preview)
            try:
                costmap = planner.build_costmap(grid)
                path = planner.plan_path(costmap, start, goal)
            except BorderForgeError:
                headers["X-Plan-Found"] = "false"
                headers["X-Plan-Crosses"] = "false"
            else:
                raster.paint_cell_set(rgb, path.cells, raster.COLOR_PATH)
                headers["X-Plan-Found"] = "true"
                crosses = planner.path_crosses_region(path, region)
                headers["X-Plan-Crosses"] = "true" if crosses else "false"
            raster.paint_marker(rgb, grid.world_to_cell(start), raster.COLOR_START)
            raster.paint_marker(rgb, grid.world_to_cell(goal), raster.COLOR_GOAL)

        return Response(content=raster.to_png_bytes(rgb), media_type="image/png",
                        headers=headers)

    @app.get("/sessions/{session_id}/render.png")
    async def get_render(session_id: str, start: str | None = None, goal: str | None = None):
        ts = get_session(session_id)
        if (start is None) != (goal is None):
            raise BadRequestError("start and goal must be given together")
        start_p = _parse_xy_param(start, "start") if start else None
        goal_p = _parse_xy_param(goal, "goal") if goal else None
        async with ts.lock:
            return render_frame(ts, start_p, goal_p)

    @app.websocket("/sessions/{session_id}/events")
    async def events(websocket: WebSocket, session_id: str):
        if session_id not in sessions:
            await websocket.close(code=4404)
            return
        ts = sessions[session_id]
        queue: asyncio.Queue = asyncio.Queue()
        ts.subscribers.append(queue)
        await websocket.accept()
        try:
            await websocket.send_json({"revision": ts.revision, "event": "hello"})
            while True:
                await websocket.send_json(await queue.get())
        except (WebSocketDisconnect, RuntimeError):
            pass
        finally:
            if queue in ts.subscribers:
                ts.subscribers.remove(queue)

    if static_dir:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
