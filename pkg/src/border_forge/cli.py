"""Command-line front end: apply border scripts, evaluate, plan, serve.

Exit codes are a stable contract: 0 success, 2 parse failure, 3 grid
geometry mismatch, 4 planning failure, 1 anything else. Failures print
a human message plus one machine-readable JSON line on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import socket
import sys

from . import engine, evaluation, planner, raster
from .errors import (
    BorderForgeError,
    GeometryMismatchError,
    MapFormatError,
    PlanningError,
    ScriptBorderError,
    ScriptParseError,
)
from .gridmap import load_map, save_map

EXIT_OK = 0
EXIT_OTHER = 1
EXIT_PARSE = 2
EXIT_GEOMETRY = 3
EXIT_PLANNING = 4

log = logging.getLogger("border_forge")


def _exit_code_for(err: BorderForgeError) -> int:
    if isinstance(err, ScriptBorderError) and isinstance(err.cause, ScriptParseError):
        return EXIT_PARSE
    if isinstance(err, (ScriptParseError, MapFormatError)):
        return EXIT_PARSE
    if isinstance(err, GeometryMismatchError):
        return EXIT_GEOMETRY
    if isinstance(err, PlanningError):
        return EXIT_PLANNING
    return EXIT_OTHER


def _emit_error(err: BorderForgeError) -> None:
    print(f"error: {err}", file=sys.stderr)
    payload = {"class": err.code, "message": str(err), "detail": err.detail}
    print(json.dumps(payload), file=sys.stderr)


def _parse_xy(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected x,y — got {text!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def cmd_apply(args) -> int:
    mode = "trinary" if args.trinary else None
    prior = load_map(args.map, mode=mode)
    with open(args.script, "r", encoding="utf-8") as f:
        script_text = f.read()
    barrier_mode = (
        engine.BARRIER_MODE_STRICT if args.barrier_mode == "strict"
        else engine.BARRIER_MODE_OCCUPIED
    )
    session = engine.apply_script(prior, script_text, barrier_mode=barrier_mode)

    os.makedirs(args.out, exist_ok=True)
    posterior_path = os.path.join(args.out, "posterior.yaml")
    session_path = os.path.join(args.out, "session.json")
    save_map(session.current, posterior_path)
    with open(session_path, "w", encoding="utf-8") as f:
        f.write(engine.export_script(session))

    print(json.dumps({
        "borders_applied": len(session.applied),
        "cells_changed": sum(e.cells_changed for e in session.applied),
        "posterior": posterior_path,
        "session": session_path,
    }, indent=2))
    return EXIT_OK


def cmd_eval(args) -> int:
    prior = load_map(args.prior)
    posterior = load_map(args.posterior)
    gt_map = load_map(args.gt)
    if not prior.same_geometry(gt_map):
        raise GeometryMismatchError("ground-truth grid geometry differs from the prior")

    barrier = None
    if not args.include_barrier:
        if not args.script:
            raise BorderForgeError(
                "--no-include-barrier needs --script to reconstruct barrier cells"
            )
        with open(args.script, "r", encoding="utf-8") as f:
            replay = engine.apply_script(prior, f.read())
        barrier = replay.barrier_union()

    ud = evaluation.extract_virtual_area(
        prior, posterior, barrier=barrier, include_barrier=args.include_barrier
    )
    gt = evaluation.region_from_map(gt_map)
    report = evaluation.jaccard(gt, ud)

    os.makedirs(args.out, exist_ok=True)
    overlay_path = os.path.join(args.out, "overlay.png")
    report_path = os.path.join(args.out, "report.json")
    evaluation.render_overlay(prior, gt, ud, overlay_path)
    body = json.dumps(report.to_dict(), indent=2)
    with open(report_path, "w", encoding="utf-8") as f:
        f.write(body + "\n")
    print(body)
    return EXIT_OK


def cmd_plan(args) -> int:
    grid = load_map(args.map)
    costmap = planner.build_costmap(grid, inflation_radius=args.inflation)
    path = planner.plan_path(costmap, args.start, args.goal)

    os.makedirs(args.out, exist_ok=True)
    png_path = os.path.join(args.out, "plan.png")
    path_json = os.path.join(args.out, "path.json")

    rgb = raster.map_to_rgb(grid)
    raster.paint_cell_set(rgb, path.cells, raster.COLOR_PATH)
    raster.paint_marker(rgb, grid.world_to_cell(args.start), raster.COLOR_START)
    raster.paint_marker(rgb, grid.world_to_cell(args.goal), raster.COLOR_GOAL)
    raster.write_png(rgb, png_path)

    body = json.dumps({
        "length_m": path.length,
        "cost": path.cost,
        "waypoints": [[p.x, p.y] for p in path.points],
    }, indent=2)
    with open(path_json, "w", encoding="utf-8") as f:
        f.write(body + "\n")
    print(body)
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as probe:
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        try:
            probe.bind((args.host, args.port))
        except OSError as e:
            raise BorderForgeError(f"cannot bind {args.host}:{args.port}: {e}") from e

    app = create_app(args.map, static_dir=args.static)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="border-forge",
        description="teach virtual borders to occupancy grid maps",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("apply", help="apply a border script to a map")
    p.add_argument("--map", required=True, help="prior map metadata (YAML)")
    p.add_argument("--script", required=True, help="border script (JSON)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--barrier-mode", choices=["occupied", "strict"], default="occupied")
    p.add_argument("--trinary", action="store_true",
                   help="force trinary interpretation of the map")
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("eval", help="score a posterior against ground truth")
    p.add_argument("--prior", required=True)
    p.add_argument("--posterior", required=True)
    p.add_argument("--gt", required=True, help="ground-truth mask map (YAML)")
    p.add_argument("--out", required=True)
    p.add_argument("--include-barrier", action=argparse.BooleanOptionalAction, default=True,
                   help="count border-line cells as part of the taught area")
    p.add_argument("--script", help="session script; required by --no-include-barrier")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("plan", help="plan a path on a map")
    p.add_argument("--map", required=True)
    p.add_argument("--start", required=True, type=_parse_xy, metavar="X,Y")
    p.add_argument("--goal", required=True, type=_parse_xy, metavar="X,Y")
    p.add_argument("--out", required=True)
    p.add_argument("--inflation", type=float, default=planner.DEFAULT_INFLATION_RADIUS,
                   metavar="METERS")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("serve", help="run the interactive teach server")
    p.add_argument("--map", required=True)
    p.add_argument("--port", type=int, default=8700)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--static", help="directory of web UI assets to serve at /")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("BORDER_FORGE_LOG", "WARNING").upper())
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BorderForgeError as e:
        _emit_error(e)
        return _exit_code_for(e)
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        print(json.dumps({"class": "io", "message": str(e), "detail": {}}), file=sys.stderr)
        return EXIT_OTHER


if __name__ == "__main__":
    raise SystemExit(main())
