"""Synthetic lab environment: a 6.1 m x 3.5 m room at 2.5 cm per cell.

Builds the map and the two-border teaching scenario used throughout the
docs and tests: an open separating curve fencing off the window side of
the room, then a closed polygon around a 2.00 m x 1.25 m carpet. Border
vertices sit on cell centers so rasterization is insensitive to float
noise from round trips through other tools.

Run ``python -m border_forge.demo --out DIR`` to write the demo assets.
"""

from __future__ import annotations

import argparse
import json
import os

import numpy as np

from .gridmap import OccupancyGridMap, save_map

RESOLUTION = 0.025
WIDTH = 244  # 6.1 m
HEIGHT = 140  # 3.5 m

FREE = 1.0 / 255.0  # pixel 254
OCCUPIED = 1.0

# window-side separating curve (open chain, extended automatically);
# slope chosen so neither segment nor extension ever hits a grid corner
# exactly, keeping rasterization stable under float round trips
WINDOW_CHAIN = [(1.2125, 0.8125), (1.1725, 1.7625), (1.2125, 2.7125)]
WINDOW_SEED = (0.5125, 1.7625)

# closed carpet polygon, 2.00 m x 1.25 m
CARPET_CHAIN = [
    (2.6125, 1.0125),
    (4.6125, 1.0125),
    (4.6125, 2.2625),
    (2.6125, 2.2625),
]
CARPET_SEED = (3.6125, 1.6375)

# navigation scenario: drive from the right half to a goal left of the carpet
NAV_START = (5.5125, 1.6375)
NAV_GOAL = (1.9125, 1.6375)


def build_lab_map() -> OccupancyGridMap:
    cells = np.full((HEIGHT, WIDTH), FREE, dtype=np.float64)

    # unexplored margin around the mapped area, then the room walls
    cells[:2, :] = np.nan
    cells[-2:, :] = np.nan
    cells[:, :2] = np.nan
    cells[:, -2:] = np.nan
    cells[2:4, 2:-2] = OCCUPIED
    cells[-4:-2, 2:-2] = OCCUPIED
    cells[2:-2, 2:4] = OCCUPIED
    cells[2:-2, -4:-2] = OCCUPIED

    # furniture: a table on the window side, a crate in the far corner
    cells[108:128, 12:36] = OCCUPIED
    cells[8:20, 228:236] = OCCUPIED
    return OccupancyGridMap(resolution=RESOLUTION, origin=(0.0, 0.0, 0.0), cells=cells)


def carpet_region_mask(grid: OccupancyGridMap) -> np.ndarray:
    """Cells whose centers lie on the carpet rectangle (barrier included)."""
    mask = np.zeros((grid.height, grid.width), dtype=bool)
    (x0, y0), (x1, y1) = CARPET_CHAIN[0], CARPET_CHAIN[2]
    cols = np.arange(grid.width)
    rows = np.arange(grid.height)
    cx = (cols + 0.5) * grid.resolution
    cy = (rows + 0.5) * grid.resolution
    mask[np.ix_((cy >= y0) & (cy <= y1), (cx >= x0) & (cx <= x1))] = True
    return mask


def build_gt_carpet_map() -> OccupancyGridMap:
    """Ground-truth mask map: only the carpet area is occupied."""
    cells = np.zeros((HEIGHT, WIDTH), dtype=np.float64)
    grid = OccupancyGridMap(resolution=RESOLUTION, origin=(0.0, 0.0, 0.0), cells=cells)
    grid.cells[carpet_region_mask(grid)] = OCCUPIED
    return grid


def teaching_script(include_window: bool = True, include_carpet: bool = True) -> str:
    borders = []
    if include_window:
        borders.append(
            {
                "points": [list(p) for p in WINDOW_CHAIN],
                "closed": False,
                "seed": list(WINDOW_SEED),
                "delta": 1.0,
            }
        )
    if include_carpet:
        borders.append(
            {
                "points": [list(p) for p in CARPET_CHAIN],
                "closed": True,
                "seed": list(CARPET_SEED),
                "delta": 1.0,
            }
        )
    return json.dumps({"borders": borders}, indent=2) + "\n"


def write_demo_assets(out_dir: str) -> dict:
    os.makedirs(out_dir, exist_ok=True)
    paths = {
        "map": os.path.join(out_dir, "lab.yaml"),
        "gt": os.path.join(out_dir, "carpet_gt.yaml"),
        "script": os.path.join(out_dir, "teaching.json"),
        "carpet_script": os.path.join(out_dir, "carpet_only.json"),
    }
    save_map(build_lab_map(), paths["map"])
    save_map(build_gt_carpet_map(), paths["gt"])
    with open(paths["script"], "w", encoding="utf-8") as f:
        f.write(teaching_script())
    with open(paths["carpet_script"], "w", encoding="utf-8") as f:
        f.write(teaching_script(include_window=False))
    return paths


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="write the demo lab map and teaching script")
    parser.add_argument("--out", default="demo", help="output directory")
    args = parser.parse_args(argv)
    paths = write_demo_assets(args.out)
    print(json.dumps(paths, indent=2))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
