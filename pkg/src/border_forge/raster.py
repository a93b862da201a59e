"""Deterministic RGB rendering of maps, cell masks and markers.

One cell maps to one pixel; image row 0 shows the top map row, matching
the PGM orientation. Used by the evaluation overlays, the CLI plan
renderer and the teach server's live view.
"""

from __future__ import annotations

import io

import numpy as np
from PIL import Image

from .gridmap import CellIndex, OccupancyGridMap, UNKNOWN_PIXEL

COLOR_OVERLAP = (0, 200, 0)
COLOR_GT_ONLY = (240, 220, 0)
COLOR_UD_ONLY = (220, 30, 30)
COLOR_DRAFT = (220, 30, 30)
COLOR_COMMITTED = (0, 170, 0)
COLOR_PATH = (40, 90, 255)
COLOR_SEED = (255, 140, 0)
COLOR_START = (0, 130, 200)
COLOR_GOAL = (130, 0, 200)


def map_to_rgb(grid: OccupancyGridMap) -> np.ndarray:
    """Grayscale background, (height, width, 3) uint8, row 0 = bottom."""
    gray = np.rint((1.0 - np.nan_to_num(grid.cells, nan=0.0)) * 255.0).astype(np.uint8)
    gray[grid.unknown_mask] = UNKNOWN_PIXEL
    return np.repeat(gray[:, :, None], 3, axis=2)


def paint_cells(rgb: np.ndarray, mask: np.ndarray, color) -> None:
    rgb[mask] = color


def paint_cell_set(rgb: np.ndarray, cells, color) -> None:
    for c in cells:
        rgb[c.row, c.col] = color


def paint_marker(rgb: np.ndarray, cell: CellIndex, color, arm: int = 2) -> None:
    """Small plus-shaped marker centered on a cell."""
    height, width = rgb.shape[:2]
    for d in range(-arm, arm + 1):
        if 0 <= cell.row + d < height:
            rgb[cell.row + d, cell.col] = color
        if 0 <= cell.col + d < width:
            rgb[cell.row, cell.col + d] = color


def to_png_bytes(rgb: np.ndarray) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(np.flipud(rgb), mode="RGB").save(buf, format="PNG")
    return buf.getvalue()


def write_png(rgb: np.ndarray, path: str) -> None:
    with open(path, "wb") as f:
        f.write(to_png_bytes(rgb))
