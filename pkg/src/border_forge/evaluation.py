"""Accuracy scoring of taught areas against ground truth.

The user-defined area is whatever flipped from traversable to
non-traversable between prior and posterior. Similarity is the Jaccard
index over cell sets, and overlays color-code overlap (green), ground
truth only (yellow) and user-defined only (red) over the map.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BorderForgeError, GeometryMismatchError
from .gridmap import OccupancyGridMap
from .raster import COLOR_GT_ONLY, COLOR_OVERLAP, COLOR_UD_ONLY, map_to_rgb, write_png


@dataclass
class RegionMask:
    cells: np.ndarray  # bool (height, width)
    role: str = "UD"   # "GT" or "UD"

    @property
    def count(self) -> int:
        return int(self.cells.sum())


@dataclass
class AccuracyReport:
    jaccard: float
    intersection_cells: int
    union_cells: int
    gt_only: int
    ud_only: int

    def to_dict(self) -> dict:
        return {
            "jaccard": self.jaccard,
            "intersection_cells": self.intersection_cells,
            "union_cells": self.union_cells,
            "gt_only": self.gt_only,
            "ud_only": self.ud_only,
        }


def _check_geometry(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise GeometryMismatchError(f"mask shapes differ: {a.shape} vs {b.shape}")


def extract_virtual_area(prior: OccupancyGridMap, posterior: OccupancyGridMap,
                         barrier: np.ndarray | None = None,
                         include_barrier: bool = True) -> RegionMask:
    """Cells that flipped from traversable to non-traversable.

    Barrier cells changed class too, so they are part of the area by
    default; pass the barrier mask with include_barrier=False to strip
    the border line itself.
    """
    if not prior.same_geometry(posterior):
        raise GeometryMismatchError("prior and posterior grids differ in geometry")
    changed = prior.traversable_mask() & ~posterior.traversable_mask()
    if not include_barrier:
        if barrier is None:
            raise BorderForgeError("stripping the barrier needs the barrier mask")
        changed = changed & ~barrier
    return RegionMask(cells=changed, role="UD")


def region_from_map(grid: OccupancyGridMap, role: str = "GT") -> RegionMask:
    """Occupied cells of a mask map; how ground-truth areas are stored."""
    return RegionMask(cells=~np.isnan(grid.cells) & (grid.cells >= grid.occupied_thresh),
                      role=role)


def jaccard(gt: RegionMask, ud: RegionMask) -> AccuracyReport:
    """Intersection over union of the two cell sets."""
    _check_geometry(gt.cells, ud.cells)
    inter = int((gt.cells & ud.cells).sum())
    union = int((gt.cells | ud.cells).sum())
    if union == 0:
        raise BorderForgeError("both masks are empty; Jaccard undefined")
    return AccuracyReport(
        jaccard=inter / union,
        intersection_cells=inter,
        union_cells=union,
        gt_only=int((gt.cells & ~ud.cells).sum()),
        ud_only=int((ud.cells & ~gt.cells).sum()),
    )


def render_overlay(grid: OccupancyGridMap, gt: RegionMask, ud: RegionMask,
                   path: str) -> None:
    """Write the comparison image: green overlap, yellow GT-only, red UD-only."""
    if (grid.height, grid.width) != gt.cells.shape:
        raise GeometryMismatchError("map and masks differ in geometry")
    _check_geometry(gt.cells, ud.cells)
    rgb = map_to_rgb(grid)
    rgb[gt.cells & ~ud.cells] = COLOR_GT_ONLY
    rgb[ud.cells & ~gt.cells] = COLOR_UD_ONLY
    rgb[gt.cells & ud.cells] = COLOR_OVERLAP
    write_png(rgb, path)
