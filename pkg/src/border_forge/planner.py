"""Costmap construction and 8-connected A* planning over grid maps.

Costs: occupied or unknown source cells are lethal. Cells within the
inflation radius of a lethal cell carry an extra cost that falls off
linearly with Euclidean cell-center distance (100 next to an obstacle,
base level at the radius). Everything else costs the base 1. Step cost
is step length in meters times (1 + destination cell cost), so adding
obstacles can only ever make paths more expensive.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import PlanningError
from .gridmap import CellIndex, OccupancyGridMap, WorldPoint

LETHAL = np.inf
BASE_COST = 1.0
INFLATED_MAX = 100.0
DEFAULT_INFLATION_RADIUS = 0.18  # meters, small differential-drive footprint


@dataclass
class Costmap:
    source: OccupancyGridMap
    cost: np.ndarray  # float64, LETHAL(inf) for untraversable cells
    inflation_radius: float

    @property
    def lethal(self) -> np.ndarray:
        return np.isinf(self.cost)


def build_costmap(grid: OccupancyGridMap,
                  inflation_radius: float = DEFAULT_INFLATION_RADIUS) -> Costmap:
    if inflation_radius < 0:
        raise PlanningError("inflation radius must be >= 0")
    lethal = grid.lethal_mask()
    cost = np.full(lethal.shape, BASE_COST, dtype=np.float64)

    if lethal.any() and inflation_radius > 0:
        res = grid.resolution
        # Euclidean cell-center distance to the nearest lethal cell, meters
        dist = ndimage.distance_transform_edt(~lethal) * res
        within = ~lethal & (dist <= inflation_radius)
        if inflation_radius > res:
            decay = INFLATED_MAX * (inflation_radius - dist) / (inflation_radius - res)
        else:
            decay = np.full(dist.shape, INFLATED_MAX)
        cost[within] = np.maximum(BASE_COST, np.minimum(decay[within], INFLATED_MAX))

    cost[lethal] = LETHAL
    return Costmap(source=grid, cost=cost, inflation_radius=inflation_radius)


@dataclass
class Path:
    points: list[WorldPoint]
    cells: list[CellIndex]
    length: float  # meters
    cost: float


_MOVES = [
    (0, 1, 1.0), (0, -1, 1.0), (1, 0, 1.0), (-1, 0, 1.0),
    (1, 1, math.sqrt(2)), (1, -1, math.sqrt(2)),
    (-1, 1, math.sqrt(2)), (-1, -1, math.sqrt(2)),
]


def plan_path(costmap: Costmap, start, goal) -> Path:
    """Minimum-cost 8-connected path between two world points.

    A* with a Euclidean heuristic; ties break toward lower row, then
    lower column, making results deterministic.
    """
    grid = costmap.source
    start_cell = grid.world_to_cell(start)
    goal_cell = grid.world_to_cell(goal)
    cost = costmap.cost
    if np.isinf(cost[start_cell.row, start_cell.col]):
        raise PlanningError(f"start cell {tuple(start_cell)} is lethal")
    if np.isinf(cost[goal_cell.row, goal_cell.col]):
        raise PlanningError(f"goal cell {tuple(goal_cell)} is lethal")

    res = grid.resolution
    height, width = cost.shape

    def heuristic(row: int, col: int) -> float:
        # every step costs at least (1 + BASE_COST) per meter
        return math.hypot(row - goal_cell.row, col - goal_cell.col) * res * (1.0 + BASE_COST)

    start_rc = (start_cell.row, start_cell.col)
    goal_rc = (goal_cell.row, goal_cell.col)
    g_score = {start_rc: 0.0}
    came_from: dict = {}
    open_heap = [(heuristic(*start_rc), start_rc[0], start_rc[1])]
    closed = set()

    while open_heap:
        _, row, col = heapq.heappop(open_heap)
        if (row, col) in closed:
            continue
        closed.add((row, col))
        if (row, col) == goal_rc:
            break
        g_here = g_score[(row, col)]
        for drow, dcol, step in _MOVES:
            nrow, ncol = row + drow, col + dcol
            if not (0 <= nrow < height and 0 <= ncol < width):
                continue
            c = cost[nrow, ncol]
            if np.isinf(c):
                continue
            g_new = g_here + step * res * (1.0 + c)
            if g_new < g_score.get((nrow, ncol), math.inf):
                g_score[(nrow, ncol)] = g_new
                came_from[(nrow, ncol)] = (row, col)
                heapq.heappush(open_heap, (g_new + heuristic(nrow, ncol), nrow, ncol))
    else:
        raise PlanningError("no path between start and goal")

    cells_rc = [goal_rc]
    while cells_rc[-1] != start_rc:
        cells_rc.append(came_from[cells_rc[-1]])
    cells_rc.reverse()

    cells = [CellIndex(col=c, row=r) for r, c in cells_rc]
    points = [grid.cell_to_world(c) for c in cells]
    length = sum(
        math.hypot(b[0] - a[0], b[1] - a[1]) for a, b in zip(cells_rc, cells_rc[1:])
    ) * res
    return Path(points=points, cells=cells, length=length, cost=g_score[goal_rc])


def path_crosses_region(path: Path, region: np.ndarray) -> bool:
    """True when any path cell lies inside the region mask."""
    return any(region[c.row, c.col] for c in path.cells)
