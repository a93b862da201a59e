"""Polygonal chains and their gap-free rasterization onto the grid.

Rasterization produces the supercover of a segment: every cell the
continuous segment passes through, with both off-diagonal neighbors
added where it crosses a grid corner exactly. The result is 4-connected
per segment, so a 4-connected flood fill can never leak through it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ChainInvalidError, OutOfBoundsError
from .gridmap import CellIndex, OccupancyGridMap, WorldPoint


@dataclass(frozen=True)
class LineSegment:
    a: WorldPoint
    b: WorldPoint

    def __post_init__(self):
        if tuple(self.a) == tuple(self.b):
            raise ChainInvalidError("zero-length segment")


@dataclass
class PolygonalChain:
    points: list[WorldPoint]
    closed: bool = False

    def __post_init__(self):
        self.points = [WorldPoint(float(p[0]), float(p[1])) for p in self.points]

    def segments(self) -> list[LineSegment]:
        segs = [LineSegment(a, b) for a, b in zip(self.points, self.points[1:])]
        if self.closed and len(self.points) >= 3:
            segs.append(LineSegment(self.points[-1], self.points[0]))
        return segs


@dataclass
class ChainReport:
    arity_ok: bool = True
    distinct_ok: bool = True
    simple_ok: bool = True
    problems: list[str] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return self.arity_ok and self.distinct_ok and self.simple_ok


def validate_chain(chain: PolygonalChain) -> ChainReport:
    """Check arity, consecutive-point distinctness and self-intersection.

    A closed chain must be a simple polygon, an open chain a simple arc.
    """
    report = ChainReport()
    n = len(chain.points)
    minimum = 3 if chain.closed else 2
    if n < minimum:
        report.arity_ok = False
        report.problems.append(
            f"need at least {minimum} points for a {'closed' if chain.closed else 'open'} chain, got {n}"
        )
        return report

    for i, (a, b) in enumerate(zip(chain.points, chain.points[1:])):
        if tuple(a) == tuple(b):
            report.distinct_ok = False
            report.problems.append(f"points {i} and {i + 1} coincide")
    if chain.closed and tuple(chain.points[-1]) == tuple(chain.points[0]):
        report.distinct_ok = False
        report.problems.append("closing segment has zero length")
    if not report.distinct_ok:
        return report

    segs = chain.segments()
    m = len(segs)
    for i in range(m):
        for j in range(i + 1, m):
            adjacent = j == i + 1 or (chain.closed and i == 0 and j == m - 1)
            if _segments_conflict(segs[i], segs[j], adjacent):
                report.simple_ok = False
                report.problems.append(f"segments {i} and {j} intersect")
    return report


def _orient(p, q, r) -> float:
    return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])


def _on_segment(p, q, r) -> bool:
    """r collinear with pq: does r lie within the segment's bounding box?"""
    return (
        min(p[0], q[0]) <= r[0] <= max(p[0], q[0])
        and min(p[1], q[1]) <= r[1] <= max(p[1], q[1])
    )


def _segments_conflict(s1: LineSegment, s2: LineSegment, adjacent: bool) -> bool:
    """True when two chain segments intersect beyond a shared endpoint."""
    p1, q1, p2, q2 = s1.a, s1.b, s2.a, s2.b
    shared = {tuple(p1), tuple(q1)} & {tuple(p2), tuple(q2)}
    if adjacent and shared:
        # allowed to touch at the shared vertex only; a spike folding back
        # onto the previous segment still counts as an intersection
        others = [r for r in (p2, q2) if tuple(r) not in shared]
        for r in others:
            if _orient(p1, q1, r) == 0 and _on_segment(p1, q1, r):
                return True
        others = [r for r in (p1, q1) if tuple(r) not in shared]
        for r in others:
            if _orient(p2, q2, r) == 0 and _on_segment(p2, q2, r):
                return True
        return False

    d1 = _orient(p2, q2, p1)
    d2 = _orient(p2, q2, q1)
    d3 = _orient(p1, q1, p2)
    d4 = _orient(p1, q1, q2)
    if ((d1 > 0) != (d2 > 0) and d1 != 0 and d2 != 0) and (
        (d3 > 0) != (d4 > 0) and d3 != 0 and d4 != 0
    ):
        return True
    for (a, b, r) in ((p2, q2, p1), (p2, q2, q1), (p1, q1, p2), (p1, q1, q2)):
        if _orient(a, b, r) == 0 and _on_segment(a, b, r):
            return True
    return False


# -- rasterization -----------------------------------------------------------


def rasterize_segment(grid: OccupancyGridMap, seg: LineSegment) -> set[CellIndex]:
    """Supercover of a segment as a set of in-bounds cells.

    Both endpoints must lie inside the map extent. Cells are the floor
    cells of every point along the segment; an exact pass through a grid
    corner contributes both off-diagonal neighbor cells.
    """
    a = grid.world_to_grid(*seg.a)
    b = grid.world_to_grid(*seg.b)
    for g, w in ((a, seg.a), (b, seg.b)):
        wext, hext = grid.grid_extent()
        if not (0 <= g[0] <= wext and 0 <= g[1] <= hext):
            raise OutOfBoundsError(f"segment endpoint {tuple(w)} outside map extent")

    # canonical direction so rasterize(a,b) == rasterize(b,a) bit for bit
    if b < a:
        a, b = b, a

    res = grid.resolution
    ax, ay = a[0] / res, a[1] / res
    bx, by = b[0] / res, b[1] / res
    dx, dy = bx - ax, by - ay

    ts = {0.0, 1.0}
    if dx != 0:
        lo, hi = sorted((ax, bx))
        for i in range(math.ceil(lo), math.floor(hi) + 1):
            t = (i - ax) / dx
            if 0.0 < t < 1.0:
                ts.add(t)
    if dy != 0:
        lo, hi = sorted((ay, by))
        for j in range(math.ceil(lo), math.floor(hi) + 1):
            t = (j - ay) / dy
            if 0.0 < t < 1.0:
                ts.add(t)
    params = sorted(ts)

    def cell_at(px: float, py: float) -> CellIndex:
        col = math.floor(px)
        row = math.floor(py)
        col = min(max(col, 0), grid.width - 1)
        row = min(max(row, 0), grid.height - 1)
        return CellIndex(col, row)

    ordered: list[CellIndex] = [cell_at(ax, ay)]
    for t0, t1 in zip(params, params[1:]):
        tm = 0.5 * (t0 + t1)
        c = cell_at(ax + tm * dx, ay + tm * dy)
        if c != ordered[-1]:
            ordered.append(c)
    end = cell_at(bx, by)
    if end != ordered[-1]:
        ordered.append(end)

    cells: set[CellIndex] = set(ordered)
    for c0, c1 in zip(ordered, ordered[1:]):
        if abs(c1.col - c0.col) == 1 and abs(c1.row - c0.row) == 1:
            # exact corner crossing: take both off-diagonal neighbors
            cells.add(CellIndex(c0.col, c1.row))
            cells.add(CellIndex(c1.col, c0.row))
    return cells


def rasterize_chain(grid: OccupancyGridMap, chain: PolygonalChain) -> set[CellIndex]:
    """Union of segment supercovers, including the closing segment."""
    report = validate_chain(chain)
    if not report.arity_ok or not report.distinct_ok:
        raise ChainInvalidError("; ".join(report.problems))
    cells: set[CellIndex] = set()
    for seg in chain.segments():
        cells |= rasterize_segment(grid, seg)
    return cells


# -- open-chain extension ----------------------------------------------------


def _ray_to_boundary(origin: tuple[float, float], direction: tuple[float, float],
                     extent: tuple[float, float]) -> tuple[float, float]:
    """First exit of origin + t*direction (t >= 0) from [0,w] x [0,h]."""
    w, h = extent
    t_exit = math.inf
    for o, d, hi in ((origin[0], direction[0], w), (origin[1], direction[1], h)):
        if d > 0:
            t_exit = min(t_exit, (hi - o) / d)
        elif d < 0:
            t_exit = min(t_exit, (0.0 - o) / d)
    if not math.isfinite(t_exit):
        return origin
    t_exit = max(t_exit, 0.0)
    x = min(max(origin[0] + t_exit * direction[0], 0.0), w)
    y = min(max(origin[1] + t_exit * direction[1], 0.0), h)
    return (x, y)


def extend_open_chain(grid: OccupancyGridMap, chain: PolygonalChain) -> PolygonalChain:
    """Extend the terminal segments of an open chain to the map boundary.

    The first point moves backward along (p1 - p2) and the last forward
    along (pn - p[n-1]) until each hits the map's bounding rectangle;
    interior points are untouched. Extending twice is a no-op.
    """
    if chain.closed:
        raise ChainInvalidError("cannot extend a closed chain")
    if len(chain.points) < 2:
        raise ChainInvalidError("need at least 2 points to extend")

    extent = grid.grid_extent()
    gpts = [grid.world_to_grid(*p) for p in chain.points]

    first_dir = (gpts[0][0] - gpts[1][0], gpts[0][1] - gpts[1][1])
    last_dir = (gpts[-1][0] - gpts[-2][0], gpts[-1][1] - gpts[-2][1])
    new_first = _ray_to_boundary(gpts[0], first_dir, extent)
    new_last = _ray_to_boundary(gpts[-1], last_dir, extent)

    points = [grid.grid_to_world(*new_first)]
    points += chain.points[1:-1]
    points.append(grid.grid_to_world(*new_last))
    return PolygonalChain(points=points, closed=False)
