"""Virtual border engine: partition the map at a barrier and rewrite one side.

A virtual border is (chain, seed, delta). The chain rasterizes to a
barrier; a 4-connected flood fill from the seed cell over traversable
cells yields the connected region, which takes occupancy ``delta`` in
the posterior map. Everything else keeps its prior value bit for bit;
the barrier cells themselves become occupied (or ``delta`` in strict
mode). Open chains are extended to the map boundary before rasterizing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ChainInvalidError,
    EmptySessionError,
    OutOfBoundsError,
    ScriptBorderError,
    ScriptParseError,
    SeedNotTraversableError,
    SeedOnBarrierError,
)
from .geometry import PolygonalChain, extend_open_chain, rasterize_chain, validate_chain
from .gridmap import CellIndex, OccupancyGridMap, WorldPoint

BARRIER_MODE_OCCUPIED = "occupied"  # barrier cells forced to 1.0
BARRIER_MODE_STRICT = "strict"      # barrier cells take delta, as the two-case rule reads


@dataclass
class VirtualBorder:
    chain: PolygonalChain
    seed: WorldPoint
    delta: float

    def __post_init__(self):
        self.seed = WorldPoint(float(self.seed[0]), float(self.seed[1]))
        self.delta = float(self.delta)
        if not (0.0 <= self.delta <= 1.0):
            raise ChainInvalidError(f"delta must lie in [0, 1], got {self.delta}")

    def to_dict(self) -> dict:
        return {
            "points": [[p.x, p.y] for p in self.chain.points],
            "closed": self.chain.closed,
            "seed": [self.seed.x, self.seed.y],
            "delta": self.delta,
        }

    @staticmethod
    def from_dict(entry: dict) -> "VirtualBorder":
        try:
            points = [(float(p[0]), float(p[1])) for p in entry["points"]]
            closed = bool(entry["closed"])
            seed = (float(entry["seed"][0]), float(entry["seed"][1]))
            delta = float(entry["delta"])
        except (KeyError, TypeError, IndexError, ValueError) as e:
            raise ScriptParseError(f"malformed border entry: {e}") from e
        return VirtualBorder(
            chain=PolygonalChain(points=points, closed=closed),
            seed=WorldPoint(*seed),
            delta=delta,
        )


@dataclass
class PartitionResult:
    connected: np.ndarray   # bool mask: region reachable from the seed
    complement: np.ndarray  # bool mask: everything else off the barrier
    barrier: np.ndarray     # bool mask: rasterized chain
    seed_cell: CellIndex


def flood_fill_4(passable: np.ndarray, seed: CellIndex) -> np.ndarray:
    """Cells reachable from seed by 4-connected steps over passable cells."""
    reached = np.zeros_like(passable, dtype=bool)
    if not passable[seed.row, seed.col]:
        return reached
    frontier = np.zeros_like(passable, dtype=bool)
    frontier[seed.row, seed.col] = True
    reached[seed.row, seed.col] = True
    while frontier.any():
        grown = np.zeros_like(frontier)
        grown[1:, :] |= frontier[:-1, :]
        grown[:-1, :] |= frontier[1:, :]
        grown[:, 1:] |= frontier[:, :-1]
        grown[:, :-1] |= frontier[:, 1:]
        frontier = grown & passable & ~reached
        reached |= frontier
    return reached


def _cells_to_mask(grid: OccupancyGridMap, cells: set[CellIndex]) -> np.ndarray:
    mask = np.zeros((grid.height, grid.width), dtype=bool)
    for c in cells:
        mask[c.row, c.col] = True
    return mask


def partition(grid: OccupancyGridMap, chain: PolygonalChain, seed) -> PartitionResult:
    """Split the map into seed-connected cells, the rest, and the barrier.

    Open chains must already be extended to the map boundary. The flood
    fill treats occupied and unknown cells as walls, so physical
    obstacles inside the enclosed area keep their prior values.
    """
    report = validate_chain(chain)
    if not report.valid:
        raise ChainInvalidError("; ".join(report.problems))
    barrier = _cells_to_mask(grid, rasterize_chain(grid, chain))

    try:
        seed_cell = grid.world_to_cell(seed)
    except OutOfBoundsError as e:
        raise OutOfBoundsError(f"seed {tuple(seed)}: {e}") from e
    if barrier[seed_cell.row, seed_cell.col]:
        raise SeedOnBarrierError(f"seed cell {tuple(seed_cell)} lies on the barrier")
    if not grid.traversable_mask()[seed_cell.row, seed_cell.col]:
        raise SeedNotTraversableError(
            f"seed cell {tuple(seed_cell)} is occupied or unknown"
        )

    passable = grid.traversable_mask() & ~barrier
    connected = flood_fill_4(passable, seed_cell)
    complement = ~connected & ~barrier
    return PartitionResult(connected=connected, complement=complement,
                           barrier=barrier, seed_cell=seed_cell)


@dataclass
class AppliedBorder:
    border: VirtualBorder
    snapshot: OccupancyGridMap  # map state before this border
    barrier: np.ndarray
    connected_count: int
    cells_changed: int


@dataclass
class BorderSession:
    prior: OccupancyGridMap
    barrier_mode: str = BARRIER_MODE_OCCUPIED
    applied: list[AppliedBorder] = field(default_factory=list)
    current: OccupancyGridMap = None

    def __post_init__(self):
        if self.barrier_mode not in (BARRIER_MODE_OCCUPIED, BARRIER_MODE_STRICT):
            raise ScriptParseError(f"unknown barrier mode {self.barrier_mode!r}")
        if self.current is None:
            self.current = self.prior.copy()

    def barrier_union(self) -> np.ndarray:
        union = np.zeros((self.prior.height, self.prior.width), dtype=bool)
        for entry in self.applied:
            union |= entry.barrier
        return union


def apply_border(session: BorderSession, border: VirtualBorder) -> OccupancyGridMap:
    """Integrate one border into the session's current map.

    The stored border keeps the user's original chain; extension of open
    chains happens on a working copy only.
    """
    grid = session.current
    chain = border.chain
    report = validate_chain(chain)
    if not report.valid:
        raise ChainInvalidError("; ".join(report.problems))
    working = chain if chain.closed else extend_open_chain(grid, chain)
    part = partition(grid, working, border.seed)

    cells = grid.cells.copy()
    cells[part.connected] = border.delta
    if session.barrier_mode == BARRIER_MODE_OCCUPIED:
        cells[part.barrier] = 1.0
    else:
        cells[part.barrier] = border.delta

    posterior = grid.copy()
    posterior.cells = cells
    changed = int(np.sum(~_values_equal(grid.cells, cells)))
    session.applied.append(
        AppliedBorder(
            border=border,
            snapshot=grid.copy(),
            barrier=part.barrier,
            connected_count=int(part.connected.sum()),
            cells_changed=changed,
        )
    )
    session.current = posterior
    return posterior


def _values_equal(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return (a == b) | (np.isnan(a) & np.isnan(b))


def undo(session: BorderSession) -> OccupancyGridMap:
    """Remove the most recent border; the map reverts bit-exact."""
    if not session.applied:
        raise EmptySessionError("no applied borders to undo")
    entry = session.applied.pop()
    session.current = entry.snapshot
    return session.current


# -- border scripts ----------------------------------------------------------


def parse_script(text: str) -> list[VirtualBorder]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScriptParseError(
            f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}",
            detail={"line": e.lineno, "column": e.colno, "pos": e.pos},
        ) from e
    if not isinstance(doc, dict) or not isinstance(doc.get("borders"), list):
        raise ScriptParseError('script must be an object with a "borders" array')
    borders = []
    for i, entry in enumerate(doc["borders"]):
        try:
            borders.append(VirtualBorder.from_dict(entry))
        except (ScriptParseError, ChainInvalidError) as e:
            raise ScriptBorderError(i, e) from e
    return borders


def export_script(session: BorderSession) -> str:
    doc = {"borders": [entry.border.to_dict() for entry in session.applied]}
    return json.dumps(doc, indent=2) + "\n"


def apply_script(prior: OccupancyGridMap, script: str,
                 barrier_mode: str = BARRIER_MODE_OCCUPIED) -> BorderSession:
    """Apply every border of a script in order over a fresh session."""
    borders = parse_script(script)
    session = BorderSession(prior=prior, barrier_mode=barrier_mode)
    for i, border in enumerate(borders):
        try:
            apply_border(session, border)
        except ScriptBorderError:
            raise
        except Exception as e:
            raise ScriptBorderError(i, e) from e
    return session
