"""Virtual borders for occupancy grid maps.

Draw polygonal chains on a map, pick a seed side and an occupancy
value, and rebuild the map so planners treat the chosen area as taught:
kept out, freed up, or set to any probability in between.
"""

from .engine import (
    BorderSession,
    PartitionResult,
    VirtualBorder,
    apply_border,
    apply_script,
    export_script,
    partition,
    undo,
)
from .geometry import LineSegment, PolygonalChain, extend_open_chain, rasterize_chain, rasterize_segment, validate_chain
from .gridmap import CellIndex, OccupancyGridMap, WorldPoint, load_map, maps_equal, save_map

__version__ = "0.1.0"

__all__ = [
    "BorderSession",
    "CellIndex",
    "LineSegment",
    "OccupancyGridMap",
    "PartitionResult",
    "PolygonalChain",
    "VirtualBorder",
    "WorldPoint",
    "apply_border",
    "apply_script",
    "export_script",
    "extend_open_chain",
    "load_map",
    "maps_equal",
    "partition",
    "rasterize_chain",
    "rasterize_segment",
    "save_map",
    "undo",
    "validate_chain",
]
