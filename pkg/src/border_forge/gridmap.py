"""Occupancy grid maps: representation, world/cell conversion, PGM+YAML I/O.

Grid conventions:
  - cells[row, col], row 0 is the *bottom* row (world y grows upward);
    the PGM file stores rows top-down, so I/O flips vertically.
  - Unknown cells are stored as NaN; everything else is a probability
    in [0, 1] (loaded values are exact multiples of 1/255).
  - origin = (x, y, yaw) is the pose of cell (0,0)'s lower-left corner
    in the world frame.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import yaml

from .errors import MapFormatError, OutOfBoundsError

UNKNOWN_PIXEL = 205  # de-facto sentinel of the map-server format

DEFAULT_FREE_THRESH = 0.196
DEFAULT_OCCUPIED_THRESH = 0.65


class CellIndex(NamedTuple):
    col: int
    row: int


class WorldPoint(NamedTuple):
    x: float
    y: float


@dataclass
class OccupancyGridMap:
    resolution: float
    origin: tuple[float, float, float]
    cells: np.ndarray  # float64 (height, width); NaN = unknown
    free_thresh: float = DEFAULT_FREE_THRESH
    occupied_thresh: float = DEFAULT_OCCUPIED_THRESH
    negate: int = 0
    mode: str = "trinary"
    image_name: str = field(default="map.pgm")

    def __post_init__(self):
        self.cells = np.asarray(self.cells, dtype=np.float64)
        self.resolution = float(self.resolution)
        self.origin = (float(self.origin[0]), float(self.origin[1]), float(self.origin[2]))
        self.free_thresh = float(self.free_thresh)
        self.occupied_thresh = float(self.occupied_thresh)
        if self.cells.ndim != 2 or self.cells.shape[0] <= 0 or self.cells.shape[1] <= 0:
            raise MapFormatError("cells must be a non-empty 2D array")
        if self.resolution <= 0:
            raise MapFormatError("resolution must be > 0")
        if not (0 <= self.free_thresh < self.occupied_thresh <= 1):
            raise MapFormatError("need 0 <= free_thresh < occupied_thresh <= 1")
        if self.mode not in ("trinary", "raw"):
            raise MapFormatError(f"unsupported mode {self.mode!r}")
        finite = self.cells[~np.isnan(self.cells)]
        if finite.size and (finite.min() < 0 or finite.max() > 1):
            raise MapFormatError("cell values must lie in [0, 1] or be unknown")

    @property
    def height(self) -> int:
        return self.cells.shape[0]

    @property
    def width(self) -> int:
        return self.cells.shape[1]

    @property
    def unknown_mask(self) -> np.ndarray:
        return np.isnan(self.cells)

    def copy(self) -> "OccupancyGridMap":
        return OccupancyGridMap(
            resolution=self.resolution,
            origin=self.origin,
            cells=self.cells.copy(),
            free_thresh=self.free_thresh,
            occupied_thresh=self.occupied_thresh,
            negate=self.negate,
            mode=self.mode,
            image_name=self.image_name,
        )

    def same_geometry(self, other: "OccupancyGridMap") -> bool:
        return (
            self.cells.shape == other.cells.shape
            and self.resolution == other.resolution
            and tuple(self.origin) == tuple(other.origin)
        )

    # -- world <-> grid-frame <-> cell ------------------------------------

    def world_to_grid(self, x: float, y: float) -> tuple[float, float]:
        """World coordinates -> continuous grid-frame coordinates (meters)."""
        ox, oy, yaw = self.origin
        dx, dy = x - ox, y - oy
        c, s = math.cos(yaw), math.sin(yaw)
        return c * dx + s * dy, -s * dx + c * dy

    def grid_to_world(self, gx: float, gy: float) -> WorldPoint:
        ox, oy, yaw = self.origin
        c, s = math.cos(yaw), math.sin(yaw)
        return WorldPoint(ox + c * gx - s * gy, oy + s * gx + c * gy)

    def grid_extent(self) -> tuple[float, float]:
        """Closed grid-frame extent (width_m, height_m)."""
        return self.width * self.resolution, self.height * self.resolution

    def contains_world(self, p: WorldPoint | tuple[float, float]) -> bool:
        gx, gy = self.world_to_grid(p[0], p[1])
        w, h = self.grid_extent()
        return 0 <= gx <= w and 0 <= gy <= h

    def grid_to_cell(self, gx: float, gy: float) -> CellIndex:
        """Floor convention; points on the far extent edge clamp inward."""
        col = math.floor(gx / self.resolution)
        row = math.floor(gy / self.resolution)
        if col == self.width and gx <= self.width * self.resolution:
            col = self.width - 1
        if row == self.height and gy <= self.height * self.resolution:
            row = self.height - 1
        if not (0 <= col < self.width and 0 <= row < self.height):
            raise OutOfBoundsError(
                f"point ({gx:.4f}, {gy:.4f}) m (grid frame) outside map extent"
            )
        return CellIndex(col, row)

    def world_to_cell(self, p: WorldPoint | tuple[float, float]) -> CellIndex:
        gx, gy = self.world_to_grid(p[0], p[1])
        return self.grid_to_cell(gx, gy)

    def cell_to_world(self, c: CellIndex | tuple[int, int]) -> WorldPoint:
        """World coordinates of the cell center."""
        col, row = c
        if not (0 <= col < self.width and 0 <= row < self.height):
            raise OutOfBoundsError(f"cell ({col}, {row}) out of bounds")
        return self.grid_to_world((col + 0.5) * self.resolution, (row + 0.5) * self.resolution)

    # -- occupancy classes -------------------------------------------------

    def traversable_mask(self) -> np.ndarray:
        """Cells a robot may occupy: known and below the occupied threshold."""
        return ~np.isnan(self.cells) & (self.cells < self.occupied_thresh)

    def lethal_mask(self) -> np.ndarray:
        return ~self.traversable_mask()


def maps_equal(a: OccupancyGridMap, b: OccupancyGridMap) -> bool:
    """Bit-exact comparison: geometry, metadata and every cell (NaN-aware)."""
    return (
        a.same_geometry(b)
        and a.free_thresh == b.free_thresh
        and a.occupied_thresh == b.occupied_thresh
        and a.negate == b.negate
        and a.mode == b.mode
        and np.array_equal(a.cells, b.cells, equal_nan=True)
    )


# -- pixel <-> probability -------------------------------------------------


def _pixels_to_probs(pixels: np.ndarray, negate: int) -> np.ndarray:
    if negate:
        return pixels.astype(np.float64) / 255.0
    return (255.0 - pixels.astype(np.float64)) / 255.0


def _probs_to_pixels(cells: np.ndarray, negate: int) -> np.ndarray:
    scaled = np.rint(np.nan_to_num(cells, nan=0.0) * 255.0)
    pixels = scaled if negate else 255.0 - scaled
    pixels = pixels.astype(np.uint8)
    pixels[np.isnan(cells)] = UNKNOWN_PIXEL
    return pixels


# -- PGM (P5) --------------------------------------------------------------


def _read_pgm(path: str) -> np.ndarray:
    try:
        with open(path, "rb") as f:
            data = f.read()
    except OSError as e:
        raise MapFormatError(f"cannot read image file {path}: {e}") from e

    # header tokens may be separated by whitespace and '#' comments
    pos = 0
    tokens = []
    while len(tokens) < 4:
        if pos >= len(data):
            raise MapFormatError(f"{path}: truncated PGM header")
        ch = data[pos : pos + 1]
        if ch == b"#":
            pos = data.find(b"\n", pos)
            if pos < 0:
                raise MapFormatError(f"{path}: truncated PGM comment")
            pos += 1
        elif ch.isspace():
            pos += 1
        else:
            end = pos
            while end < len(data) and not data[end : end + 1].isspace():
                end += 1
            tokens.append(data[pos:end])
            pos = end
    pos += 1  # single whitespace after maxval

    if tokens[0] != b"P5":
        raise MapFormatError(f"{path}: not a binary PGM (magic {tokens[0]!r})")
    try:
        width, height, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    except ValueError as e:
        raise MapFormatError(f"{path}: malformed PGM header") from e
    if maxval != 255:
        raise MapFormatError(f"{path}: maxval must be 255, got {maxval}")
    raster = data[pos : pos + width * height]
    if len(raster) != width * height:
        raise MapFormatError(f"{path}: raster has {len(raster)} bytes, expected {width * height}")
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width)


def _write_pgm(path: str, pixels: np.ndarray) -> None:
    height, width = pixels.shape
    with open(path, "wb") as f:
        f.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
        f.write(pixels.astype(np.uint8).tobytes())


# -- load / save -----------------------------------------------------------

_REQUIRED_META = ("image", "resolution", "origin")


def load_map(metadata_path: str, mode: str | None = None) -> OccupancyGridMap:
    """Load a map from its YAML metadata plus the referenced PGM image.

    ``mode`` overrides the metadata's mode field ("trinary" or "raw").
    In trinary mode, probabilities strictly between the thresholds load
    as unknown; raw mode keeps every pixel's probability.
    """
    try:
        with open(metadata_path, "r", encoding="utf-8") as f:
            meta = yaml.safe_load(f)
    except OSError as e:
        raise MapFormatError(f"cannot read map metadata {metadata_path}: {e}") from e
    except yaml.YAMLError as e:
        raise MapFormatError(f"{metadata_path}: invalid YAML: {e}") from e
    if not isinstance(meta, dict):
        raise MapFormatError(f"{metadata_path}: metadata must be a mapping")
    for key in _REQUIRED_META:
        if key not in meta:
            raise MapFormatError(f"{metadata_path}: missing required field {key!r}")

    origin = meta["origin"]
    if not (isinstance(origin, (list, tuple)) and len(origin) == 3):
        raise MapFormatError(f"{metadata_path}: origin must be [x, y, yaw]")

    resolution = float(meta["resolution"])
    negate = int(meta.get("negate", 0))
    free_thresh = float(meta.get("free_thresh", DEFAULT_FREE_THRESH))
    occupied_thresh = float(meta.get("occupied_thresh", DEFAULT_OCCUPIED_THRESH))
    mode = mode or meta.get("mode", "trinary")

    image_name = str(meta["image"])
    image_path = image_name
    if not os.path.isabs(image_path):
        image_path = os.path.join(os.path.dirname(os.path.abspath(metadata_path)), image_path)
    pixels = _read_pgm(image_path)
    probs = _pixels_to_probs(pixels, negate)
    if mode == "trinary":
        band = (probs > free_thresh) & (probs < occupied_thresh)
        probs[band] = np.nan

    return OccupancyGridMap(
        resolution=resolution,
        origin=(float(origin[0]), float(origin[1]), float(origin[2])),
        cells=np.flipud(probs),  # file rows are top-down
        free_thresh=free_thresh,
        occupied_thresh=occupied_thresh,
        negate=negate,
        mode=mode,
        image_name=os.path.basename(image_name),
    )


def save_map(grid: OccupancyGridMap, metadata_path: str) -> None:
    """Write YAML metadata plus the PGM image next to it.

    Cell probabilities quantize to 8 bits; unknown cells become pixel 205.
    Loading the result back reproduces the map exactly at that quantization.
    """
    metadata_path = os.path.abspath(metadata_path)
    stem = os.path.splitext(os.path.basename(metadata_path))[0]
    image_name = stem + ".pgm"
    image_path = os.path.join(os.path.dirname(metadata_path), image_name)

    pixels = _probs_to_pixels(np.flipud(grid.cells), grid.negate)
    try:
        _write_pgm(image_path, pixels)
        ox, oy, yaw = grid.origin
        lines = [
            f"image: {image_name}",
            f"mode: {grid.mode}",
            f"resolution: {grid.resolution!r}",
            f"origin: [{ox!r}, {oy!r}, {yaw!r}]",
            f"negate: {grid.negate}",
            f"occupied_thresh: {grid.occupied_thresh!r}",
            f"free_thresh: {grid.free_thresh!r}",
        ]
        with open(metadata_path, "w", encoding="utf-8") as f:
            f.write("\n".join(lines) + "\n")
    except OSError as e:
        raise MapFormatError(f"cannot write map to {metadata_path}: {e}") from e
