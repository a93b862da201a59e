"""Coordinate frame graph, ray-based ground point selection, registration.

The default graph carries the frames used by the teaching pipeline
(Map, ADF, SoS, Tango, Robot). Edges are rigid transforms; an edge
(parent, child) maps child-frame coordinates into the parent frame.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import yaml

from .errors import FrameGraphError, MapFormatError, RegistrationError
from .gridmap import WorldPoint

DEFAULT_FRAMES = ("Map", "ADF", "SoS", "Tango", "Robot")

_ORTHONORMAL_TOL = 1e-9


@dataclass(frozen=True)
class Pose3:
    rotation: np.ndarray  # 3x3, SO(3)
    translation: np.ndarray  # 3-vector, meters

    def __post_init__(self):
        object.__setattr__(self, "rotation", np.asarray(self.rotation, dtype=np.float64))
        object.__setattr__(self, "translation", np.asarray(self.translation, dtype=np.float64))
        r = self.rotation
        if r.shape != (3, 3) or self.translation.shape != (3,):
            raise FrameGraphError("pose needs a 3x3 rotation and a 3-vector translation")
        if not np.allclose(r @ r.T, np.eye(3), atol=1e-6) or abs(np.linalg.det(r) - 1.0) > 1e-6:
            raise FrameGraphError("rotation must be orthonormal with determinant +1")

    @staticmethod
    def identity() -> "Pose3":
        return Pose3(np.eye(3), np.zeros(3))

    @staticmethod
    def from_xyz_rpy(xyz, rpy) -> "Pose3":
        """Translation plus fixed-axis roll/pitch/yaw (applied in that order)."""
        roll, pitch, yaw = rpy
        cr, sr = math.cos(roll), math.sin(roll)
        cp, sp = math.cos(pitch), math.sin(pitch)
        cy, sy = math.cos(yaw), math.sin(yaw)
        rx = np.array([[1, 0, 0], [0, cr, -sr], [0, sr, cr]])
        ry = np.array([[cp, 0, sp], [0, 1, 0], [-sp, 0, cp]])
        rz = np.array([[cy, -sy, 0], [sy, cy, 0], [0, 0, 1]])
        return Pose3(rz @ ry @ rx, np.asarray(xyz, dtype=np.float64))

    def apply(self, point) -> np.ndarray:
        return self.rotation @ np.asarray(point, dtype=np.float64) + self.translation

    def inverse(self) -> "Pose3":
        rt = self.rotation.T
        return Pose3(rt, -rt @ self.translation)


def compose(a: Pose3, b: Pose3) -> Pose3:
    """a after b: compose(a, b).apply(p) == a.apply(b.apply(p))."""
    return Pose3(a.rotation @ b.rotation, a.rotation @ b.translation + a.translation)


@dataclass(frozen=True)
class Ray:
    origin: np.ndarray
    direction: np.ndarray  # unit vector

    def __post_init__(self):
        object.__setattr__(self, "origin", np.asarray(self.origin, dtype=np.float64))
        object.__setattr__(self, "direction", np.asarray(self.direction, dtype=np.float64))
        if abs(np.linalg.norm(self.direction) - 1.0) > _ORTHONORMAL_TOL:
            raise FrameGraphError("ray direction must be a unit vector")


class FrameGraph:
    """Tree of named frames connected by rigid transforms.

    Each frame has at most one parent, so the path between any two
    connected frames is unique.
    """

    def __init__(self, frames=DEFAULT_FRAMES):
        self._frames = set(frames)
        self._parent: dict[str, str] = {}
        self._edge: dict[str, Pose3] = {}  # child -> pose of child in parent

    @property
    def frames(self) -> set[str]:
        return set(self._frames)

    def add_frame(self, name: str) -> None:
        self._frames.add(name)

    def set_edge(self, parent: str, child: str, pose: Pose3) -> None:
        """Create or update the transform mapping child coords into parent."""
        self._frames.add(parent)
        self._frames.add(child)
        existing = self._parent.get(child)
        if existing is not None and existing != parent:
            raise FrameGraphError(f"frame {child!r} already has parent {existing!r}")
        if self._would_cycle(parent, child):
            raise FrameGraphError(f"edge {parent!r}->{child!r} would create a cycle")
        self._parent[child] = parent
        self._edge[child] = pose

    def _would_cycle(self, parent: str, child: str) -> bool:
        node = parent
        while node in self._parent:
            node = self._parent[node]
            if node == child:
                return True
        return False

    def _path_to_root(self, frame: str) -> list[str]:
        path = [frame]
        while path[-1] in self._parent:
            path.append(self._parent[path[-1]])
        return path

    def lookup_transform(self, from_frame: str, to_frame: str) -> Pose3:
        """Pose mapping points in ``from_frame`` into ``to_frame``."""
        for f in (from_frame, to_frame):
            if f not in self._frames:
                raise FrameGraphError(f"unknown frame {f!r}")
        if from_frame == to_frame:
            return Pose3.identity()

        up_from = self._path_to_root(from_frame)
        up_to = self._path_to_root(to_frame)
        common = None
        to_ancestors = {f: i for i, f in enumerate(up_to)}
        for f in up_from:
            if f in to_ancestors:
                common = f
                break
        if common is None:
            raise FrameGraphError(f"frames {from_frame!r} and {to_frame!r} are disconnected")

        # from_frame -> common
        t = Pose3.identity()
        node = from_frame
        while node != common:
            t = compose(self._edge[node], t)
            node = self._parent[node]
        # common -> to_frame
        down = Pose3.identity()
        node = to_frame
        while node != common:
            down = compose(self._edge[node], down)
            node = self._parent[node]
        return compose(down.inverse(), t)


def load_frame_graph(path: str) -> FrameGraph:
    """Read a YAML list of {parent, child, xyz, rpy} edges."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            entries = yaml.safe_load(f)
    except OSError as e:
        raise MapFormatError(f"cannot read frame config {path}: {e}") from e
    except yaml.YAMLError as e:
        raise MapFormatError(f"{path}: invalid YAML: {e}") from e
    if not isinstance(entries, list):
        raise MapFormatError(f"{path}: frame config must be a list of edges")
    graph = FrameGraph()
    for i, entry in enumerate(entries):
        try:
            graph.set_edge(
                str(entry["parent"]),
                str(entry["child"]),
                Pose3.from_xyz_rpy(entry["xyz"], entry["rpy"]),
            )
        except (KeyError, TypeError) as e:
            raise MapFormatError(f"{path}: edge {i} malformed: {e}") from e
    return graph


def ray_ground_intersection(graph: FrameGraph, ray: Ray, frame: str = "Tango") -> WorldPoint:
    """Cast a device-frame ray onto the ground plane z=0 of the Map frame.

    This is how simulated device poses pick border and seed points: the
    returned (x, y) is the ground hit in world coordinates.
    """
    t = graph.lookup_transform(frame, "Map")
    origin = t.apply(ray.origin)
    direction = t.rotation @ ray.direction
    if abs(direction[2]) < 1e-12:
        raise FrameGraphError("ray is parallel to the ground plane")
    scale = -origin[2] / direction[2]
    if scale <= 0:
        raise FrameGraphError("ray points away from the ground plane")
    hit = origin + scale * direction
    return WorldPoint(float(hit[0]), float(hit[1]))


@dataclass(frozen=True)
class RegistrationResult:
    yaw: float
    translation: tuple[float, float]
    rms: float

    @property
    def pose(self) -> Pose3:
        return Pose3.from_xyz_rpy(
            (self.translation[0], self.translation[1], 0.0), (0.0, 0.0, self.yaw)
        )

    def apply(self, p) -> WorldPoint:
        c, s = math.cos(self.yaw), math.sin(self.yaw)
        return WorldPoint(
            c * p[0] - s * p[1] + self.translation[0],
            s * p[0] + c * p[1] + self.translation[1],
        )


def estimate_registration(pairs) -> RegistrationResult:
    """Least-squares rigid 2D alignment (rotation + translation, no scale).

    ``pairs`` holds (source, target) point pairs; the result maps source
    points onto targets minimizing the summed squared residual.
    """
    if len(pairs) < 2:
        raise RegistrationError(f"need at least 2 point pairs, got {len(pairs)}")
    src = np.array([[p[0][0], p[0][1]] for p in pairs], dtype=np.float64)
    dst = np.array([[p[1][0], p[1][1]] for p in pairs], dtype=np.float64)

    src_mean = src.mean(axis=0)
    dst_mean = dst.mean(axis=0)
    src_c = src - src_mean
    dst_c = dst - dst_mean
    if np.max(np.abs(src_c)) < 1e-12:
        raise RegistrationError("all source points coincide; rotation unobservable")

    h = src_c.T @ dst_c
    u, _, vt = np.linalg.svd(h)
    d = np.sign(np.linalg.det(vt.T @ u.T))
    if d == 0:
        d = 1.0
    rot = vt.T @ np.diag([1.0, d]) @ u.T
    yaw = math.atan2(rot[1, 0], rot[0, 0])
    trans = dst_mean - rot @ src_mean

    aligned = src @ rot.T + trans
    rms = float(np.sqrt(np.mean(np.sum((aligned - dst) ** 2, axis=1))))
    return RegistrationResult(yaw=yaw, translation=(float(trans[0]), float(trans[1])), rms=rms)
