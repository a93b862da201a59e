"""Exception hierarchy shared across the package.

Every error carries a short machine-readable ``code`` so the CLI and the
teach server can emit structured error payloads without string matching.
"""


class BorderForgeError(Exception):
    """Base class for all domain errors."""

    code = "error"

    def __init__(self, message, detail=None):
        super().__init__(message)
        self.detail = detail or {}


class MapFormatError(BorderForgeError):
    """Missing/malformed map metadata or image file."""

    code = "map_format"


class OutOfBoundsError(BorderForgeError):
    """A world point or cell index falls outside the map domain."""

    code = "out_of_bounds"


class ChainInvalidError(BorderForgeError):
    """A polygonal chain violates arity, distinctness or simplicity."""

    code = "chain_invalid"


class SeedOnBarrierError(BorderForgeError):
    code = "seed_on_barrier"


class SeedNotTraversableError(BorderForgeError):
    code = "seed_not_traversable"


class EmptySessionError(BorderForgeError):
    """Undo requested on a session with no applied borders."""

    code = "empty_session"


class ScriptParseError(BorderForgeError):
    """Border script does not parse; ``detail`` carries the position."""

    code = "script_parse"


class ScriptBorderError(BorderForgeError):
    """A border inside a script failed; ``detail['index']`` names it."""

    code = "script_border"

    def __init__(self, index, cause):
        super().__init__(
            f"border {index}: {cause}",
            detail={"index": index, "cause": getattr(cause, "code", "error")},
        )
        self.index = index
        self.cause = cause


class GeometryMismatchError(BorderForgeError):
    """Two grids do not share width/height/resolution/origin."""

    code = "geometry_mismatch"


class PlanningError(BorderForgeError):
    """No path exists, or start/goal are lethal or out of bounds."""

    code = "planning"


class FrameGraphError(BorderForgeError):
    """Unknown frame, disconnected frames, or a second parent for a frame."""

    code = "frame_graph"


class RegistrationError(BorderForgeError):
    """Too few or degenerate correspondences."""

    code = "registration"
