"""Exception taxonomy.

Every error the library raises deliberately derives from SoftTileError so the
CLI can map failures onto its exit-code table (usage = 1, infeasible = 2,
internal = 3).
"""


class SoftTileError(Exception):
    """Base class for all library errors."""


class SpecError(SoftTileError):
    """A cluster specification is malformed or violates an invariant."""


class SpecParseError(SpecError):
    """A spec document could not be parsed; carries the offending JSON path."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class InvalidAspectError(SpecError):
    """Aspect ratio is not a positive finite number."""


class InfeasibleError(SoftTileError):
    """A requested floorplan cannot be built."""


class InfeasibleOutlineError(InfeasibleError):
    """Macros do not fit the die outline; message names the binding dimension."""


class OddMacroCountError(InfeasibleError):
    """The u-shape style needs an even number of macros to mirror the halves."""


class OverUtilizationError(InfeasibleError):
    """Region demand exceeds the free space left by the macros."""


class CalibrationError(SoftTileError):
    """Delay-model anchors are degenerate (coincident path lengths)."""


class UnresolvedEndpointError(SoftTileError):
    """A net references an id that has no position in the layout."""


class LayoutParseError(SoftTileError):
    """A layout document could not be parsed."""


class VersionMismatchError(LayoutParseError):
    """A layout document was written by a newer schema version."""


class MissingCharacterizationError(SoftTileError):
    """A demanded aspect ratio has no record in the characterization db."""


class IncompleteDbError(SoftTileError):
    """The characterization db lacks instances a report needs."""


class NotInReferenceError(SoftTileError):
    """An unknown (style, aspect) key was asked of the reference table."""
