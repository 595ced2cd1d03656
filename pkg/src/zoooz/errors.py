"""Exception types shared across the zoooz package."""


class ZooozError(Exception):
    """Base class for all zoooz errors."""


# --- NMEA parsing ---


class ChecksumMismatch(ZooozError):
    """Sentence framing or checksum is wrong; the line is corrupt and should be dropped."""


class MalformedField(ZooozError):
    """A recognized sentence type carries a field that cannot be parsed."""


# --- Georeferencing ---


class InsufficientPoints(ZooozError):
    """Fewer control points than the affine fit needs."""


class DegenerateGeometry(ZooozError):
    """Control points are collinear or a transform is not invertible."""


# --- Content packs ---


class PackError(ZooozError):
    """Base class for content pack load failures.

    Carries a locator (file plus record id or line number) so the operator
    can find the offending record.
    """

    def __init__(self, message: str, *, file: str = "", locator: str = ""):
        super().__init__(message)
        self.file = file
        self.locator = locator

    def __str__(self) -> str:
        where = ":".join(p for p in (self.file, self.locator) if p)
        base = super().__str__()
        return f"{where}: {base}" if where else base


class MissingFile(PackError):
    """A required pack file or referenced media file does not exist."""


class SchemaViolation(PackError):
    """A pack record fails field-level validation."""


class BrokenReference(PackError):
    """A record references an id that does not exist in the pack."""


class CalibrationMismatch(PackError):
    """Cached calibration coefficients disagree with a re-fit from the control points."""


class UnknownHotspot(ZooozError):
    """Lookup of a hotspot id that is not in the pack."""


# --- Simulator ---


class ScriptInvalid(ZooozError):
    """A walk script violates its invariants."""


# --- Engine ---


class ConfigInvalid(ZooozError):
    """Session configuration values are out of range."""


class InvalidState(ZooozError):
    """An operation was attempted in a connection state that does not allow it."""


class NotReady(ZooozError):
    """A menu action that needs an established GPS connection was called too early."""


class SessionClosed(ZooozError):
    """The session has exited and refuses further operations."""
