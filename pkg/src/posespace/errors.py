"""Exception types shared across the package."""


class PosespaceError(Exception):
    """Base class for all package-specific errors."""


class DegenerateHand(PosespaceError):
    """Landmarks too degenerate to define a palm frame (collinear or collapsed)."""


class WrongWindowLength(PosespaceError):
    """Pose sequence length does not match the configured window size."""


class ShapeMismatch(PosespaceError):
    """Array shape incompatible with the model or operation."""


class EmptyBatch(PosespaceError):
    """Loss requested on an empty batch."""


class MissingClass(PosespaceError):
    """A gesture class is absent from the training split."""


class TooFewPoints(PosespaceError):
    """Not enough points (or points per class) for the requested statistic."""


class ParseError(PosespaceError):
    """Malformed record in an input file; message names the offending row/line."""


class RangeError(PosespaceError):
    """A value lies outside its documented range."""


class TooFewTracks(PosespaceError):
    """Catalog too small for the requested embedding."""


class MissingTrack(PosespaceError):
    """An imported embedding does not cover a catalog track."""


class DuplicateTrack(PosespaceError):
    """A track id appears more than once where uniqueness is required."""


class NoCenters(PosespaceError):
    """Nearest-emotion query on a space with no emotion centers."""


class EmptySpace(PosespaceError):
    """Nearest-track query on a space with no tracks."""


class TooFew(PosespaceError):
    """Synthetic catalog request smaller than the number of emotions."""


class ProtocolError(PosespaceError):
    """Malformed or incompatible protocol message."""
