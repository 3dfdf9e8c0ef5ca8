"""Exception types shared across the toolkit."""


class FusebenchError(Exception):
    """Base class for all toolkit errors."""


class NetpbmParseError(FusebenchError):
    """Malformed PGM/PPM file. Carries the byte offset of the defect."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


class DimensionError(FusebenchError):
    """Image shapes or band counts incompatible with the operation."""


class ParameterError(FusebenchError):
    """Invalid parameter value (non-odd window, bad factor, bad enum)."""


class DegenerateSourceError(FusebenchError):
    """Constant input where variation is required (zero-sigma matching)."""


class UndefinedMetricError(FusebenchError):
    """Metric has no finite value for these inputs (e.g. identical images)."""
