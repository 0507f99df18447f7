"""Exception hierarchy for the engine.

Every domain failure derives from FairrankError so the CLI can map it to
exit code 1; I/O problems derive from IoFailure and map to exit code 2.
"""


class FairrankError(Exception):
    """Base class for all domain errors raised by this package."""


class IoFailure(FairrankError):
    """File or stream could not be read or written."""


# --- ingest ---

class MalformedLine(FairrankError):
    """A log line is not valid JSON / does not have the expected field count."""


class MissingField(FairrankError):
    """A log line or manifest lacks a required field."""


class FieldOutOfRange(FairrankError):
    """A field value is outside its documented domain (score, label, group)."""


class InvalidManifest(FairrankError):
    """A run manifest is structurally invalid (bad split, fewer than two groups, ...)."""


class EmptySubgroup(FairrankError):
    """A declared subgroup has no samples."""


# --- metrics ---

class DegenerateLabels(FairrankError):
    """All labels identical where both classes are required."""


class EmptyInput(FairrankError):
    """A metric was called on an empty sample set."""


class UndefinedRate(FairrankError):
    """A confusion rate needed by a downstream formula is undefined."""


class NonBinaryAttribute(FairrankError):
    """An operation defined only for two subgroups was called with m != 2."""


class MixedShape(FairrankError):
    """Inputs that must share a subgroup count do not."""


# --- selection ---

class LengthMismatch(FairrankError):
    """Vectors that must have equal length do not."""


class EmptyCandidates(FairrankError):
    """A selection strategy was called with no candidates."""


# --- stats ---

class UndefinedValue(FairrankError):
    """A rank row contains an undefined (None/NaN) value."""


class TooFewRows(FairrankError):
    """Fewer than two usable rows for the rank test."""


class TooFewAlgorithms(FairrankError):
    """Fewer than two algorithms to compare."""


class UnsupportedK(FairrankError):
    """No critical-difference constant for this number of algorithms."""


class UnsupportedAlpha(FairrankError):
    """No critical-difference constant for this significance level."""
