"""Bridge error hierarchy.

The bridge deliberately defines its own exceptions instead of importing the
engine's: it talks to the engine only through files and the command line.
"""


class BridgeError(Exception):
    """Base class for every error raised by fairrank_bridge."""


class InvalidManifest(BridgeError):
    """Run manifest fields violate the corpus contract (e.g. fewer than
    two subgroups, unknown split)."""


class LengthMismatch(BridgeError):
    """Parallel batch sequences have different lengths; nothing was written."""


class FieldOutOfRange(BridgeError):
    """A score, label, or group index is outside its legal range (beyond
    the float-noise clamp slack for scores); nothing was written."""


class IoFailure(BridgeError):
    """Filesystem operation failed, or a target run directory already
    exists and overwrite was not requested."""


class EngineNotFound(BridgeError):
    """The engine executable is not on PATH."""


class NonZeroExit(BridgeError):
    """The engine exited with a non-zero status; stderr is attached."""

    def __init__(self, returncode: int, stderr: str):
        self.returncode = returncode
        self.stderr = stderr
        detail = stderr.strip()
        super().__init__(f"engine exited with status {returncode}"
                         + (f": {detail}" if detail else ""))


class ClampWarning(UserWarning):
    """Scores within float-noise slack of [0,1] were clamped to the boundary."""
