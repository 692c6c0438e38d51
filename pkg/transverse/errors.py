"""
Transverse Engine Errors
Exception hierarchy shared by the engines, the report pipeline and the CLI
"""


class TransverseError(Exception):
    """Base class for every error raised by the engines"""


class BraidParseError(TransverseError, ValueError):
    """Malformed braid text, out-of-range generator or exponent overflow"""


class DiagramError(TransverseError, ValueError):
    """Invalid crossing position, state length or orientation data"""


class GradingMismatchError(TransverseError, ValueError):
    """A chain element does not sit in the grading an operation requires"""


class ResourceLimitExceeded(TransverseError):
    """A configured cap was hit; the computation is undecided, not answered"""

    def __init__(self, resource: str, limit: int, observed: int):
        self.resource = resource
        self.limit = limit
        self.observed = observed
        super().__init__(f"{resource} limit exceeded: {observed} > {limit}")


class StepLimitExceeded(ResourceLimitExceeded):
    """Handle reduction ran past its step budget"""


class FloorSearchError(TransverseError):
    """Dehornoy floor not found inside the configured search window"""
