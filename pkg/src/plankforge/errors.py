"""Exception hierarchy for plankforge.

The library raises; the CLI maps each class onto an exit code.
"""


class PlankForgeError(Exception):
    """Base class for every error raised by plankforge."""


class InvalidBodyError(PlankForgeError, ValueError):
    """Body representation is malformed, non-convex or degenerate."""


class NotOnBoundaryError(PlankForgeError, ValueError):
    """A point expected on the boundary of a body is not there."""


class PreconditionError(PlankForgeError, ValueError):
    """An operation was called outside its documented domain."""


class NotSpikyError(PlankForgeError):
    """The body has no minimal width direction in which it is spiky."""


class ConvergenceError(PlankForgeError, ArithmeticError):
    """A halving search exhausted its iteration cap."""


class InvalidDocumentError(PlankForgeError, ValueError):
    """A JSON document does not match its published schema."""
