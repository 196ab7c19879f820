class HyperforgeError(Exception):
    """Base class for library errors."""


class StructureError(HyperforgeError, ValueError):
    """A table or structure is malformed or fails a required axiom level."""


class BoundError(HyperforgeError, ValueError):
    """A configured size bound was exceeded."""


class PreconditionError(HyperforgeError, ValueError):
    """An operation was called outside its documented precondition.

    ``witness`` carries the offending data (indices, classes, pairs) when
    there is one to report.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class BudgetExhausted(HyperforgeError):
    """A budgeted search ran out of nodes; ``partial`` holds what was found."""

    def __init__(self, message, partial):
        super().__init__(message)
        self.partial = partial


class LiftError(HyperforgeError):
    """No ring lift exists although the range dimension demands one."""
