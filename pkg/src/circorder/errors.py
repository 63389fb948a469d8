"""Exception hierarchy shared by every module."""


class CircOrderError(Exception):
    """Base class for all library errors."""


class MalformedInput(CircOrderError, ValueError):
    pass


class ElementNotFound(CircOrderError, KeyError):
    pass


class DegenerateInterval(CircOrderError, ValueError):
    pass


class DomainError(CircOrderError, ValueError):
    pass


class InvalidCycle(CircOrderError, ValueError):
    pass


class InvalidPartialIso(CircOrderError, ValueError):
    """Raised when two tuples are not c-order isomorphic.

    ``witness`` holds the index triple (i, j, k) whose orientation differs.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotASubcycle(CircOrderError, ValueError):
    pass


class ChainMismatch(CircOrderError, ValueError):
    pass


class ResourceBoundExceeded(CircOrderError, RuntimeError):
    pass
