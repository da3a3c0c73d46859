"""Exception types shared across the package.

Everything deliberate raises a subclass of NckitError so the command line
can separate domain failures (exit 1) from genuine bugs (traceback).
"""


class NckitError(Exception):
    """Base class for all domain errors raised by nckit."""


class FieldMismatchError(NckitError):
    """Operands belong to different finite fields."""


class FieldZeroDivision(NckitError, ZeroDivisionError):
    """Multiplicative inverse of zero requested."""


class FixtureFormatError(NckitError):
    """A network description file is malformed."""


class NetworkValidationError(NckitError):
    """A parsed network violates a structural requirement (e.g. a cycle)."""


class InfeasibleNetworkError(NckitError):
    """Some sink's min-cut is below the number of symbols; no field helps."""


class InfeasibleAtFieldError(NckitError):
    """The network is feasible, but not over the requested field."""


class TooLargeError(NckitError):
    """A safety cap on enumeration or term growth was exceeded."""


class NotApplicableError(NckitError):
    """A formula's precondition fails (e.g. q <= number of sinks)."""


class SearchRefusedError(NckitError):
    """An exhaustive search was declined because its space is too big."""


class NoSolutionError(NckitError):
    """A search completed without finding any witness."""


class InternalCheckError(NckitError):
    """Two independent computations of the same quantity disagreed."""
