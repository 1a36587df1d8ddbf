"""Exception hierarchy.

Two families: :class:`InputError` for things the caller got wrong (bad
syntax, bad options, out-of-range dimensions) and :class:`NumericError` for
failures that only show up once numbers are crunched (leaving a domain, a
non-convex point, a blow-up).  The CLI maps them to exit codes 2 and 3.
"""


class CalabiError(Exception):
    """Base class for every error raised by this package."""


class InputError(CalabiError, ValueError):
    pass


class NumericError(CalabiError, ArithmeticError):
    pass


class ZeroExponent(InputError):
    def __init__(self):
        super().__init__("exponent must be nonzero")


class BadDimension(InputError):
    pass


class UnsupportedDimension(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class UnknownEntry(InputError):
    pass


class EvaluationError(NumericError):
    """An expression was evaluated outside the domain of one of its pieces."""

    def __init__(self, message, subtree=None):
        self.subtree = subtree
        if subtree is not None:
            message = f"{message} in subexpression {subtree}"
        super().__init__(message)


class DomainViolation(NumericError):
    pass


class NotConvexAtPoint(NumericError):
    pass


class VanishingPick(NumericError):
    pass


class DegeneratePlane(NumericError):
    pass


class BlowUp(NumericError):
    pass


class LeftDomain(NumericError):
    """A geodesic left the domain; ``path`` holds the samples up to the exit."""

    def __init__(self, message, path=None):
        super().__init__(message)
        self.path = path
