"""Exception hierarchy shared by every meanform module."""


class MeanformError(Exception):
    """Base class; the CLI maps subclasses onto exit codes."""

    exit_code = 3


class InputError(MeanformError, ValueError):
    exit_code = 2


class NotHermitian(InputError):
    pass


class NotPSD(InputError):
    pass


class DimensionTooLarge(InputError):
    pass


class ZeroVector(InputError):
    pass


class NotPartialIsometry(InputError):
    pass


class KernelInclusionViolated(InputError):
    pass


class NotUnilateral(InputError):
    pass


class Unbounded(InputError):
    pass


class UnknownSuite(InputError):
    pass


class NoConvergence(MeanformError, ArithmeticError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ParseError(InputError):
    """Malformed weight expression; ``offset`` is a byte offset into the source."""

    def __init__(self, message, offset, expected=()):
        self.offset = offset
        self.expected = tuple(sorted(expected))
        detail = f"{message} at offset {offset}"
        if self.expected:
            detail += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(detail)


class EvalDomainError(InputError, ArithmeticError):
    pass
