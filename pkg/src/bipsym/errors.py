"""Exception hierarchy. Every error is a ValueError so callers can catch broadly."""


class BipsymError(ValueError):
    pass


class NonUniformMargins(BipsymError):
    pass


class NegativeEntry(BipsymError):
    pass


class BadShape(BipsymError):
    pass


class NotStaircase(BipsymError):
    pass


class IndexOutOfRange(BipsymError):
    pass


class NotExtendable(BipsymError):
    pass


class MismatchedShape(BipsymError):
    pass


class NotInvolution(BipsymError):
    pass


class NotFixedPointFree(BipsymError):
    pass


class EqualInputs(BipsymError):
    pass


class WindowUndefined(BipsymError):
    pass


class OutsideTheoremRange(BipsymError):
    pass


class SearchFailed(BipsymError):
    pass


class InvalidSequence(BipsymError):
    pass


class BudgetExceeded(BipsymError):
    pass


class DegreeMismatch(BipsymError):
    pass


class RangeTooSmall(BipsymError):
    pass


class FlowInfeasible(BipsymError):
    pass


class VerificationFailed(BipsymError):
    """A constructed object failed one of its certified properties."""
