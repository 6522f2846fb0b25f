"""Exception hierarchy shared by every module."""


class DeltaRamseyError(Exception):
    """Base class for all errors raised by the package."""


class MalformedTable(DeltaRamseyError, ValueError):
    """A Cayley table has the wrong shape or an entry outside ``[0, n)``."""


class InvalidSemigroup(DeltaRamseyError, ValueError):
    """A table failed validation (non-associative or bad identity).

    The failing :class:`~deltaramsey.semigroup.ValidationReport` is kept on
    ``report``.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class OutOfWindow(DeltaRamseyError, ArithmeticError):
    """A truncated-naturals product fell outside ``[0, N)``."""


class Unsupported(DeltaRamseyError, ValueError):
    """The operation needs structure the semigroup does not have."""


class InvalidInput(DeltaRamseyError, ValueError):
    pass


class SearchBudgetExceeded(DeltaRamseyError, RuntimeError):
    """A bounded search ran out of nodes; the answer is indeterminate."""

    def __init__(self, message, nodes=None):
        super().__init__(message)
        self.nodes = nodes


class PreconditionViolated(DeltaRamseyError, ValueError):
    pass


class HypothesisViolated(DeltaRamseyError, ValueError):
    """The Delta-Ramsey hypothesis (H is large) does not hold."""


class ExtractionStuck(DeltaRamseyError, RuntimeError):
    """Greedy IP extraction found no admissible next generator.

    ``partial`` holds the generators and nested sets built so far.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class NoWitnessFound(DeltaRamseyError, RuntimeError):
    """The backtracking Delta-Ramsey search exhausted every candidate.

    ``deepest`` is the longest partial transcript reached.
    """

    def __init__(self, message, deepest=None):
        super().__init__(message)
        self.deepest = deepest


class InvalidBranch(DeltaRamseyError, ValueError):
    pass


class TheoremViolation(DeltaRamseyError, AssertionError):
    """A conclusion guaranteed for audited inputs failed to hold."""
