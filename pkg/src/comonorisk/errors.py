"""Exception hierarchy shared by all modules."""


class ComonoriskError(Exception):
    """Base class for every error raised by the package."""


class DomainError(ComonoriskError, ValueError):
    """An argument lies outside the domain of the operation."""


class InvariantViolation(ComonoriskError, ValueError):
    """Input data breaks a structural invariant (e.g. probabilities not summing to one)."""


class BracketError(ComonoriskError, RuntimeError):
    """A bisection could not bracket the infimum; the predicate is not monotone in m."""


class UnsatisfiableError(ComonoriskError, ValueError):
    """The request has no solution, e.g. a counterexample asked for where none exists."""


class DegenerateProblem(ComonoriskError, ValueError):
    """A portfolio or preference problem is singular (zero variance of differences, no admissible ratio)."""
