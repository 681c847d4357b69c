"""Exception types shared across the package."""


class MultiratError(Exception):
    """Base class for package-specific errors."""


class PlacementInfeasible(MultiratError):
    """Service-point placement cannot satisfy the spacing constraint."""


class ParseError(MultiratError):
    """A persisted document is malformed; ``location`` names the bad field."""

    def __init__(self, message: str, location: str | None = None):
        super().__init__(message if location is None else f"{location}: {message}")
        self.location = location


class ValidationError(MultiratError):
    """A well-formed document violates a model invariant."""


class DomainError(MultiratError):
    """An input lies outside an operation's mathematical domain."""


class BudgetExceeded(MultiratError):
    """Exhaustive enumeration would exceed the candidate budget."""


class InfeasibleProblem(MultiratError):
    """No feasible solution exists under the requested constraints."""
