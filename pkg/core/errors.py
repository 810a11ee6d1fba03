"""Exception hierarchy shared by the solvers, oracles and the CLI."""

from typing import Any, List, Optional


class PolyvalError(Exception):
    """Base class for all polyval errors."""


class GameFormatError(PolyvalError, ValueError):
    """Game text could not be parsed. `location` points at the offending field."""

    def __init__(self, message: str, location: str = "$"):
        super().__init__(f"{location}: {message}")
        self.location = location


class GameValidationError(PolyvalError, ValueError):
    """A parsed game breaks a structural invariant."""

    def __init__(self, violations: List[Any]):
        text = "; ".join(str(v) for v in violations)
        super().__init__(f"invalid game: {text}")
        self.violations = list(violations)


class ConfigError(PolyvalError, ValueError):
    pass


class CapExceededError(PolyvalError, RuntimeError):
    pass


class PreconditionError(PolyvalError, ValueError):
    pass


class NotFoundError(PolyvalError, RuntimeError):
    """RealizeGraph found no point with the requested tight edges."""


class InvariantViolation(PolyvalError, AssertionError):
    """
    A solver-internal invariant failed. This is always a bug.

    Args:
        condition: short name of the broken condition
        witness: JSON-friendly data pinpointing the failure
    """

    def __init__(self, condition: str, message: str = "", witness: Optional[Any] = None):
        super().__init__(f"{condition}: {message}" if message else condition)
        self.condition = condition
        self.witness = witness
        self.trace: Optional[Any] = None
