"""Exception hierarchy shared by every package in the simulator."""

from typing import Optional


class OffloadSimError(Exception):
    """Base class for all simulator errors."""


class InvalidParameterError(OffloadSimError, ValueError):
    """A numeric argument is outside its allowed range."""


class InvalidAllocationError(InvalidParameterError):
    """Offloaded work was given a non-positive compute allocation."""


class InvalidRateError(InvalidParameterError):
    """Offloaded work was given a non-positive transmission rate."""


class EntityNotFoundError(OffloadSimError, KeyError):
    """An entity id does not exist in the scenario."""

    def __str__(self) -> str:
        # KeyError quotes its argument; keep the plain message
        return str(self.args[0]) if self.args else ""


class ConfigError(OffloadSimError, ValueError):
    """Configuration could not be parsed or validated.

    Args:
        message: Human-readable description
        key: Dotted config key the error refers to, if any
        line: 1-based line number in the config file, if known
    """

    def __init__(
        self, message: str, key: Optional[str] = None, line: Optional[int] = None
    ):
        self.key = key
        self.line = line
        prefix = ""
        if key:
            prefix += f"{key}: "
        if line is not None:
            prefix += f"line {line}: "
        super().__init__(prefix + message)


class InvariantViolationError(OffloadSimError, RuntimeError):
    """A simulation invariant was broken; the run cannot continue."""
