"""Exception hierarchy shared by every provac subsystem."""

from __future__ import annotations


class ProvacError(Exception):
    """Base class for all errors raised by provac."""


class ConfigurationError(ProvacError, KeyError):
    """An operator id, combiner or other configuration name is unknown."""

    def __str__(self) -> str:  # KeyError quotes its message otherwise
        return str(self.args[0]) if self.args else ""


class SpaceMismatchError(ProvacError, TypeError):
    """Decisions from the target space and the policy space were mixed."""


class FixtureError(ProvacError):
    """A truth-table fixture is missing, incomplete, or fails its checksum."""


class GraphParseError(ProvacError, ValueError):
    """A graph ingestion document is malformed."""


class GraphValidationError(ProvacError, ValueError):
    """A provenance graph violates the OPM+ structural rules."""

    def __init__(self, violations: list) -> None:
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"invalid provenance graph: {lines}")


class WalkLimitExceeded(ProvacError, RuntimeError):
    """Walk enumeration produced more walks than the configured cap."""


class PolicySyntaxError(ProvacError, ValueError):
    """The policy text could not be parsed; carries a 1-based line/column."""

    def __init__(self, message: str, line: int = 0, column: int = 0) -> None:
        self.message = message
        self.line = line
        self.column = column
        super().__init__(f"{line}:{column}: {message}")


class PolicyDefinitionError(PolicySyntaxError):
    """A policy parsed but refers to undeclared names or repeats an id."""


class EquivalenceTooLarge(ProvacError, ValueError):
    """check_equivalence refuses schemas over more than four variables."""


class RequestParseError(ProvacError, ValueError):
    """A request document is malformed."""
