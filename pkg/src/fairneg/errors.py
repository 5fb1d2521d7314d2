"""Exception types shared across the package."""

from __future__ import annotations


class FairnegError(Exception):
    """Base class for all fairneg errors."""


class InvalidDomainError(FairnegError):
    pass


class InvalidBidError(FairnegError):
    pass


class InvalidProfileError(FairnegError):
    """Raised when profile construction is attempted with invariant violations."""

    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = list(violations)


class InvalidNeedsError(FairnegError):
    pass


class InvalidPrincipleError(FairnegError):
    pass


class DomainMismatchError(FairnegError):
    pass


class EmptyInputError(FairnegError):
    pass


class ConfigError(FairnegError):
    """Session configuration rejected; carries every violation found."""

    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = list(violations)


class ProtocolError(FairnegError):
    pass


class OutOfTurnError(ProtocolError):
    pass


class NoStandingOfferError(ProtocolError):
    pass


class TerminalStateError(ProtocolError):
    pass


class IllegalAcceptError(ProtocolError):
    pass


class NoFeasibleBidError(FairnegError):
    pass


class ZeroObservationsError(FairnegError):
    pass


class EmptyTranscriptError(FairnegError):
    pass


class DecisionStateError(FairnegError):
    """Raised when deciding a proposal that is not pending, or executing one
    that was never approved."""


class NonTerminalSessionError(FairnegError):
    pass


class ReplayError(FairnegError):
    def __init__(self, message: str, line_number: int | None = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number
