"""
Exception hierarchy for spectrum_ledger.

Every ledger failure carries a stable ``code`` string. Scenario files refer
to failures by that code (``expect AlreadyRented``), so codes must never be
renamed once published.
"""

from typing import Any, Dict, Optional


class LedgerError(Exception):
    """Base class for all state-machine failures."""

    code = "LedgerError"

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def __str__(self) -> str:
        return f"{self.code}: {self.message}"


class ZeroAddressError(LedgerError):
    code = "ZeroAddress"


class InvalidAddressError(LedgerError):
    code = "InvalidAddress"


class NotOwnerError(LedgerError):
    code = "NotOwner"


class ZeroAmountError(LedgerError):
    code = "ZeroAmount"


class LedgerOverflowError(LedgerError):
    code = "Overflow"


class EmptyChannelIdError(LedgerError):
    code = "EmptyChannelId"


class InsufficientBalanceError(LedgerError):
    code = "InsufficientBalance"


class NoFreeChannelError(LedgerError):
    code = "NoFreeChannel"


class UnknownChannelError(LedgerError):
    code = "UnknownChannel"


class UnknownTokenError(LedgerError):
    code = "UnknownToken"


class NotNfstOwnerError(LedgerError):
    code = "NotNfstOwner"


class ZeroPriceError(LedgerError):
    code = "ZeroPrice"


class ZeroDurationError(LedgerError):
    code = "ZeroDuration"


class AlreadyRentedError(LedgerError):
    code = "AlreadyRented"


class NotListedError(LedgerError):
    code = "NotListed"


class SelfRentalError(LedgerError):
    code = "SelfRental"


class InvariantViolationError(LedgerError):
    """Raised by the invariant suite; ``details`` names the broken property."""

    code = "InvariantViolation"


class ScenarioError(Exception):
    """Base class for scenario-file failures that happen before execution."""

    code = "ScenarioError"


class MalformedAmountError(ScenarioError):
    code = "MalformedAmount"

    def __init__(self, text: str, reason: str):
        super().__init__(f"malformed amount {text!r}: {reason}")
        self.text = text
        self.reason = reason


class ParseError(ScenarioError):
    code = "ParseError"

    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


def error_codes() -> Dict[str, type]:
    """Map every published error code to its exception class."""
    codes: Dict[str, type] = {}
    pending = [LedgerError, ScenarioError]
    while pending:
        cls = pending.pop()
        codes[cls.code] = cls
        pending.extend(cls.__subclasses__())
    return codes
