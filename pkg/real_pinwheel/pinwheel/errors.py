from typing import Optional


class PinwheelError(Exception):
    """Base class for every error raised by the pinwheel package."""


class ParseError(PinwheelError, ValueError):
    """Raised when instance or schedule text cannot be parsed.

    `position` is the 0-based character offset of the offending token.
    """

    def __init__(self, reason: str, position: int = 0):
        self.reason = reason
        self.position = position
        super().__init__(f"{reason} (at position {position})")


class InvalidInstance(PinwheelError, ValueError):
    pass


class FoldedPeriodBelowOne(PinwheelError, ValueError):
    pass


class TaskIndexOutOfRange(PinwheelError, ValueError):
    pass


class NotShrinkable(PinwheelError, ValueError):
    pass


class OutOfRange(PinwheelError, ValueError):
    pass


class NotInJ(PinwheelError, ValueError):
    pass


class PartitionViolation(PinwheelError, ValueError):
    pass


class OutOfScope(PinwheelError, ValueError):
    """The instance lies outside what the constructions can schedule.

    `unschedulable` is True when the density exceeds 1, in which case no valid
    schedule exists at all.
    """

    def __init__(self, message: str, unschedulable: bool = False):
        self.unschedulable = unschedulable
        super().__init__(message)


class StateCapExceeded(PinwheelError, ValueError):
    def __init__(self, estimate: int, cap: int):
        self.estimate = estimate
        self.cap = cap
        super().__init__(f"state space estimate {estimate} exceeds cap {cap}")


class SelfVerificationFailed(PinwheelError, RuntimeError):
    pass


class CertificateRejected(PinwheelError, RuntimeError):
    def __init__(self, message: str, detail: Optional[str] = None):
        self.detail = detail
        super().__init__(message if detail is None else f"{message}: {detail}")
