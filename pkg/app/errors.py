"""
errors.py — Exception hierarchy for the multicut toolkit.

  MulticutError
  ├── InstanceError      ← malformed instance or illegal transform request
  ├── GuardError         ← a configured size guard refused to run
  ├── ParseError         ← text format violation, with line/column
  └── SolverInvariantError ← a proven property failed at runtime (a bug)
"""

from typing import Optional


class MulticutError(Exception):
    """Base class for every error raised by the app package."""


# ── Instance errors ───────────────────────────────────────────────────────────
class InstanceError(MulticutError, ValueError):
    pass


class CycleDetectedError(InstanceError):
    pass


class DanglingReferenceError(InstanceError):
    pass


class KillTerminalError(InstanceError):
    pass


class BypassTerminalError(InstanceError):
    pass


class ContainsTerminalError(InstanceError):
    pass


class BudgetExhaustedError(InstanceError):
    pass


class InfeasibleCutError(InstanceError):
    pass


class NotASeparatorError(InstanceError):
    pass


class NotSkewShapedError(InstanceError):
    pass


# ── Guards ────────────────────────────────────────────────────────────────────
class GuardError(MulticutError):
    """Raised instead of hanging when an input exceeds a configured limit."""


class TooLargeError(GuardError):
    pass


class ExhaustiveLimitExceededError(GuardError):
    pass


class ExpansionTooLargeError(GuardError):
    pass


# ── Parsing ───────────────────────────────────────────────────────────────────
class ParseError(MulticutError, ValueError):
    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(f"{where}{message}")


# ── Internal bug guards ───────────────────────────────────────────────────────
class SolverInvariantError(MulticutError, AssertionError):
    pass


class VerificationFailedError(SolverInvariantError):
    pass
